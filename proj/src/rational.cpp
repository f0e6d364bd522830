// Copyright 2026 The sparity Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sparity/rational.hpp"

#include <cmath>
#include <cstdint>

#include "sparity/error.hpp"

namespace sparity {

namespace mp = boost::multiprecision;

BigInt Binomial(long n, long k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt result = 1;
  for (long i = 1; i <= k; ++i) {
    result *= n - k + i;
    result /= i;  // exact: result is C(n-k+i, i) here
  }
  return result;
}

BigInt Pow2(unsigned e) {
  BigInt one = 1;
  return one << e;
}

double ToDouble(const Rational& q) {
  BigInt p = mp::numerator(q);
  const BigInt d = mp::denominator(q);
  if (p == 0) return 0.0;
  const bool negative = p < 0;
  if (negative) p = -p;

  // Scale so the integer quotient carries 55 or 56 significant bits, then
  // round to 53 bits by hand (half-to-even with a sticky remainder bit).
  const long shift = 55 - (static_cast<long>(mp::msb(p)) -
                           static_cast<long>(mp::msb(d)));
  BigInt num = p;
  BigInt den = d;
  if (shift >= 0) {
    num <<= static_cast<unsigned>(shift);
  } else {
    den <<= static_cast<unsigned>(-shift);
  }
  BigInt quotient;
  BigInt remainder;
  mp::divide_qr(num, den, quotient, remainder);

  const unsigned bits = static_cast<unsigned>(mp::msb(quotient)) + 1;
  const unsigned extra = bits - 53;
  const auto raw = quotient.convert_to<std::uint64_t>();
  std::uint64_t mantissa = raw >> extra;
  const std::uint64_t dropped = raw & ((std::uint64_t{1} << extra) - 1);
  const std::uint64_t half = std::uint64_t{1} << (extra - 1);
  const bool sticky = remainder != 0;
  if (dropped > half || (dropped == half && (sticky || (mantissa & 1)))) {
    ++mantissa;
  }
  const double value = std::ldexp(static_cast<double>(mantissa),
                                  static_cast<int>(extra) -
                                      static_cast<int>(shift));
  return negative ? -value : value;
}

std::string ToString(const Rational& q) {
  const BigInt& num = mp::numerator(q);
  const BigInt& den = mp::denominator(q);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

Rational ParseRational(const std::string& text) {
  try {
    const auto slash = text.find('/');
    if (slash == std::string::npos) return Rational(BigInt(text));
    const BigInt num(text.substr(0, slash));
    const BigInt den(text.substr(slash + 1));
    Require(den != 0, "rational with zero denominator: " + text);
    return Rational(num, den);
  } catch (const Error&) {
    throw;
  } catch (const std::exception&) {
    Fail(ErrorCode::kInvalidArgument, "malformed rational: " + text);
  }
}

}  // namespace sparity
