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

// Exact arithmetic helpers shared by the Fourier and combinatorics code.

#ifndef SPARITY_RATIONAL_HPP_
#define SPARITY_RATIONAL_HPP_

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace sparity {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// C(n, k); zero when k < 0 or k > n.
BigInt Binomial(long n, long k);

BigInt Pow2(unsigned e);

// Correctly rounded double nearest to q.
double ToDouble(const Rational& q);

// "p/q" in lowest terms, or "p" when the denominator is one.
std::string ToString(const Rational& q);

// Parses the ToString format.
Rational ParseRational(const std::string& text);

}  // namespace sparity

#endif  // SPARITY_RATIONAL_HPP_
