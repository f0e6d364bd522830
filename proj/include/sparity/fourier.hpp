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

// Boolean functions on the cube {-1,+1}^n: parities, Majority, Half, and
// their Fourier coefficients.
//
// Truth tables index inputs by their bit pattern: bit i of the index is set
// exactly when x_i = +1. Every table-based routine in the library uses this
// convention, so tables built here can be compared bit-for-bit elsewhere.

#ifndef SPARITY_FOURIER_HPP_
#define SPARITY_FOURIER_HPP_

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sparity/rational.hpp"

namespace sparity {

// Largest dimension for which full truth tables may be materialized.
inline constexpr int kMaxTableDimension = 24;

// A hidden (n, k)-parity: n input bits, label chi_S(x) = prod_{i in S} x_i.
class ParityInstance {
 public:
  // Sorts `support`; rejects duplicates, out-of-range indices and k = 0.
  ParityInstance(int n, std::vector<int> support);

  int n() const { return n_; }
  int k() const { return static_cast<int>(support_.size()); }
  const std::vector<int>& support() const { return support_; }
  bool Contains(int index) const;

  // Bit mask of the support; only valid for n <= 64.
  std::uint64_t Mask() const;

  friend bool operator==(const ParityInstance&, const ParityInstance&) = default;

 private:
  int n_;
  std::vector<int> support_;
};

// +1/-1 value of coordinate i of the cube point with the given table index.
inline int CubeCoordinate(std::uint32_t index, int i) {
  return ((index >> i) & 1u) ? 1 : -1;
}

// chi_S at a table index, where S is given as a bit mask.
inline int CharacterAt(std::uint32_t index, std::uint64_t set_mask) {
  const auto minus_ones =
      static_cast<std::uint64_t>(~index) & set_mask & 0xffffffffull;
  return (__builtin_popcountll(minus_ones) & 1) ? -1 : 1;
}

std::uint64_t IndexMask(std::span<const int> indices, int n);

int EvalParity(const ParityInstance& inst, std::span<const int> x);

// sgn(sum x) with the tie sgn(0) = -1.
int EvalMajority(std::span<const int> x);

// 1 when the coordinates sum to zero, else 0.
int EvalHalf(std::span<const int> x);

class BooleanFnTable {
 public:
  BooleanFnTable(int n, std::vector<double> values);

  static BooleanFnTable FromFunction(
      int n, const std::function<double(std::span<const int>)>& f);

  int n() const { return n_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t index) const { return values_[index]; }
  const std::vector<double>& values() const { return values_; }

 private:
  int n_;
  std::vector<double> values_;
};

BooleanFnTable MajorityTable(int n);
BooleanFnTable HalfTable(int n);
BooleanFnTable ParityTable(const ParityInstance& inst);

// Full truth table of EvalMajority for any n <= 24 (even n uses the
// sgn(0) = -1 tie).
BooleanFnTable majority_table_any_n(int n);

// (1/2^n) sum_x f(x) chi_S(x) by direct enumeration.
double brute_force_fourier(const BooleanFnTable& f, std::span<const int> set);

// Unnormalized Walsh-Hadamard transform: entry T holds sum_x f(x) chi_T(x),
// with T encoded as a bit mask. O(n 2^n).
std::vector<double> WalshHadamard(const BooleanFnTable& f);

struct FourierCoefficient {
  Rational exact;
  double value = 0.0;
};

// Degree-d coefficient of Maj_n for odd n and odd d <= n.
FourierCoefficient maj_fourier_coeff(int n, int d);

// Degree-d coefficient of Half_n for even n and even d <= n.
FourierCoefficient half_fourier_coeff(int n, int d);

enum class MajorityTie { kNegative, kPositive };

// Degree-d coefficient of any symmetric function g(sum x) on n bits,
// computed exactly as a Krawtchouk sum over the number of -1 entries.
Rational SymmetricCoefficient(int n, int d,
                              const std::function<Rational(int)>& of_sum);

// Majority coefficient for any n >= 0, including even n with the given
// tie convention. Maj_0 is the constant tie value.
Rational MajorityCoefficient(int n, int d, MajorityTie tie = MajorityTie::kNegative);

// Half coefficient for any n >= 0 (identically zero for odd n).
Rational HalfCoefficient(int n, int d);

}  // namespace sparity

#endif  // SPARITY_FOURIER_HPP_
