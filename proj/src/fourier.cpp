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

#include "sparity/fourier.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "sparity/error.hpp"

namespace sparity {

namespace {

void CheckPlusMinusOne(std::span<const int> x) {
  for (int v : x) {
    Require(v == 1 || v == -1, "input entries must be +1 or -1");
  }
}

void CheckTableDimension(int n) {
  if (n < 0 || n > kMaxTableDimension) {
    Fail(ErrorCode::kScaleGuard,
         "truth tables are limited to n <= " +
             std::to_string(kMaxTableDimension) + " (got " +
             std::to_string(n) + ")");
  }
}

// The shared closed form for Maj_{2m+1}(2j+1) and Half_{2m}(2j).
Rational MajorityHalfClosedForm(long m, long j) {
  Rational value(Binomial(m, j) * Binomial(2 * m, m),
                 Binomial(2 * m, 2 * j) * Pow2(static_cast<unsigned>(2 * m)));
  return (j % 2 == 0) ? value : Rational(-value);
}

}  // namespace

ParityInstance::ParityInstance(int n, std::vector<int> support)
    : n_(n), support_(std::move(support)) {
  Require(n >= 1, "parity dimension must be positive");
  Require(!support_.empty(), "parity degree k must be at least 1");
  std::sort(support_.begin(), support_.end());
  Require(std::adjacent_find(support_.begin(), support_.end()) ==
              support_.end(),
          "parity support indices must be distinct");
  Require(support_.front() >= 0 && support_.back() < n,
          "parity support index out of range [0, n)");
}

bool ParityInstance::Contains(int index) const {
  return std::binary_search(support_.begin(), support_.end(), index);
}

std::uint64_t ParityInstance::Mask() const { return IndexMask(support_, n_); }

std::uint64_t IndexMask(std::span<const int> indices, int n) {
  Require(n <= 64, "bit masks need n <= 64");
  std::uint64_t mask = 0;
  for (int i : indices) {
    if (i < 0 || i >= n) {
      Fail(ErrorCode::kInvalidArgument,
           "index " + std::to_string(i) + " out of range for n = " +
               std::to_string(n));
    }
    mask |= std::uint64_t{1} << i;
  }
  return mask;
}

int EvalParity(const ParityInstance& inst, std::span<const int> x) {
  Require(static_cast<int>(x.size()) == inst.n(),
          "input length does not match parity dimension");
  CheckPlusMinusOne(x);
  int product = 1;
  for (int i : inst.support()) product *= x[i];
  return product;
}

int EvalMajority(std::span<const int> x) {
  CheckPlusMinusOne(x);
  const int sum = std::accumulate(x.begin(), x.end(), 0);
  return sum > 0 ? 1 : -1;
}

int EvalHalf(std::span<const int> x) {
  CheckPlusMinusOne(x);
  return std::accumulate(x.begin(), x.end(), 0) == 0 ? 1 : 0;
}

BooleanFnTable::BooleanFnTable(int n, std::vector<double> values)
    : n_(n), values_(std::move(values)) {
  CheckTableDimension(n);
  Require(values_.size() == (std::size_t{1} << n),
          "truth table length must be 2^n");
}

BooleanFnTable BooleanFnTable::FromFunction(
    int n, const std::function<double(std::span<const int>)>& f) {
  CheckTableDimension(n);
  const std::size_t size = std::size_t{1} << n;
  std::vector<double> values(size);
  std::vector<int> x(n);
  for (std::size_t index = 0; index < size; ++index) {
    for (int i = 0; i < n; ++i) {
      x[i] = CubeCoordinate(static_cast<std::uint32_t>(index), i);
    }
    values[index] = f(x);
  }
  return BooleanFnTable(n, std::move(values));
}

BooleanFnTable MajorityTable(int n) { return majority_table_any_n(n); }

BooleanFnTable majority_table_any_n(int n) {
  CheckTableDimension(n);
  const std::size_t size = std::size_t{1} << n;
  std::vector<double> values(size);
  for (std::size_t index = 0; index < size; ++index) {
    const int plus = __builtin_popcountll(index);
    values[index] = (2 * plus - n) > 0 ? 1.0 : -1.0;
  }
  return BooleanFnTable(n, std::move(values));
}

BooleanFnTable HalfTable(int n) {
  CheckTableDimension(n);
  const std::size_t size = std::size_t{1} << n;
  std::vector<double> values(size);
  for (std::size_t index = 0; index < size; ++index) {
    values[index] = (2 * __builtin_popcountll(index) == n) ? 1.0 : 0.0;
  }
  return BooleanFnTable(n, std::move(values));
}

BooleanFnTable ParityTable(const ParityInstance& inst) {
  CheckTableDimension(inst.n());
  const std::uint64_t mask = inst.Mask();
  const std::size_t size = std::size_t{1} << inst.n();
  std::vector<double> values(size);
  for (std::size_t index = 0; index < size; ++index) {
    values[index] = CharacterAt(static_cast<std::uint32_t>(index), mask);
  }
  return BooleanFnTable(inst.n(), std::move(values));
}

double brute_force_fourier(const BooleanFnTable& f, std::span<const int> set) {
  Require(static_cast<int>(set.size()) <= f.n(),
          "coefficient set larger than the dimension");
  const std::uint64_t mask = IndexMask(set, f.n());
  double sum = 0.0;
  for (std::size_t index = 0; index < f.size(); ++index) {
    sum += f[index] * CharacterAt(static_cast<std::uint32_t>(index), mask);
  }
  return sum / static_cast<double>(f.size());
}

std::vector<double> WalshHadamard(const BooleanFnTable& f) {
  // With bit i set meaning x_i = +1, chi_T(x) = prod over T of (+1 or -1),
  // so the butterfly is (lo, hi) -> (lo + hi, hi - lo) where lo has x_i = -1.
  std::vector<double> a = f.values();
  for (std::size_t half = 1; half < a.size(); half <<= 1) {
    for (std::size_t block = 0; block < a.size(); block += 2 * half) {
      for (std::size_t j = block; j < block + half; ++j) {
        const double lo = a[j];
        const double hi = a[j + half];
        a[j] = lo + hi;
        a[j + half] = hi - lo;
      }
    }
  }
  return a;
}

FourierCoefficient maj_fourier_coeff(int n, int d) {
  Require(n >= 1 && n % 2 == 1, "Majority closed form needs odd n");
  Require(d >= 1 && d % 2 == 1 && d <= n,
          "Majority closed form needs odd d with 1 <= d <= n");
  FourierCoefficient c;
  c.exact = MajorityHalfClosedForm((n - 1) / 2, (d - 1) / 2);
  c.value = ToDouble(c.exact);
  return c;
}

FourierCoefficient half_fourier_coeff(int n, int d) {
  Require(n >= 0 && n % 2 == 0, "Half closed form needs even n");
  Require(d >= 0 && d % 2 == 0 && d <= n,
          "Half closed form needs even d with 0 <= d <= n");
  FourierCoefficient c;
  c.exact = MajorityHalfClosedForm(n / 2, d / 2);
  c.value = ToDouble(c.exact);
  return c;
}

Rational SymmetricCoefficient(int n, int d,
                              const std::function<Rational(int)>& of_sum) {
  Require(n >= 0 && d >= 0 && d <= n, "need 0 <= d <= n");
  // Split the cube into the first d coordinates (p of them equal to -1) and
  // the remaining n - d (q of them equal to -1).
  Rational total = 0;
  for (int p = 0; p <= d; ++p) {
    const BigInt ways_p = Binomial(d, p);
    for (int q = 0; q <= n - d; ++q) {
      const Rational g = of_sum(n - 2 * (p + q));
      if (g == 0) continue;
      const Rational term = g * Rational(ways_p * Binomial(n - d, q));
      if (p % 2 == 0) {
        total += term;
      } else {
        total -= term;
      }
    }
  }
  return total / Rational(Pow2(static_cast<unsigned>(n)));
}

Rational MajorityCoefficient(int n, int d, MajorityTie tie) {
  const int tie_value = tie == MajorityTie::kPositive ? 1 : -1;
  return SymmetricCoefficient(n, d, [tie_value](int sum) {
    return Rational(sum > 0 ? 1 : (sum < 0 ? -1 : tie_value));
  });
}

Rational HalfCoefficient(int n, int d) {
  return SymmetricCoefficient(
      n, d, [](int sum) { return Rational(sum == 0 ? 1 : 0); });
}

}  // namespace sparity
