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

#ifndef SPARITY_RNG_HPP_
#define SPARITY_RNG_HPP_

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string_view>
#include <vector>

namespace sparity {

// SplitMix64 finalizer.
std::uint64_t Mix64(std::uint64_t x);

// Order-sensitive hash of a base seed and a list of coordinates. Used to
// derive per-run substreams so that results never depend on execution order.
std::uint64_t DeriveSeed(std::uint64_t base,
                         std::initializer_list<std::uint64_t> coords);

std::uint64_t HashTag(std::string_view tag);

// Seedable generator with explicit, platform-independent conversions (the
// std distributions are implementation-defined, so they are avoided).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(Mix64(seed)) {}

  std::uint64_t seed() const { return seed_; }

  // Independent child stream; does not advance this generator.
  Rng Split(std::string_view tag) const;
  Rng Split(std::uint64_t tag) const;

  std::uint64_t NextU64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform on {0, ..., bound - 1}; bound > 0.
  std::uint64_t Below(std::uint64_t bound);

  int Sign() { return (NextU64() >> 63) ? 1 : -1; }

  // Fills `out` with independent uniform +1/-1 values.
  void FillSigns(double* out, std::size_t count);

  // `count` distinct indices from {0..n-1}, sorted ascending.
  std::vector<int> SampleSubset(int n, int count);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace sparity

#endif  // SPARITY_RNG_HPP_
