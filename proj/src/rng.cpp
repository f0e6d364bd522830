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

#include "sparity/rng.hpp"

#include <algorithm>
#include <numeric>

#include "sparity/error.hpp"

namespace sparity {

std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t DeriveSeed(std::uint64_t base,
                         std::initializer_list<std::uint64_t> coords) {
  std::uint64_t h = Mix64(base);
  for (std::uint64_t c : coords) h = Mix64(h ^ Mix64(c + 0x632be59bd9b4e019ull));
  return h;
}

std::uint64_t HashTag(std::string_view tag) {
  // FNV-1a, then mixed.
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return Mix64(h);
}

Rng Rng::Split(std::string_view tag) const { return Split(HashTag(tag)); }

Rng Rng::Split(std::uint64_t tag) const {
  return Rng(DeriveSeed(seed_, {tag}));
}

double Rng::Uniform() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::Below(std::uint64_t bound) {
  Require(bound > 0, "Below() needs a positive bound");
  // Rejection sampling on the top of the range keeps the result unbiased.
  const std::uint64_t limit = -bound % bound;  // 2^64 mod bound
  for (;;) {
    const std::uint64_t r = NextU64();
    if (r >= limit) return r % bound;
  }
}

void Rng::FillSigns(double* out, std::size_t count) {
  std::size_t i = 0;
  while (i < count) {
    std::uint64_t bits = NextU64();
    const std::size_t take = std::min<std::size_t>(64, count - i);
    for (std::size_t j = 0; j < take; ++j, bits >>= 1) {
      out[i++] = (bits & 1) ? 1.0 : -1.0;
    }
  }
}

std::vector<int> Rng::SampleSubset(int n, int count) {
  Require(count >= 0 && count <= n, "cannot sample more indices than n");
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < count; ++i) {
    const auto j = i + static_cast<int>(Below(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count);
  std::sort(pool.begin(), pool.end());
  return pool;
}

}  // namespace sparity
