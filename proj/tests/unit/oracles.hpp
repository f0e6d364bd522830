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


// Independent enumeration oracles for the unit tests. Nothing here calls
// into the library, so agreement with it is a real cross-check.

#ifndef SPARITY_TESTS_ORACLES_HPP_
#define SPARITY_TESTS_ORACLES_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <algorithm>
#include <random>
#include <vector>

namespace oracle {

using Point = std::vector<int>;

// All 2^n points of {-1, +1}^n, coordinate i = +1 when bit i is set.
inline std::vector<Point> Cube(int n) {
  std::vector<Point> out;
  for (std::uint32_t index = 0; index < (1u << n); ++index) {
    Point x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = (index >> i) & 1u ? 1 : -1;
    out.push_back(x);
  }
  return out;
}

inline int Sum(const Point& x) {
  int s = 0;
  for (int v : x) s += v;
  return s;
}

inline int Chi(const Point& x, const std::vector<int>& set) {
  int p = 1;
  for (int i : set) p *= x[static_cast<std::size_t>(i)];
  return p;
}

inline int Maj(const Point& x) { return Sum(x) > 0 ? 1 : -1; }
inline int Half(const Point& x) { return Sum(x) == 0 ? 1 : 0; }

// E_x[f(x) chi_set(x)] over the cube.
inline double Coefficient(int n, const std::function<double(const Point&)>& f,
                          const std::vector<int>& set) {
  double total = 0.0;
  for (const Point& x : Cube(n)) total += f(x) * Chi(x, set);
  return total / static_cast<double>(1u << n);
}

// E_x[1{<w, x> + b > 0} x_i chi_S(x)] for every i.
inline std::vector<double> NeuronGrad(const std::vector<double>& w, double b,
                                      const std::vector<int>& support) {
  const int n = static_cast<int>(w.size());
  std::vector<double> g(w.size(), 0.0);
  for (const Point& x : Cube(n)) {
    // Integer sums per distinct weight, so ties at zero stay exact.
    std::map<double, int> sums;
    for (int i = 0; i < n; ++i) sums[w[static_cast<std::size_t>(i)]] += x[static_cast<std::size_t>(i)];
    double pre = b;
    for (const auto& [weight, sum] : sums) pre += weight * sum;
    if (!(pre > 0.0)) continue;
    const int chi = Chi(x, support);
    for (int i = 0; i < n; ++i) g[static_cast<std::size_t>(i)] += x[static_cast<std::size_t>(i)] * chi;
  }
  for (double& v : g) v /= static_cast<double>(1u << n);
  return g;
}

// Sorted random subset of {0..n-1} of the given size.
inline std::vector<int> RandomSubset(std::mt19937_64& gen, int n, int size) {
  std::vector<int> all(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  std::shuffle(all.begin(), all.end(), gen);
  all.resize(static_cast<std::size_t>(size));
  std::sort(all.begin(), all.end());
  return all;
}

inline int Pick(std::mt19937_64& gen, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(gen);
}

}  // namespace oracle

#endif  // SPARITY_TESTS_ORACLES_HPP_
