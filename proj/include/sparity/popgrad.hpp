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

// Population gradients of a single sparse ReLU neuron against a parity,
// at initialization. The "gradient" here is the label-correlation term
//   g_i = E_x[ relu'(<w, x> + b) * x_i * chi_S(x) ],
// which is what every loss with l'(yhat, y) = -y + l0(yhat) contributes
// through its label-dependent part.

#ifndef SPARITY_POPGRAD_HPP_
#define SPARITY_POPGRAD_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "sparity/dataset.hpp"
#include "sparity/fourier.hpp"
#include "sparity/rational.hpp"

namespace sparity {

// Neuron with weight 1 on `active` and `background` elsewhere.
struct SparseNeuron {
  int n = 0;
  std::vector<int> active;
  double background = 0.0;
  double bias = 0.0;

  static SparseNeuron OverSparse(int n, std::vector<int> active,
                                 double bias = 0.0);
  static SparseNeuron UnderSparse(int n, std::vector<int> active,
                                  double background, double bias = 0.0);

  int s() const { return static_cast<int>(active.size()); }
  bool IsActive(int i) const;
  std::vector<double> Weights() const;

  // Sorted, distinct, in-range active set; background in {0} or
  // (0, 1/(n - s)).
  void Validate() const;
};

struct GoodNeuronProbability {
  // C(n-k, s-k) / C(n, s): chance that a random s-subset contains S.
  Rational exact;
  // (s / 2n)^k
  Rational lower_bound;
  double exact_value = 0.0;
  double lower_bound_value = 0.0;
  bool bound_holds = false;
};

GoodNeuronProbability good_neuron_probability(int n, int k, int s);

struct GapConstants {
  int k = 0;
  int s = 0;
  Rational relevant_exact;    // (1/2) maj(s, k-1)
  Rational irrelevant_exact;  // (1/2) maj(s, k+1)
  double relevant = 0.0;
  double irrelevant = 0.0;
  // (1/2) sqrt(rho(k-1)) C(s, k-1)^(-1/2),
  // rho(v) = 2 / (pi v 2^v) * C(v-1, (v-1)/2).
  double kappa_lower = 0.0;
  double ratio_bound = 0.0;  // 4k / s

  // |irrelevant| * s <= 4k * |relevant|, decided exactly.
  bool RatioWithinBound() const;
};

// k even, s odd, k < s.
GapConstants gap_constants(int k, int s);

// Over-sparse neuron (background 0, s odd, k even, |bias| < 1/2).
std::vector<Rational> PopGradOversparseExact(const SparseNeuron& neuron,
                                             const ParityInstance& inst);
std::vector<double> pop_grad_oversparse(const SparseNeuron& neuron,
                                        const ParityInstance& inst);

// Under-sparse neuron (background in (0, 1/(n-s)), s < k, s and k even,
// |bias| < background). A zero sum over `active` together with a zero
// sum over the background coordinates leaves the pre-activation equal to
// the bias, so the Majority tie follows the sign of the bias.
std::vector<Rational> PopGradUndersparseExact(const SparseNeuron& neuron,
                                              const ParityInstance& inst);
std::vector<double> pop_grad_undersparse(const SparseNeuron& neuron,
                                         const ParityInstance& inst);

struct GapRatioReport {
  int n = 0;
  int k = 0;
  int s = 0;
  Rational exact;            // |grad on S \ S'| / |grad off S|
  double value = 0.0;
  double stated_form = 0.0;  // (n - s) / (k - s - 1)
  double derived_form = 0.0; // (n - k) / (k - s - 1)
  bool matches_stated = false;
  bool matches_derived = false;
};

// Good under-sparse neuron (S' inside S). Needs k - s even and positive
// k - s - 1.
GapRatioReport undersparse_gap_ratio(int n, int k, int s);

// Exact expectation by enumerating the cube; n <= 24.
std::vector<double> brute_force_neuron_grad(const SparseNeuron& neuron,
                                            const ParityInstance& inst);

// Analytic gradient when a closed form applies, else brute force.
std::vector<double> PopulationNeuronGrad(const SparseNeuron& neuron,
                                         const ParityInstance& inst);

// Sample average of relu'(<w,x>+b) x_i y over the rows of `data`.
std::vector<double> EmpiricalNeuronGrad(const SparseNeuron& neuron,
                                        const Dataset& data);

// Sup-norm distance between the empirical gradient on the given sample
// and the population gradient.
double EmpiricalGradGapOn(const SparseNeuron& neuron,
                          const ParityInstance& inst, const Dataset& data);

// Largest such distance over the neurons, on m fresh samples.
double empirical_grad_gap(std::span<const SparseNeuron> neurons,
                          const ParityInstance& inst, std::size_t m,
                          std::uint64_t seed);

}  // namespace sparity

#endif  // SPARITY_POPGRAD_HPP_
