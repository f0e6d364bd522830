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

// Executable forms of the two sparse-initialization constructions:
//
//  * over-sparse: one gradient step on the first layer (weights fully
//    decayed) turns every good neuron into relu(+-(1/2k) sum_S x + bias);
//    a second layer fitted on top recovers the parity;
//  * under-sparse: one truncated step makes each good neuron weigh the
//    whole support equally while the off-support weights shrink to
//    second order in the background weight.

#ifndef SPARITY_THEORY_HPP_
#define SPARITY_THEORY_HPP_

#include <optional>
#include <vector>

#include "sparity/dataset.hpp"
#include "sparity/mlp.hpp"
#include "sparity/rational.hpp"

namespace sparity {

// x -> [relu(W x + b), 1]: r hidden features plus a constant.
struct FeatureMap {
  enum class Kind { kIdeal, kPostStep };

  Kind kind = Kind::kPostStep;
  RowMatrix W;
  Eigen::VectorXd b;

  int width() const { return static_cast<int>(W.rows()); }
  int dim() const { return width() + 1; }

  // One row of r + 1 features per input row.
  RowMatrix Evaluate(const RowMatrix& x) const;
};

// Output of the linear model on top of the features; `coef` has r + 1
// entries, the last one multiplying the constant feature.
Eigen::VectorXd FeatureModelOutput(const FeatureMap& phi,
                                   const Eigen::VectorXd& coef,
                                   const RowMatrix& x);

double FeatureModelError(const FeatureMap& phi, const Eigen::VectorXd& coef,
                         const Dataset& data);

// Good neurons of an over-sparse initialization grouped by bias-grid slot
// and orientation sign(u_i * C), where C is the relevant-coordinate
// gradient constant.
struct GoodNeuronLayout {
  int width = 0;
  int k = 0;
  std::vector<std::vector<int>> plus;   // one list per grid slot
  std::vector<std::vector<int>> minus;
  std::vector<int> bad;

  int good_count() const;
};

// Biases must come from OverSparseBiasGrid(k).
GoodNeuronLayout OverSparseLayout(const MlpParams& init,
                                  const ParityInstance& inst);

struct Phase1Result {
  MlpParams params;
  FeatureMap phi;
  double eta = 0.0;
  // For full-cube data: post-step weights of the good neurons on S as exact
  // rationals (one row per good neuron, in layout order).
  std::vector<std::vector<Rational>> exact_relevant;
};

// One full-batch hinge step on the first-layer weights with weight decay 1
// and step (1/2k)/|C|; biases and second layer stay frozen. The exact
// rational path is taken when `exact_on_cube` is set, which requires the
// dataset to be the full cube.
Phase1Result oversparse_phase1(const MlpParams& params, const Dataset& data,
                               const ParityInstance& inst, int s,
                               bool exact_on_cube = false);

// Post-step features a good neuron would have under the population
// gradient: weight +-(1/2k) on S, its own bias; bad neurons get no weights.
FeatureMap ideal_feature_map(const ParityInstance& inst,
                             const GoodNeuronLayout& layout,
                             const MlpParams& init);

struct IdealSecondLayer {
  // Coefficients of [1, v_0^+, v_0^-, v_1^+, v_1^-, ...] where
  // v_j^+-(t) = relu(+-t/2k + bias_j) as a function of t = sum_S x.
  std::vector<Rational> nu_exact;
  std::vector<double> nu;
  Eigen::VectorXd u_star;  // length r
  double beta_star = 0.0;
  double norm_bound = 0.0;  // ||nu||_2

  // [u_star, beta_star]
  Eigen::VectorXd Coefficients() const;
};

// Solves the (k+1) x (k+1) system exactly; every slot needs at least one
// neuron of each orientation.
IdealSecondLayer construct_ideal_second_layer(int k,
                                              const GoodNeuronLayout& layout);

struct Phase2Config {
  double lambda = 0.0;
  long steps = 1000;
  // When set, a constant step replaces 1/(lambda t).
  std::optional<double> fixed_step;

  // lambda = eps / B^2
  static Phase2Config ForAccuracy(double eps, double norm_bound, long steps);
};

struct Phase2Result {
  Eigen::VectorXd coef;                // r + 1
  std::vector<double> objective_trace; // before every step, then final
  double final_objective = 0.0;
  bool diverged = false;
};

// Full-batch subgradient descent on mean hinge + (lambda/2)||coef||^2 with
// the first layer frozen; last iterate.
Phase2Result oversparse_phase2(const FeatureMap& phi, const Dataset& data,
                               const Phase2Config& config,
                               std::optional<Eigen::VectorXd> start = {});

struct UnderSparseStepConfig {
  bool theory_mode = true;
  double eps_init = 0.0;
  // Used only outside theory mode.
  double eta = 0.0;
  double gamma = 0.0;
  double lambda = 0.0;
};

struct SubnetworkReport {
  std::vector<int> good_neurons;   // active set inside S
  std::vector<int> passing;        // good neurons meeting the dichotomy
  std::vector<double> biases_covered;
  int biases_required = 0;
  double max_support_deviation = 0.0;  // over passing neurons
  double max_off_support = 0.0;        // over passing neurons
  bool infeasible_gamma = false;
  bool pass = false;
};

struct UnderSparseResult {
  MlpParams params;
  SubnetworkReport report;
  double eta = 0.0;
  double gamma = 0.0;
  double lambda = 0.0;
  // Oracle magnitudes of the gradient on S \ S' and off S.
  double on_support_grad = 0.0;
  double off_support_grad = 0.0;
};

UnderSparseResult undersparse_one_step(const MlpParams& params,
                                       const Dataset& data,
                                       const ParityInstance& inst, int s,
                                       const UnderSparseStepConfig& config);

// 4 * ceil(k^2 (n/k)^s): the width used for the under-sparse check.
int UnderSparseWidth(int n, int k, int s);

}  // namespace sparity

#endif  // SPARITY_THEORY_HPP_
