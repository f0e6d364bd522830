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

// Statistical-query view of gradient training on parities: a run with r
// parameters, T steps and gradient precision tau is simulated by a
// label-free trajectory unless some query correlates with the target
// parity by more than tau.

#ifndef SPARITY_SQ_HPP_
#define SPARITY_SQ_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "sparity/fourier.hpp"
#include "sparity/mlp.hpp"

namespace sparity {

struct SqBudget {
  double r = 1.0;  // trainable parameters, i.e. queries per step
  double T = 1.0;
  double tau = 1.0;
  double delta = 1.0;

  // r T / (tau^2 delta)
  double Ratio() const;
  void Validate() const;
};

// Ratio() <= C(n, k) / 2.
bool budget_check(int n, int k, const SqBudget& budget);

struct ParsevalAudit {
  double sum = 0.0;   // sum over |S| = k of <query, chi_S>^2
  double mean = 0.0;  // sum / C(n, k)
  long parities = 0;
};

// Query values must lie in [-1, 1]; n <= 20.
ParsevalAudit parseval_audit(const BooleanFnTable& query, int k);

// Which parameter groups move along the trajectory.
struct TrainableGroups {
  bool W = true;
  bool b = true;
  bool u = true;
  bool beta = true;

  static TrainableGroups Only(bool w, bool b, bool u, bool beta) {
    return {w, b, u, beta};
  }
  long Count(int r, int n) const;
};

struct StarModelConfig {
  int n = 8;
  int r = 1;
  InitScheme scheme;
  std::uint64_t seed = 0;
  double eta = 0.1;
  // Regularizer (weight_decay / 2) ||theta||^2 over the trainable groups.
  double weight_decay = 0.0;
  TrainableGroups trainable;
};

// Gradient descent on E_x[(1/2) h(x)^2] + R over the full cube, i.e. square
// loss against the constant-0 target. No label enters.
struct StarTrajectory {
  int n = 0;
  TrainableGroups trainable;
  std::vector<MlpParams> states;  // theta_0 .. theta_T

  long steps() const { return static_cast<long>(states.size()) - 1; }
  long ParameterCount() const;
};

// n <= 20.
StarTrajectory star_trajectory(const StarModelConfig& config, long T);

struct ParityAuditRow {
  std::vector<int> support;
  double max_corr = 0.0;
  bool hidden = false;
};

struct HardParityResult {
  std::optional<std::vector<int>> hard_support;
  std::vector<ParityAuditRow> table;  // every S with |S| = k, lexicographic
  double hidden_fraction = 0.0;
  // Sup of |d h / d theta_i| over inputs, coordinates and audited steps;
  // correlations are divided by it when it exceeds 1.
  double normalization = 1.0;
  long queries = 0;
  // Largest Parseval mean over the audited (normalized) queries.
  double max_parseval_mean = 0.0;
};

// Audits the gradient queries issued at theta_0 .. theta_{T-1}; n <= 14.
HardParityResult find_hard_parity(const StarTrajectory& traj, int k,
                                  double tau);

// Subsets of {0..n-1} of size k in lexicographic order.
std::vector<std::vector<int>> AllSubsets(int n, int k);

}  // namespace sparity

#endif  // SPARITY_SQ_HPP_
