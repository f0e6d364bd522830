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

#include "sparity/sq.hpp"

#include <algorithm>
#include <cmath>

#include "sparity/dataset.hpp"
#include "sparity/error.hpp"

namespace sparity {
namespace {

constexpr int kMaxAuditDimension = 14;
constexpr int kMaxParsevalDimension = 20;

// In-place unnormalized Walsh-Hadamard transform of a length-2^n vector.
void Fwht(std::vector<double>& v) {
  for (std::size_t len = 1; len < v.size(); len <<= 1) {
    for (std::size_t i = 0; i < v.size(); i += len << 1) {
      for (std::size_t j = i; j < i + len; ++j) {
        const double lo = v[j];
        const double hi = v[j + len];
        v[j] = lo + hi;
        v[j + len] = hi - lo;
      }
    }
  }
}

// Inputs of the full cube with no labels attached.
RowMatrix CubeInputs(int n) {
  const std::size_t size = std::size_t{1} << n;
  RowMatrix x(static_cast<Eigen::Index>(size), n);
  for (std::size_t index = 0; index < size; ++index) {
    for (int i = 0; i < n; ++i) {
      x(static_cast<Eigen::Index>(index), i) =
          CubeCoordinate(static_cast<std::uint32_t>(index), i);
    }
  }
  return x;
}

// Per-input gradient of h with respect to every trainable coordinate:
// one column per coordinate.
RowMatrix PerInputGradients(const MlpParams& p, const RowMatrix& x,
                            const TrainableGroups& groups) {
  const int r = p.width();
  const int n = p.dim();
  RowMatrix pre = x * p.W.transpose();
  pre.rowwise() += p.b.transpose();
  const long cols = groups.Count(r, n);
  RowMatrix out(x.rows(), cols);
  for (Eigen::Index row = 0; row < x.rows(); ++row) {
    long c = 0;
    if (groups.W) {
      for (int i = 0; i < r; ++i) {
        const double gate = pre(row, i) > 0.0 ? p.u(i) : 0.0;
        for (int j = 0; j < n; ++j) out(row, c++) = gate * x(row, j);
      }
    }
    if (groups.b) {
      for (int i = 0; i < r; ++i) out(row, c++) = pre(row, i) > 0.0 ? p.u(i) : 0.0;
    }
    if (groups.u) {
      for (int i = 0; i < r; ++i) out(row, c++) = std::max(pre(row, i), 0.0);
    }
    if (groups.beta) out(row, c++) = 1.0;
  }
  return out;
}

}  // namespace

double SqBudget::Ratio() const { return r * T / (tau * tau * delta); }

void SqBudget::Validate() const {
  Require(r > 0 && T > 0 && tau > 0 && delta > 0,
          "budget entries must all be positive");
}

bool budget_check(int n, int k, const SqBudget& budget) {
  budget.Validate();
  Require(k >= 0 && k <= n, "need 0 <= k <= n");
  if (std::isinf(budget.tau)) return true;
  return budget.Ratio() <= 0.5 * ToDouble(Rational(Binomial(n, k)));
}

ParsevalAudit parseval_audit(const BooleanFnTable& query, int k) {
  const int n = query.n();
  if (n > kMaxParsevalDimension) {
    Fail(ErrorCode::kScaleGuard, "Parseval audits need n <= 20");
  }
  Require(k >= 1 && k <= n, "need 1 <= k <= n");
  for (double v : query.values()) {
    Require(std::abs(v) <= 1.0, "query values must lie in [-1, 1]");
  }
  std::vector<double> spectrum = WalshHadamard(query);
  const double scale = std::ldexp(1.0, -n);
  ParsevalAudit audit;
  for (std::size_t mask = 0; mask < spectrum.size(); ++mask) {
    if (__builtin_popcountll(mask) != k) continue;
    const double c = spectrum[mask] * scale;
    audit.sum += c * c;
    ++audit.parities;
  }
  audit.mean = audit.sum / static_cast<double>(audit.parities);
  return audit;
}

long TrainableGroups::Count(int r, int n) const {
  return (W ? static_cast<long>(r) * n : 0) + (b ? r : 0) + (u ? r : 0) +
         (beta ? 1 : 0);
}

long StarTrajectory::ParameterCount() const {
  Require(!states.empty(), "empty trajectory");
  return trainable.Count(states.front().width(), n);
}

StarTrajectory star_trajectory(const StarModelConfig& config, long T) {
  Require(T >= 0, "trajectory length must be nonnegative");
  Require(config.eta >= 0.0 && config.weight_decay >= 0.0,
          "step size and weight decay must be nonnegative");
  if (config.n > kMaxParsevalDimension) {
    Fail(ErrorCode::kScaleGuard, "exact population trajectories need n <= 20");
  }
  StarTrajectory traj;
  traj.n = config.n;
  traj.trainable = config.trainable;
  traj.states.push_back(
      init_params(config.scheme, config.r, config.n, config.seed));
  const RowMatrix x = CubeInputs(config.n);

  TrainConfig step;
  const auto& t = config.trainable;
  step.eta = {t.W ? config.eta : 0.0, t.b ? config.eta : 0.0,
              t.u ? config.eta : 0.0, t.beta ? config.eta : 0.0};
  const double decay = config.eta * config.weight_decay;
  step.lambda = {t.W ? decay : 0.0, t.b ? decay : 0.0, t.u ? decay : 0.0,
                 t.beta ? decay : 0.0};
  step.decay_coupled = false;
  for (long i = 0; i < T; ++i) {
    const MlpParams& cur = traj.states.back();
    // Square loss against 0: dl/dh = h.
    const Eigen::VectorXd out = ForwardBatch(cur, x);
    traj.states.push_back(sgd_step(cur, Backprop(cur, x, out), step, i + 1));
  }
  return traj;
}

std::vector<std::vector<int>> AllSubsets(int n, int k) {
  Require(k >= 0 && k <= n, "need 0 <= k <= n");
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) cur[static_cast<std::size_t>(i)] = i;
  for (;;) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) break;
    ++cur[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) {
      cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
    }
  }
  return out;
}

HardParityResult find_hard_parity(const StarTrajectory& traj, int k,
                                  double tau) {
  const int n = traj.n;
  if (n > kMaxAuditDimension) {
    Fail(ErrorCode::kScaleGuard, "parity audits need n <= 14");
  }
  Require(k >= 1 && k <= n, "need 1 <= k <= n");
  Require(tau >= 0.0, "tolerance must be nonnegative");
  Require(traj.steps() >= 1, "the trajectory needs at least one step");

  const RowMatrix x = CubeInputs(n);
  const std::vector<std::vector<int>> subsets = AllSubsets(n, k);
  std::vector<std::uint64_t> masks;
  for (const auto& s : subsets) masks.push_back(IndexMask(s, n));

  // Raw correlations for every audited query, kept to normalize afterwards.
  HardParityResult result;
  std::vector<double> max_corr(subsets.size(), 0.0);
  std::vector<double> max_parseval_sum;
  double sup = 0.0;
  const double scale = std::ldexp(1.0, -n);
  std::vector<double> column(x.rows());
  for (long t = 0; t < traj.steps(); ++t) {
    const RowMatrix grads =
        PerInputGradients(traj.states[static_cast<std::size_t>(t)], x,
                          traj.trainable);
    for (Eigen::Index c = 0; c < grads.cols(); ++c) {
      for (Eigen::Index row = 0; row < grads.rows(); ++row) {
        column[static_cast<std::size_t>(row)] = grads(row, c);
        sup = std::max(sup, std::abs(grads(row, c)));
      }
      Fwht(column);
      double parseval = 0.0;
      for (std::size_t s = 0; s < subsets.size(); ++s) {
        const double corr = std::abs(column[masks[s]] * scale);
        max_corr[s] = std::max(max_corr[s], corr);
        parseval += corr * corr;
      }
      max_parseval_sum.push_back(parseval);
      ++result.queries;
    }
  }
  result.normalization = std::max(sup, 1.0);
  const double norm = result.normalization;
  const double parities = static_cast<double>(subsets.size());
  for (double sum : max_parseval_sum) {
    result.max_parseval_mean =
        std::max(result.max_parseval_mean, sum / (norm * norm) / parities);
  }
  long hidden = 0;
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    ParityAuditRow row;
    row.support = subsets[s];
    row.max_corr = max_corr[s] / norm;
    row.hidden = row.max_corr <= tau;
    if (row.hidden) {
      ++hidden;
      if (!result.hard_support) result.hard_support = row.support;
    }
    result.table.push_back(std::move(row));
  }
  result.hidden_fraction = static_cast<double>(hidden) / parities;
  return result;
}

}  // namespace sparity
