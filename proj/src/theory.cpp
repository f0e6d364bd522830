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

#include "sparity/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sparity/error.hpp"
#include "sparity/fourier.hpp"
#include "sparity/popgrad.hpp"

namespace sparity {
namespace {

Rational Abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

// Exact value of a finite double.
Rational FromDouble(double v) {
  Require(std::isfinite(v), "cannot convert a non-finite value");
  if (v == 0.0) return Rational(0);
  int exp = 0;
  const double mant = std::frexp(v, &exp);
  const auto scaled = static_cast<long long>(std::ldexp(mant, 53));
  Rational q{BigInt(scaled)};
  const int shift = exp - 53;
  if (shift >= 0) return q * Rational(Pow2(static_cast<unsigned>(shift)));
  return q / Rational(Pow2(static_cast<unsigned>(-shift)));
}

// Gaussian elimination over the rationals; throws on a singular matrix.
std::vector<Rational> SolveExact(std::vector<std::vector<Rational>> a,
                                 std::vector<Rational> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == 0) ++pivot;
    if (pivot == n) Fail(ErrorCode::kInternal, "feature system is singular");
    std::swap(a[pivot], a[col]);
    std::swap(rhs[pivot], rhs[col]);
    for (std::size_t row = 0; row < n; ++row) {
      if (row == col || a[row][col] == 0) continue;
      const Rational factor = a[row][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[row][c] -= factor * a[col][c];
      rhs[row] -= factor * rhs[col];
    }
  }
  std::vector<Rational> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = rhs[i] / a[i][i];
  return x;
}

// Exact grid value (16(-k + 2j) + 1) / (32k).
Rational OverSparseGridExact(int k, int j) {
  return Rational(BigInt(16 * (-k + 2 * j) + 1), BigInt(32 * k));
}

std::vector<int> ActiveSet(const MlpParams& p, int neuron) {
  std::vector<int> active;
  for (int j = 0; j < p.dim(); ++j) {
    if (p.W(neuron, j) == 1.0) active.push_back(j);
  }
  return active;
}

bool Contains(const std::vector<int>& sorted, int v) {
  return std::binary_search(sorted.begin(), sorted.end(), v);
}

bool IsFullCube(const Dataset& data, int n) {
  if (n > kMaxTableDimension) return false;
  if (data.size() != (std::size_t{1} << n)) return false;
  std::vector<bool> seen(data.size(), false);
  for (Eigen::Index row = 0; row < data.x.rows(); ++row) {
    std::size_t index = 0;
    for (int i = 0; i < n; ++i) {
      const double v = data.x(row, i);
      if (v != 1.0 && v != -1.0) return false;
      if (v == 1.0) index |= std::size_t{1} << i;
    }
    if (seen[index]) return false;
    seen[index] = true;
  }
  return true;
}

}  // namespace

RowMatrix FeatureMap::Evaluate(const RowMatrix& x) const {
  Require(x.cols() == W.cols(), "feature input has the wrong dimension");
  RowMatrix out(x.rows(), dim());
  RowMatrix hidden = x * W.transpose();
  hidden.rowwise() += b.transpose();
  out.leftCols(width()) = hidden.cwiseMax(0.0);
  out.col(width()).setOnes();
  return out;
}

Eigen::VectorXd FeatureModelOutput(const FeatureMap& phi,
                                   const Eigen::VectorXd& coef,
                                   const RowMatrix& x) {
  Require(coef.size() == phi.dim(), "coefficient vector has the wrong size");
  return phi.Evaluate(x) * coef;
}

double FeatureModelError(const FeatureMap& phi, const Eigen::VectorXd& coef,
                         const Dataset& data) {
  Require(data.size() > 0, "cannot evaluate on an empty dataset");
  const Eigen::VectorXd out = FeatureModelOutput(phi, coef, data.x);
  long mistakes = 0;
  for (Eigen::Index i = 0; i < out.size(); ++i) {
    if ((out(i) > 0.0 ? 1.0 : -1.0) != data.y(i)) ++mistakes;
  }
  return static_cast<double>(mistakes) / static_cast<double>(out.size());
}

int GoodNeuronLayout::good_count() const {
  int count = 0;
  for (const auto& list : plus) count += static_cast<int>(list.size());
  for (const auto& list : minus) count += static_cast<int>(list.size());
  return count;
}

GoodNeuronLayout OverSparseLayout(const MlpParams& init,
                                  const ParityInstance& inst) {
  Require(init.dim() == inst.n(), "network dimension does not match parity");
  const int k = inst.k();
  const std::vector<double> grid = OverSparseBiasGrid(k);
  GoodNeuronLayout layout;
  layout.width = init.width();
  layout.k = k;
  layout.plus.resize(grid.size());
  layout.minus.resize(grid.size());
  for (int i = 0; i < init.width(); ++i) {
    const auto slot_it = std::find(grid.begin(), grid.end(), init.b(i));
    Require(slot_it != grid.end(), "bias is not on the over-sparse grid");
    const auto slot = static_cast<std::size_t>(slot_it - grid.begin());
    const std::vector<int> active = ActiveSet(init, i);
    const int s = static_cast<int>(active.size());
    bool good = s % 2 == 1 && s > k && init.u(i) != 0.0;
    for (int j : inst.support()) good = good && Contains(active, j);
    if (!good) {
      layout.bad.push_back(i);
      continue;
    }
    const bool c_positive = MajorityCoefficient(s, k - 1) > 0;
    const bool plus = (init.u(i) > 0.0) == c_positive;
    (plus ? layout.plus : layout.minus)[slot].push_back(i);
  }
  return layout;
}

Phase1Result oversparse_phase1(const MlpParams& params, const Dataset& data,
                               const ParityInstance& inst, int s,
                               bool exact_on_cube) {
  Require(data.size() > 0, "phase 1 needs a nonempty dataset");
  Require(params.dim() == inst.n(), "network dimension does not match parity");
  const int k = inst.k();
  const GapConstants gap = gap_constants(k, s);
  const Rational eta_exact = Rational(1) / (2 * k * Abs(gap.relevant_exact));

  Phase1Result result;
  result.eta = ToDouble(eta_exact);
  const MlpParams grads = loss_and_grad(params, data, Loss::kHinge).grad;
  TrainConfig step;
  step.eta = {result.eta, 0.0, 0.0, 0.0};
  step.lambda = {1.0, 0.0, 0.0, 0.0};
  step.decay_coupled = false;
  step.gamma = 0.0;
  result.params = sgd_step(params, grads, step, 1);
  result.phi = {FeatureMap::Kind::kPostStep, result.params.W,
                result.params.b};

  if (exact_on_cube) {
    Require(IsFullCube(data, inst.n()),
            "the exact phase-1 path needs the full cube as its dataset");
    const GoodNeuronLayout layout = OverSparseLayout(params, inst);
    const Eigen::VectorXd yhat = ForwardBatch(params, data.x);
    RowMatrix pre = data.x * params.W.transpose();
    pre.rowwise() += params.b.transpose();
    const Rational m(BigInt(data.size()));
    auto exact_row = [&](int neuron) {
      std::vector<Rational> row;
      for (int j : inst.support()) {
        Rational total = 0;
        for (Eigen::Index x = 0; x < data.x.rows(); ++x) {
          if (!(pre(x, neuron) > 0.0)) continue;
          total += FromDouble(LossDerivative(Loss::kHinge, yhat(x), data.y(x)) *
                              data.x(x, j));
        }
        const Rational grad = total * FromDouble(params.u(neuron)) / m;
        row.push_back(-eta_exact * grad);
      }
      return row;
    };
    for (std::size_t slot = 0; slot < layout.plus.size(); ++slot) {
      for (int i : layout.plus[slot]) result.exact_relevant.push_back(exact_row(i));
      for (int i : layout.minus[slot]) result.exact_relevant.push_back(exact_row(i));
    }
  }
  return result;
}

FeatureMap ideal_feature_map(const ParityInstance& inst,
                             const GoodNeuronLayout& layout,
                             const MlpParams& init) {
  Require(init.width() == layout.width, "layout and network widths differ");
  const double weight = 1.0 / (2.0 * inst.k());
  FeatureMap phi;
  phi.kind = FeatureMap::Kind::kIdeal;
  phi.W = RowMatrix::Zero(init.width(), init.dim());
  phi.b = init.b;
  for (std::size_t slot = 0; slot < layout.plus.size(); ++slot) {
    for (int i : layout.plus[slot]) {
      for (int j : inst.support()) phi.W(i, j) = weight;
    }
    for (int i : layout.minus[slot]) {
      for (int j : inst.support()) phi.W(i, j) = -weight;
    }
  }
  return phi;
}

Eigen::VectorXd IdealSecondLayer::Coefficients() const {
  Eigen::VectorXd coef(u_star.size() + 1);
  coef.head(u_star.size()) = u_star;
  coef(u_star.size()) = beta_star;
  return coef;
}

IdealSecondLayer construct_ideal_second_layer(int k,
                                              const GoodNeuronLayout& layout) {
  Require(k >= 2 && k % 2 == 0, "ideal second layer needs even k >= 2");
  const auto slots = static_cast<std::size_t>(k / 2);
  Require(layout.plus.size() == slots && layout.minus.size() == slots,
          "layout does not match the bias grid for this k");
  for (std::size_t j = 0; j < slots; ++j) {
    Require(!layout.plus[j].empty() && !layout.minus[j].empty(),
            "every bias slot needs a good neuron of each orientation");
  }
  const std::size_t unknowns = 1 + 2 * slots;
  std::vector<std::vector<Rational>> a;
  std::vector<Rational> rhs;
  for (int t = -k; t <= k; t += 2) {
    std::vector<Rational> row(unknowns);
    row[0] = 1;
    const Rational scaled(BigInt(t), BigInt(2 * k));
    for (std::size_t j = 0; j < slots; ++j) {
      const Rational bias = OverSparseGridExact(k, static_cast<int>(j));
      row[1 + 2 * j] = std::max(Rational(scaled + bias), Rational(0));
      row[2 + 2 * j] = std::max(Rational(-scaled + bias), Rational(0));
    }
    a.push_back(std::move(row));
    rhs.push_back(((k - t) / 2) % 2 == 0 ? 1 : -1);
  }

  IdealSecondLayer out;
  out.nu_exact = SolveExact(std::move(a), std::move(rhs));
  double norm_sq = 0.0;
  for (const Rational& q : out.nu_exact) {
    out.nu.push_back(ToDouble(q));
    norm_sq += out.nu.back() * out.nu.back();
  }
  out.norm_bound = std::sqrt(norm_sq);
  out.beta_star = out.nu[0];
  out.u_star = Eigen::VectorXd::Zero(layout.width);
  for (std::size_t j = 0; j < slots; ++j) {
    for (int i : layout.plus[j]) {
      out.u_star(i) = out.nu[1 + 2 * j] / static_cast<double>(layout.plus[j].size());
    }
    for (int i : layout.minus[j]) {
      out.u_star(i) = out.nu[2 + 2 * j] / static_cast<double>(layout.minus[j].size());
    }
  }
  return out;
}

Phase2Config Phase2Config::ForAccuracy(double eps, double norm_bound,
                                       long steps) {
  Require(eps > 0.0 && norm_bound > 0.0, "accuracy and norm bound must be positive");
  Phase2Config config;
  config.lambda = eps / (norm_bound * norm_bound);
  config.steps = steps;
  return config;
}

Phase2Result oversparse_phase2(const FeatureMap& phi, const Dataset& data,
                               const Phase2Config& config,
                               std::optional<Eigen::VectorXd> start) {
  Require(data.size() > 0, "phase 2 needs a nonempty dataset");
  Require(config.steps >= 0, "phase 2 step count must be nonnegative");
  Require(config.lambda >= 0.0, "phase 2 regularization must be nonnegative");
  Require(config.fixed_step.has_value() || config.lambda > 0.0,
          "the 1/(lambda t) schedule needs lambda > 0");
  const RowMatrix features = phi.Evaluate(data.x);
  const double m = static_cast<double>(data.size());

  Phase2Result result;
  result.coef = start ? *start : Eigen::VectorXd::Zero(phi.dim());
  Require(result.coef.size() == phi.dim(), "start vector has the wrong size");

  auto objective = [&](const Eigen::VectorXd& coef, Eigen::VectorXd* active) {
    const Eigen::VectorXd margin = (features * coef).cwiseProduct(data.y);
    double hinge = 0.0;
    if (active) active->resize(margin.size());
    for (Eigen::Index i = 0; i < margin.size(); ++i) {
      hinge += std::max(1.0 - margin(i), 0.0);
      if (active) (*active)(i) = margin(i) < 1.0 ? data.y(i) : 0.0;
    }
    return hinge / m + 0.5 * config.lambda * coef.squaredNorm();
  };

  Eigen::VectorXd active;
  for (long t = 1; t <= config.steps; ++t) {
    const double value = objective(result.coef, &active);
    result.objective_trace.push_back(value);
    if (!std::isfinite(value)) {
      result.diverged = true;
      break;
    }
    const Eigen::VectorXd grad =
        -(features.transpose() * active) / m + config.lambda * result.coef;
    const double step = config.fixed_step
                            ? *config.fixed_step
                            : 1.0 / (config.lambda * static_cast<double>(t));
    result.coef -= step * grad;
  }
  result.final_objective = objective(result.coef, nullptr);
  result.objective_trace.push_back(result.final_objective);
  if (!std::isfinite(result.final_objective)) result.diverged = true;
  return result;
}

int UnderSparseWidth(int n, int k, int s) {
  Require(n >= 1 && k >= 1 && s >= 0, "width needs positive n, k");
  Rational base = Rational(BigInt(k) * k);
  for (int i = 0; i < s; ++i) base *= Rational(BigInt(n), BigInt(k));
  BigInt ceil = numerator(base) / denominator(base);
  if (Rational(ceil) < base) ceil += 1;
  return 4 * ceil.convert_to<int>();
}

UnderSparseResult undersparse_one_step(const MlpParams& params,
                                       const Dataset& data,
                                       const ParityInstance& inst, int s,
                                       const UnderSparseStepConfig& config) {
  const int n = inst.n();
  const int k = inst.k();
  Require(s < k, "under-sparse step needs s < k");
  Require(s >= 0 && s % 2 == 0 && k % 2 == 0,
          "under-sparse step needs even s and k");
  Require(data.size() > 0, "under-sparse step needs a nonempty dataset");
  Require(params.dim() == n, "network dimension does not match parity");
  const double eps = config.eps_init;
  Require(eps > 0.0 && eps < 1.0 / (n - s),
          "background weight must satisfy 0 < eps < 1/(n - s)");

  UnderSparseResult result;
  const Rational half = HalfCoefficient(s, s) / 2;
  result.on_support_grad =
      ToDouble(Abs(half * MajorityCoefficient(n - s, k - s - 1)));
  result.off_support_grad =
      ToDouble(Abs(half * MajorityCoefficient(n - s, k - s + 1)));

  const MlpParams grads = loss_and_grad(params, data, Loss::kHinge).grad;

  // Good neurons: s-hot rows whose active set lies inside S.
  SubnetworkReport& report = result.report;
  std::vector<std::vector<int>> actives(static_cast<std::size_t>(params.width()));
  for (int i = 0; i < params.width(); ++i) {
    actives[static_cast<std::size_t>(i)] = ActiveSet(params, i);
    const auto& active = actives[static_cast<std::size_t>(i)];
    bool good = static_cast<int>(active.size()) == s;
    for (int j : active) good = good && inst.Contains(j);
    if (good) report.good_neurons.push_back(i);
  }

  if (config.theory_mode) {
    result.eta = eps / (2.0 * k * result.on_support_grad);
    result.lambda = 1.0 - eps / (2.0 * k);
    double min_on = std::numeric_limits<double>::infinity();
    double max_off = 0.0;
    for (int i : report.good_neurons) {
      const auto& active = actives[static_cast<std::size_t>(i)];
      for (int j = 0; j < n; ++j) {
        const double g = std::abs(grads.W(i, j));
        if (inst.Contains(j) && !Contains(active, j)) {
          min_on = std::min(min_on, g);
        } else if (!inst.Contains(j)) {
          max_off = std::max(max_off, g);
        }
      }
    }
    if (report.good_neurons.empty()) {
      min_on = result.on_support_grad;
      max_off = result.off_support_grad;
    }
    report.infeasible_gamma = !(max_off < min_on);
    result.gamma = report.infeasible_gamma
                       ? 0.5 * (result.on_support_grad + result.off_support_grad)
                       : 0.5 * (min_on + max_off);
  } else {
    Require(config.eta >= 0.0 && config.gamma >= 0.0 && config.lambda >= 0.0,
            "step parameters must be nonnegative");
    result.eta = config.eta;
    result.gamma = config.gamma;
    result.lambda = config.lambda;
  }

  MlpParams trimmed = grads;
  Truncate(trimmed, result.gamma);
  result.params = params;
  result.params.W = (1.0 - result.lambda) * params.W - result.eta * trimmed.W;

  // Dichotomy check on the good neurons.
  const double target = eps / (2.0 * k);
  const std::vector<double> grid = UnderSparseBiasGrid(k, eps);
  report.biases_required = static_cast<int>(grid.size());
  std::vector<int> representative(grid.size(), -1);
  for (int i : report.good_neurons) {
    double dev = 0.0;
    double off = 0.0;
    for (int j = 0; j < n; ++j) {
      const double w = result.params.W(i, j);
      if (inst.Contains(j)) {
        dev = std::max(dev, std::abs(w - target));
      } else {
        off = std::max(off, std::abs(w));
      }
    }
    if (dev > eps * eps * k || off > 2.0 * eps * eps) continue;
    report.passing.push_back(i);
    report.max_support_deviation = std::max(report.max_support_deviation, dev);
    report.max_off_support = std::max(report.max_off_support, off);
    const auto slot = std::find(grid.begin(), grid.end(), params.b(i));
    if (slot != grid.end()) {
      auto& rep = representative[static_cast<std::size_t>(slot - grid.begin())];
      if (rep < 0) rep = i;
    }
  }
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (representative[j] >= 0) report.biases_covered.push_back(grid[j]);
  }
  const bool covered = report.biases_covered.size() == grid.size();

  report.pass = covered && !report.infeasible_gamma;
  return result;
}

}  // namespace sparity
