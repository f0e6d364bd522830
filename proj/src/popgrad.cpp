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

#include "sparity/popgrad.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sparity/error.hpp"

namespace sparity {
namespace {

Rational Abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

void CheckAgainst(const SparseNeuron& neuron, const ParityInstance& inst) {
  neuron.Validate();
  Require(neuron.n == inst.n(), "neuron and parity dimensions differ");
}

bool OversparseApplies(const SparseNeuron& neuron, const ParityInstance& inst) {
  return neuron.background == 0.0 && neuron.s() % 2 == 1 &&
         inst.k() % 2 == 0 && std::abs(neuron.bias) < 0.5;
}

bool UndersparseApplies(const SparseNeuron& neuron,
                        const ParityInstance& inst) {
  return neuron.background > 0.0 && neuron.s() % 2 == 0 &&
         inst.k() % 2 == 0 && neuron.s() < inst.k() &&
         std::abs(neuron.bias) < neuron.background;
}

}  // namespace

SparseNeuron SparseNeuron::OverSparse(int n, std::vector<int> active,
                                      double bias) {
  SparseNeuron neuron{n, std::move(active), 0.0, bias};
  std::sort(neuron.active.begin(), neuron.active.end());
  neuron.Validate();
  return neuron;
}

SparseNeuron SparseNeuron::UnderSparse(int n, std::vector<int> active,
                                       double background, double bias) {
  SparseNeuron neuron{n, std::move(active), background, bias};
  std::sort(neuron.active.begin(), neuron.active.end());
  neuron.Validate();
  return neuron;
}

bool SparseNeuron::IsActive(int i) const {
  return std::binary_search(active.begin(), active.end(), i);
}

std::vector<double> SparseNeuron::Weights() const {
  std::vector<double> w(static_cast<std::size_t>(n), background);
  for (int i : active) w[static_cast<std::size_t>(i)] = 1.0;
  return w;
}

void SparseNeuron::Validate() const {
  Require(n >= 1, "neuron dimension must be positive");
  Require(std::is_sorted(active.begin(), active.end()) &&
              std::adjacent_find(active.begin(), active.end()) == active.end(),
          "active set must be sorted and distinct");
  Require(active.empty() || (active.front() >= 0 && active.back() < n),
          "active index out of range");
  if (background != 0.0) {
    Require(s() < n && background > 0.0 && background < 1.0 / (n - s()),
            "background weight must satisfy 0 < eps < 1/(n - s)");
  }
  Require(std::isfinite(bias), "bias must be finite");
}

GoodNeuronProbability good_neuron_probability(int n, int k, int s) {
  Require(n >= 1 && k >= 1 && s >= 0 && s <= n && k <= n,
          "need 1 <= k <= n and 0 <= s <= n");
  GoodNeuronProbability out;
  if (s >= k) {
    out.exact = Rational(Binomial(n - k, s - k), Binomial(n, s));
  }
  out.lower_bound = Rational(BigInt(s), BigInt(2 * n));
  out.lower_bound = Rational(pow(numerator(out.lower_bound), k),
                             pow(denominator(out.lower_bound), k));
  out.exact_value = ToDouble(out.exact);
  out.lower_bound_value = ToDouble(out.lower_bound);
  out.bound_holds = out.exact >= out.lower_bound;
  return out;
}

bool GapConstants::RatioWithinBound() const {
  return Abs(irrelevant_exact) * s <= Abs(relevant_exact) * (4 * k);
}

GapConstants gap_constants(int k, int s) {
  Require(k >= 2 && k % 2 == 0, "gap constants need even k >= 2");
  Require(s % 2 == 1, "gap constants need odd s");
  Require(k < s, "gap constants need k < s");
  GapConstants g;
  g.k = k;
  g.s = s;
  g.relevant_exact = maj_fourier_coeff(s, k - 1).exact / 2;
  g.irrelevant_exact = maj_fourier_coeff(s, k + 1).exact / 2;
  g.relevant = ToDouble(g.relevant_exact);
  g.irrelevant = ToDouble(g.irrelevant_exact);
  const int v = k - 1;
  const double rho = 2.0 / (std::numbers::pi * v * std::ldexp(1.0, v)) *
                     ToDouble(Rational(Binomial(v - 1, (v - 1) / 2)));
  g.kappa_lower = 0.5 * std::sqrt(rho) /
                  std::sqrt(ToDouble(Rational(Binomial(s, k - 1))));
  g.ratio_bound = 4.0 * k / s;
  return g;
}

std::vector<Rational> PopGradOversparseExact(const SparseNeuron& neuron,
                                             const ParityInstance& inst) {
  CheckAgainst(neuron, inst);
  Require(neuron.background == 0.0, "over-sparse neuron needs background 0");
  Require(neuron.s() % 2 == 1, "over-sparse gradient needs odd s");
  Require(inst.k() % 2 == 0, "over-sparse gradient needs even k");
  Require(std::abs(neuron.bias) < 0.5, "over-sparse gradient needs |b| < 1/2");

  const int s = neuron.s();
  const int k = inst.k();
  std::vector<Rational> grad(static_cast<std::size_t>(inst.n()));
  std::vector<int> missing;
  for (int i : inst.support()) {
    if (!neuron.IsActive(i)) missing.push_back(i);
  }
  if (missing.size() >= 2) return grad;
  if (missing.size() == 1) {
    grad[static_cast<std::size_t>(missing[0])] =
        MajorityCoefficient(s, k - 1) / 2;
    return grad;
  }
  const Rational on = MajorityCoefficient(s, k - 1) / 2;
  const Rational off = MajorityCoefficient(s, k + 1) / 2;
  for (int i : neuron.active) {
    grad[static_cast<std::size_t>(i)] = inst.Contains(i) ? on : off;
  }
  return grad;
}

std::vector<double> pop_grad_oversparse(const SparseNeuron& neuron,
                                        const ParityInstance& inst) {
  const auto exact = PopGradOversparseExact(neuron, inst);
  std::vector<double> out(exact.size());
  std::transform(exact.begin(), exact.end(), out.begin(),
                 [](const Rational& q) { return ToDouble(q); });
  return out;
}

std::vector<Rational> PopGradUndersparseExact(const SparseNeuron& neuron,
                                              const ParityInstance& inst) {
  CheckAgainst(neuron, inst);
  const int n = inst.n();
  const int s = neuron.s();
  const int k = inst.k();
  Require(neuron.background > 0.0,
          "under-sparse neuron needs a positive background weight");
  Require(s < k, "under-sparse gradient needs s < k");
  Require(s % 2 == 0 && k % 2 == 0, "under-sparse gradient needs even s, k");
  Require(std::abs(neuron.bias) < neuron.background,
          "under-sparse gradient needs |b| < background");

  const MajorityTie tie =
      neuron.bias > 0.0 ? MajorityTie::kPositive : MajorityTie::kNegative;
  std::vector<Rational> grad(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // chi_S * x_i = chi_A with A = S xor {i}; split A by the active set.
    int in_active = 0;
    int in_rest = 0;
    for (int j : inst.support()) {
      if (j == i) continue;
      (neuron.IsActive(j) ? in_active : in_rest)++;
    }
    if (!inst.Contains(i)) (neuron.IsActive(i) ? in_active : in_rest)++;
    grad[static_cast<std::size_t>(i)] =
        HalfCoefficient(s, in_active) *
        MajorityCoefficient(n - s, in_rest, tie) / 2;
  }
  return grad;
}

std::vector<double> pop_grad_undersparse(const SparseNeuron& neuron,
                                         const ParityInstance& inst) {
  const auto exact = PopGradUndersparseExact(neuron, inst);
  std::vector<double> out(exact.size());
  std::transform(exact.begin(), exact.end(), out.begin(),
                 [](const Rational& q) { return ToDouble(q); });
  return out;
}

GapRatioReport undersparse_gap_ratio(int n, int k, int s) {
  Require(k - s - 1 != 0, "k - s - 1 = 0 gives no separation");
  Require(s >= 0 && s < k && k < n, "gap ratio needs 0 <= s < k < n");
  Require((k - s) % 2 == 0, "gap ratio needs k - s even");
  GapRatioReport report;
  report.n = n;
  report.k = k;
  report.s = s;
  const Rational on = MajorityCoefficient(n - s, k - s - 1);
  const Rational off = MajorityCoefficient(n - s, k - s + 1);
  Require(off != 0, "gradient off the support vanishes");
  report.exact = Abs(on) / Abs(off);
  report.value = ToDouble(report.exact);
  report.stated_form = static_cast<double>(n - s) / (k - s - 1);
  report.derived_form = static_cast<double>(n - k) / (k - s - 1);
  report.matches_stated =
      report.exact == Rational(BigInt(n - s), BigInt(k - s - 1));
  report.matches_derived =
      report.exact == Rational(BigInt(n - k), BigInt(k - s - 1));
  return report;
}

std::vector<double> brute_force_neuron_grad(const SparseNeuron& neuron,
                                            const ParityInstance& inst) {
  CheckAgainst(neuron, inst);
  const int n = inst.n();
  if (n > kMaxTableDimension) {
    Fail(ErrorCode::kScaleGuard, "brute-force gradients need n <= 24");
  }
  std::uint32_t active_mask = 0;
  for (int i : neuron.active) active_mask |= 1u << i;
  const std::uint64_t parity_mask = inst.Mask();
  const std::uint32_t size = 1u << n;
  const int s = neuron.s();
  const int rest = n - s;
  // Integer sums keep the accumulation exact; only the final division
  // rounds.
  std::vector<std::int64_t> totals(static_cast<std::size_t>(n), 0);
  for (std::uint32_t index = 0; index < size; ++index) {
    const int active_plus = __builtin_popcount(index & active_mask);
    const int rest_plus = __builtin_popcount(index & ~active_mask & (size - 1));
    const int active_sum = 2 * active_plus - s;
    const int rest_sum = 2 * rest_plus - rest;
    const double pre = active_sum + neuron.background * rest_sum + neuron.bias;
    if (!(pre > 0.0)) continue;
    const int label = CharacterAt(index, parity_mask);
    for (int i = 0; i < n; ++i) {
      totals[static_cast<std::size_t>(i)] += label * CubeCoordinate(index, i);
    }
  }
  std::vector<double> grad(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    grad[static_cast<std::size_t>(i)] = std::ldexp(
        static_cast<double>(totals[static_cast<std::size_t>(i)]), -n);
  }
  return grad;
}

std::vector<double> PopulationNeuronGrad(const SparseNeuron& neuron,
                                         const ParityInstance& inst) {
  CheckAgainst(neuron, inst);
  if (OversparseApplies(neuron, inst)) return pop_grad_oversparse(neuron, inst);
  if (UndersparseApplies(neuron, inst)) {
    return pop_grad_undersparse(neuron, inst);
  }
  return brute_force_neuron_grad(neuron, inst);
}

std::vector<double> EmpiricalNeuronGrad(const SparseNeuron& neuron,
                                        const Dataset& data) {
  neuron.Validate();
  Require(data.size() >= 1, "empirical gradient needs m >= 1");
  Require(data.dim() == neuron.n, "sample dimension does not match neuron");
  const std::vector<double> w = neuron.Weights();
  const Eigen::Map<const Eigen::VectorXd> weights(
      w.data(), static_cast<Eigen::Index>(w.size()));
  const Eigen::VectorXd pre = (data.x * weights).array() + neuron.bias;
  const Eigen::VectorXd coef =
      (pre.array() > 0.0).cast<double>() * data.y.array();
  const Eigen::VectorXd grad =
      data.x.transpose() * coef / static_cast<double>(data.size());
  return {grad.data(), grad.data() + grad.size()};
}

double EmpiricalGradGapOn(const SparseNeuron& neuron,
                          const ParityInstance& inst, const Dataset& data) {
  const auto population = PopulationNeuronGrad(neuron, inst);
  const auto empirical = EmpiricalNeuronGrad(neuron, data);
  double gap = 0.0;
  for (std::size_t i = 0; i < population.size(); ++i) {
    gap = std::max(gap, std::abs(population[i] - empirical[i]));
  }
  return gap;
}

double empirical_grad_gap(std::span<const SparseNeuron> neurons,
                          const ParityInstance& inst, std::size_t m,
                          std::uint64_t seed) {
  Require(m >= 1, "empirical gradient gap needs m >= 1");
  const Dataset data = generate_dataset(inst, m, seed);
  double gap = 0.0;
  for (const SparseNeuron& neuron : neurons) {
    gap = std::max(gap, EmpiricalGradGapOn(neuron, inst, data));
  }
  return gap;
}

}  // namespace sparity
