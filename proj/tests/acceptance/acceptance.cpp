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


// Acceptance checks. Each criterion prints one PASS or FAIL line; the exit
// status is nonzero when any selected criterion fails.
//
//   acceptance                       run every criterion
//   acceptance --criterion <name>    run one
//   acceptance --list

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "oracles.hpp"
#include "sparity/dataset.hpp"
#include "sparity/error.hpp"
#include "sparity/fourier.hpp"
#include "sparity/harness.hpp"
#include "sparity/mlp.hpp"
#include "sparity/popgrad.hpp"
#include "sparity/sq.hpp"
#include "sparity/theory.hpp"
#include "sparity/train.hpp"

namespace sparity {
namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

double MaxAbsDiff(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::abs(a[i] - b[i]));
  }
  return worst;
}

std::vector<int> FirstIndices(int d) {
  std::vector<int> set(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) set[static_cast<std::size_t>(i)] = i;
  return set;
}

Outcome FourierClosedForm() {
  const auto start = Clock::now();
  double worst = 0.0;
  long orders = 0;
  std::mt19937_64 gen(1);
  for (int n = 1; n <= 13; n += 2) {
    const BooleanFnTable table = MajorityTable(n);
    for (int d = 1; d <= n; d += 2) {
      const double closed = maj_fourier_coeff(n, d).value;
      worst = std::max(worst, std::abs(closed - brute_force_fourier(table, FirstIndices(d))));
      worst = std::max(worst, std::abs(closed - brute_force_fourier(table, oracle::RandomSubset(gen, n, d))));
      ++orders;
    }
  }
  for (int n = 2; n <= 12; n += 2) {
    const BooleanFnTable table = HalfTable(n);
    for (int d = 0; d <= n; d += 2) {
      const double closed = half_fourier_coeff(n, d).value;
      worst = std::max(worst, std::abs(closed - brute_force_fourier(table, FirstIndices(d))));
      worst = std::max(worst, std::abs(closed - brute_force_fourier(table, oracle::RandomSubset(gen, n, d))));
      ++orders;
    }
  }
  bool identity = true;
  for (int m = 1; m <= 30; ++m) {
    for (int j = 0; j <= m; ++j) {
      identity = identity && half_fourier_coeff(2 * m, 2 * j).exact ==
                                 maj_fourier_coeff(2 * m + 1, 2 * j + 1).exact;
    }
  }
  const double secs = Seconds(start);
  return {worst <= 1e-12 && identity && secs < 10.0,
          Format("%ld orders, max diff %.3g, identity %s, %.2fs", orders, worst,
                 identity ? "exact" : "broken", secs)};
}

Outcome PopulationGradient() {
  const auto start = Clock::now();
  std::mt19937_64 gen(7);
  double worst = 0.0;
  int configs = 0;
  int zero_checked = 0;
  bool zero_law = true;
  const double backgrounds[] = {1.0 / 16, 1.0 / 32, 1.0 / 64};
  while (configs < 1000) {
    const int k = configs % 2 ? 2 : 4;
    const int n = oracle::Pick(gen, k + 1, 12);
    const ParityInstance inst(n, oracle::RandomSubset(gen, n, k));
    if (configs % 2 == 0 || k == 2) {
      int s = oracle::Pick(gen, 1, n);
      if (s % 2 == 0) s -= 1;
      const double bias = std::uniform_real_distribution<double>(-0.49, 0.49)(gen);
      const SparseNeuron neuron =
          SparseNeuron::OverSparse(n, oracle::RandomSubset(gen, n, s), bias);
      const std::vector<double> analytic = pop_grad_oversparse(neuron, inst);
      worst = std::max(worst, MaxAbsDiff(analytic, brute_force_neuron_grad(neuron, inst)));
      int missing = 0;
      for (int i : inst.support()) missing += !neuron.IsActive(i);
      if (missing >= 2) {
        ++zero_checked;
        const std::vector<double> zeros(static_cast<std::size_t>(n), 0.0);
        zero_law = zero_law && analytic == zeros &&
                   brute_force_neuron_grad(neuron, inst) == zeros;
        for (const Rational& g : PopGradOversparseExact(neuron, inst)) {
          zero_law = zero_law && g == 0;
        }
      }
    } else {
      const int s = 2 * oracle::Pick(gen, 0, k / 2 - 1);
      const double eps = backgrounds[oracle::Pick(gen, 0, 2)];
      const std::vector<double> grid = UnderSparseBiasGrid(k, eps);
      const double bias = grid[static_cast<std::size_t>(oracle::Pick(gen, 0, k - 1))];
      const SparseNeuron neuron =
          SparseNeuron::UnderSparse(n, oracle::RandomSubset(gen, n, s), eps, bias);
      worst = std::max(worst, MaxAbsDiff(pop_grad_undersparse(neuron, inst),
                                         brute_force_neuron_grad(neuron, inst)));
    }
    ++configs;
  }
  const double secs = Seconds(start);
  return {worst <= 1e-12 && zero_law && zero_checked > 0 && secs < 60.0,
          Format("%d configs, max diff %.3g, zero law %s on %d neurons, %.2fs",
                 configs, worst, zero_law ? "exact" : "broken", zero_checked,
                 secs)};
}

Outcome GoodNeuron() {
  using boost::multiprecision::cpp_rational;
  const auto start = Clock::now();
  long triples = 0;
  int mismatches = 0;
  int below = 0;
  int below_with_4k_lt_s = 0;
  std::string first;
  for (int n = 1; n <= 60; ++n) {
    for (int s = 1; s <= n; ++s) {
      for (int k = 1; k <= s; ++k) {
        // Product form of C(n-k, s-k) / C(n, s).
        cpp_rational exact = 1;
        for (int j = 0; j < k; ++j) exact *= cpp_rational(s - j, n - j);
        cpp_rational bound = 1;
        for (int j = 0; j < k; ++j) bound *= cpp_rational(s, 2 * n);
        const GoodNeuronProbability got = good_neuron_probability(n, k, s);
        if (got.exact != exact || got.lower_bound != bound ||
            got.bound_holds != (exact >= bound)) {
          ++mismatches;
        }
        if (exact < bound) {
          ++below;
          below_with_4k_lt_s += 4 * k < s;
          if (first.empty()) {
            first = Format(" (first: n=%d s=%d k=%d, %.4g < %.4g)", n, s, k,
                           got.exact_value, got.lower_bound_value);
          }
        }
        ++triples;
      }
    }
  }
  return {mismatches == 0 && below == 0,
          Format("%ld (n, k, s) triples, %d library mismatches, bound fails on "
                 "%d triples, %d of them with 4k < s; %.2fs",
                 triples, mismatches, below, below_with_4k_lt_s,
                 Seconds(start)) +
              first};
}

double KinkDistance(const MlpParams& p, const Dataset& batch) {
  RowMatrix pre = batch.x * p.W.transpose();
  pre.rowwise() += p.b.transpose();
  const Eigen::VectorXd out = ForwardBatch(p, batch.x);
  const double margin = (1.0 - batch.y.cwiseProduct(out).array()).abs().minCoeff();
  return std::min(pre.cwiseAbs().minCoeff(), margin);
}

Outcome FiniteDifferences() {
  std::mt19937_64 gen(2026);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double h = 1e-5;
  int networks = 0;
  int skipped = 0;
  double worst = 0.0;
  while (networks < 200) {
    const int n = 1 + static_cast<int>(gen() % 10);
    const int r = 1 + static_cast<int>(gen() % 10);
    const int rows = 1 + static_cast<int>(gen() % 8);
    MlpParams p = MlpParams::Zeros(r, n);
    for (Eigen::Index i = 0; i < p.W.size(); ++i) p.W.data()[i] = unit(gen);
    for (int i = 0; i < r; ++i) {
      p.b(i) = unit(gen);
      p.u(i) = unit(gen);
    }
    p.beta = unit(gen);
    Dataset batch;
    batch.x.resize(rows, n);
    batch.y.resize(rows);
    for (int row = 0; row < rows; ++row) {
      for (int j = 0; j < n; ++j) batch.x(row, j) = (gen() & 1) ? 1.0 : -1.0;
      batch.y(row) = (gen() & 1) ? 1.0 : -1.0;
    }
    if (KinkDistance(p, batch) < 1e-3) {
      ++skipped;
      continue;
    }
    const Loss loss = networks % 2 ? Loss::kHinge : Loss::kSquare;
    const MlpParams grad = loss_and_grad(p, batch, loss).grad;
    std::vector<double*> coords;
    std::vector<double> analytic;
    for (Eigen::Index i = 0; i < p.W.size(); ++i) {
      coords.push_back(p.W.data() + i);
      analytic.push_back(grad.W.data()[i]);
    }
    for (int i = 0; i < r; ++i) {
      coords.push_back(p.b.data() + i);
      analytic.push_back(grad.b(i));
      coords.push_back(p.u.data() + i);
      analytic.push_back(grad.u(i));
    }
    coords.push_back(&p.beta);
    analytic.push_back(grad.beta);
    for (std::size_t c = 0; c < coords.size(); ++c) {
      const double saved = *coords[c];
      *coords[c] = saved + h;
      const double up = loss_and_grad(p, batch, loss).loss;
      *coords[c] = saved - h;
      const double down = loss_and_grad(p, batch, loss).loss;
      *coords[c] = saved;
      const double fd = (up - down) / (2 * h);
      const double scale = std::max({std::abs(fd), std::abs(analytic[c]), 1e-3});
      worst = std::max(worst, std::abs(fd - analytic[c]) / scale);
    }
    ++networks;
  }
  return {worst <= 1e-5,
          Format("%d networks (%d near kinks skipped), max relative diff %.3g",
                 networks, skipped, worst)};
}

struct SqCase {
  const char* label;
  TrainableGroups groups;
  double tau;
  double delta;
};

Outcome SqFrontier() {
  const auto start = Clock::now();
  const int n = 8;
  const int k = 2;
  const double parities = 28.0;
  const SqCase cases[] = {
      {"W", TrainableGroups::Only(true, false, false, false), 0.8, 0.9},
      {"b,u,beta", TrainableGroups::Only(false, true, true, true), 0.5, 1.0},
  };
  bool pass = true;
  std::string detail;
  for (const SqCase& c : cases) {
    int runs = 0;
    int found = 0;
    double min_hidden = 1.0;
    double max_parseval = 0.0;
    double bound = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      StarModelConfig config;
      config.n = n;
      config.r = 1;
      config.scheme = InitScheme::UniformDense();
      config.seed = seed;
      config.trainable = c.groups;
      const long T = 1;
      const StarTrajectory traj = star_trajectory(config, T);
      const SqBudget budget{static_cast<double>(traj.ParameterCount()),
                            static_cast<double>(T), c.tau, c.delta};
      if (!budget_check(n, k, budget)) {
        pass = false;
        continue;
      }
      bound = 1.0 - budget.r * budget.T / (c.tau * c.tau * parities);
      const HardParityResult res = find_hard_parity(traj, k, c.tau);
      ++runs;
      found += res.hard_support.has_value();
      min_hidden = std::min(min_hidden, res.hidden_fraction);
      max_parseval = std::max(max_parseval, res.max_parseval_mean);
      pass = pass && res.hard_support.has_value() &&
             res.hidden_fraction >= bound &&
             res.max_parseval_mean <= 1.0 / parities + 1e-15;
    }
    detail += Format("[%s: %d/%d runs found a hidden parity, min hidden %.3f >= %.3f, "
                     "max Parseval mean %.4f] ",
                     c.label, found, runs, min_hidden, bound, max_parseval);
  }
  const double secs = Seconds(start);
  return {pass && secs < 60.0, detail + Format("%.2fs", secs)};
}

struct Planted {
  ParityInstance inst;
  MlpParams init;
  Dataset cube;
  GoodNeuronLayout layout;
};

Planted MakePlanted(int n, int k, int s, int width, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  ParityInstance inst(n, oracle::RandomSubset(gen, n, k));
  MlpParams init = init_params(InitScheme::OverSparseTheory(s, k), width, n, seed);
  Dataset cube = FullCube(inst);
  GoodNeuronLayout layout = OverSparseLayout(init, inst);
  return {inst, std::move(init), std::move(cube), std::move(layout)};
}

Outcome TheoryOversparse() {
  bool exact = true;
  bool ideal = true;
  int good = 0;
  std::string detail;
  struct Case {
    int n, k, s, width;
  };
  for (const Case& c : {Case{6, 2, 3, 100}, Case{8, 2, 5, 60}, Case{10, 2, 3, 100},
                        Case{8, 4, 5, 400}, Case{10, 4, 5, 400}}) {
    const Planted p = MakePlanted(c.n, c.k, c.s, c.width, 11);
    const Phase1Result res = oversparse_phase1(p.init, p.cube, p.inst, c.s, true);
    const Rational target = Rational(1) / Rational(2 * c.k);
    good += p.layout.good_count();
    exact = exact && p.layout.good_count() > 0;
    for (const auto& row : res.exact_relevant) {
      for (const Rational& w : row) exact = exact && (w < 0 ? Rational(-w) : w) == target;
    }
    const FeatureMap psi = ideal_feature_map(p.inst, p.layout, p.init);
    const IdealSecondLayer second = construct_ideal_second_layer(c.k, p.layout);
    const double err = FeatureModelError(psi, second.Coefficients(), p.cube);
    ideal = ideal && err == 0.0;
  }
  detail += Format("phase 1 relevant weights %s over %d good neurons; ideal network %s; ",
                   exact ? "exactly 1/2k" : "off", good,
                   ideal ? "zero error on every cube" : "misclassifies");

  const Planted p = MakePlanted(6, 2, 3, 100, 0);
  const FeatureMap psi = ideal_feature_map(p.inst, p.layout, p.init);
  const double norm = construct_ideal_second_layer(2, p.layout).Coefficients().norm();
  const Phase2Result res =
      oversparse_phase2(psi, p.cube, Phase2Config::ForAccuracy(0.1, norm, 10000));
  const Dataset test = generate_dataset(p.inst, 10000, 99);
  const double held_out = FeatureModelError(psi, res.coef, test);
  detail += Format("phase 2 held-out error %.4f", held_out);
  return {exact && ideal && !res.diverged && held_out <= 0.05, detail};
}

Outcome TheoryUndersparse() {
  const auto start = Clock::now();
  const int n = 10;
  const int k = 4;
  const int s = 2;
  const double eps = 1.0 / (2.0 * n);
  const int width = UnderSparseWidth(n, k, s);
  UnderSparseStepConfig config;
  config.eps_init = eps;
  int passed = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    std::mt19937_64 gen(seed);
    const ParityInstance inst(n, oracle::RandomSubset(gen, n, k));
    const MlpParams init =
        init_params(InitScheme::UnderSparseTheory(s, k, eps), width, n, seed);
    const UnderSparseResult res =
        undersparse_one_step(init, FullCube(inst), inst, s, config);
    passed += res.report.pass &&
              static_cast<int>(res.report.passing.size()) >= k + 1;
  }
  const double secs = Seconds(start);
  return {passed >= 95 && secs < 300.0,
          Format("%d/100 seeds pass at width %d, %.1fs", passed, width, secs)};
}

SweepResult RunCell(int n, int k, std::optional<long> m, int r,
                    const InitScheme& scheme, int trials, std::uint64_t seed) {
  SweepGrid grid;
  grid.n = {n};
  grid.k = {k};
  grid.m = {m};
  grid.r = {r};
  grid.schemes = {scheme};
  grid.trials = trials;
  grid.base_seed = seed;
  return run_sweep(grid);
}

Outcome EndToEnd() {
  const auto start = Clock::now();
  const SweepResult easy = RunCell(50, 3, std::nullopt, 1000,
                                   InitScheme::SparseExperiment(2), 10, 0);
  const SweepResult hard = RunCell(300, 4, 100, 10,
                                   InitScheme::SparseExperiment(2), 10, 0);
  const int easy_wins = easy.cells.front().successes;
  const int hard_wins = hard.cells.front().successes;
  const double secs = Seconds(start);
  return {easy_wins >= 8 && hard_wins <= 1 && secs <= 3600.0,
          Format("(50, 3) online r=1000: %d/10; (300, 4) m=100 r=10: %d/10; %.0fs",
                 easy_wins, hard_wins, secs)};
}

Outcome Lottery() {
  const auto start = Clock::now();
  const LotteryResult res = lottery_experiment(LotteryConfig{});
  const bool pass = res.rewound_successes > res.random_successes && res.p_value < 0.05;
  return {pass, Format("full run %s; rewound %d/20 vs random %d/20, one-sided p = %.4g; %.0fs",
                       res.full.success ? "learned" : "failed", res.rewound_successes,
                       res.random_successes, res.p_value, Seconds(start))};
}

Outcome WidthMonotone() {
  const auto start = Clock::now();
  SweepGrid grid;
  grid.n = {100};
  grid.k = {3};
  grid.m = {300, 1000, 3000, 10000};
  grid.r = {10, 30, 100};
  grid.schemes = {InitScheme::SparseExperiment(2)};
  grid.trials = 10;
  grid.base_seed = 0;
  const SweepResult result = run_sweep(grid);
  const FrontierReport report = frontier_stats(result);
  std::string detail;
  for (const WidthSlice& slice : report.width_slices) {
    detail += Format("m=%ld:", slice.base.m.value_or(-1));
    for (std::size_t i = 0; i < slice.widths.size(); ++i) {
      detail += Format(" r%d=%.1f", slice.widths[i], slice.probs[i]);
    }
    detail += "; ";
  }
  return {report.width_monotone && report.width_slices.size() == 4,
          detail + Format("%.0fs", Seconds(start))};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>>& Criteria() {
  static const std::vector<std::pair<std::string, std::function<Outcome()>>> all = {
      {"fourier_closed_form", FourierClosedForm},
      {"population_gradient", PopulationGradient},
      {"good_neuron", GoodNeuron},
      {"finite_differences", FiniteDifferences},
      {"sq_frontier", SqFrontier},
      {"theory_oversparse", TheoryOversparse},
      {"theory_undersparse", TheoryUndersparse},
      {"end_to_end", EndToEnd},
      {"lottery", Lottery},
      {"width_monotone", WidthMonotone},
  };
  return all;
}

int Main(int argc, char** argv) {
  std::string only;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--list") {
      for (const auto& [name, run] : Criteria()) std::printf("%s\n", name.c_str());
      return 0;
    }
    if (arg == "--criterion" && i + 1 < argc) {
      only = argv[++i];
    } else {
      std::fprintf(stderr, "usage: acceptance [--list | --criterion NAME]\n");
      return 2;
    }
  }
  int failed = 0;
  int ran = 0;
  for (const auto& [name, run] : Criteria()) {
    if (!only.empty() && name != only) continue;
    ++ran;
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    failed += !outcome.pass;
    std::printf("%s %s: %s\n", outcome.pass ? "PASS" : "FAIL", name.c_str(),
                outcome.detail.c_str());
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
    return 2;
  }
  return failed == 0 ? 0 : 1;
}

}  // namespace
}  // namespace sparity

int main(int argc, char** argv) { return sparity::Main(argc, argv); }
