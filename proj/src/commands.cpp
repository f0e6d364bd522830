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


#include "sparity/commands.hpp"

#include <algorithm>
#include <cmath>

#include "sparity/error.hpp"
#include "sparity/popgrad.hpp"
#include "sparity/sq.hpp"
#include "sparity/theory.hpp"

namespace sparity {
namespace {

constexpr int kMaxBruteForceDimension = 20;

ParityInstance ReadInstance(ConfigReader& reader, int n, int k,
                            std::uint64_t seed) {
  if (!reader.Has("support")) return TrialInstance(n, k, seed);
  std::vector<int> support = reader.IntList("support", {}, 0);
  if (static_cast<int>(support.size()) != k) {
    reader.FailField("support", "must list exactly k indices");
  }
  try {
    return ParityInstance(n, std::move(support));
  } catch (const Error& e) {
    reader.FailField("support", e.what());
  }
}

// Experiment-style scheme from scheme/s/eps_init.
InitScheme ReadScheme(ConfigReader& reader) {
  const std::string name = reader.String("scheme", "uniform");
  InitVariant variant{};
  try {
    variant = ParseInitVariant(name);
  } catch (const Error&) {
    reader.FailField("scheme", "unknown scheme '" + name + "'");
  }
  InitScheme scheme;
  scheme.variant = variant;
  scheme.s = static_cast<int>(reader.Int("s", 0, 0));
  scheme.eps_init = reader.Real("eps_init", 0.0, 0.0);
  return scheme;
}

Json RationalJson(const Rational& q) {
  return {{"exact", ToString(q)}, {"value", ToDouble(q)}};
}

Json SubnetworkJson(const SubnetworkReport& r) {
  return {{"good_neurons", r.good_neurons},
          {"passing", r.passing},
          {"biases_covered", r.biases_covered},
          {"biases_required", r.biases_required},
          {"max_support_deviation", r.max_support_deviation},
          {"max_off_support", r.max_off_support},
          {"infeasible_gamma", r.infeasible_gamma},
          {"pass", r.pass}};
}

}  // namespace

Json FourierCommand(const Json& request) {
  ConfigReader reader(request);
  const int n = static_cast<int>(reader.Int("n", 9, 0));
  const std::string kind = reader.String("kind", n % 2 == 1 ? "maj" : "half");
  const bool brute = reader.Bool("brute_force", n <= 16);
  reader.Finish();
  if (kind != "maj" && kind != "half") {
    reader.FailField("kind", "expected maj or half");
  }
  const bool maj = kind == "maj";
  if (brute && n > kMaxBruteForceDimension) {
    Fail(ErrorCode::kScaleGuard, "brute-force Fourier checks need n <= 20");
  }
  std::optional<BooleanFnTable> table;
  if (brute) table = maj ? MajorityTable(n) : HalfTable(n);

  Json coefficients = Json::array();
  double max_diff = 0.0;
  for (int d = maj ? 1 : 0; d <= n; d += 2) {
    const FourierCoefficient c = maj ? maj_fourier_coeff(n, d) : half_fourier_coeff(n, d);
    Json entry = {{"d", d}, {"exact", ToString(c.exact)}, {"value", c.value}};
    if (table) {
      std::vector<int> set(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) set[static_cast<std::size_t>(i)] = i;
      const double direct = brute_force_fourier(*table, set);
      entry["brute_force"] = direct;
      max_diff = std::max(max_diff, std::abs(direct - c.value));
    }
    coefficients.push_back(entry);
  }
  Json out = {{"n", n}, {"kind", kind}, {"coefficients", coefficients}};
  if (table) out["max_abs_diff"] = max_diff;
  return out;
}

Json PopgradCommand(const Json& request) {
  ConfigReader reader(request);
  const int n = static_cast<int>(reader.Int("n", 10, 1));
  const int k = static_cast<int>(reader.Int("k", 2, 1));
  const int s = static_cast<int>(reader.Int("s", 3, 0));
  if (k > n) reader.FailField("k", "must not exceed n");
  if (s > n) reader.FailField("s", "must not exceed n");
  std::vector<int> first_k(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) first_k[static_cast<std::size_t>(i)] = i;
  const ParityInstance inst =
      reader.Has("support") ? ReadInstance(reader, n, k, 0) : ParityInstance(n, first_k);

  std::vector<int> active;
  if (reader.Has("active")) {
    active = reader.IntList("active", {}, 0);
  } else {
    for (int i : inst.support()) {
      if (static_cast<int>(active.size()) < s) active.push_back(i);
    }
    for (int i = 0; i < n && static_cast<int>(active.size()) < s; ++i) {
      if (!inst.Contains(i)) active.push_back(i);
    }
  }
  std::sort(active.begin(), active.end());
  SparseNeuron neuron;
  neuron.n = n;
  neuron.active = active;
  neuron.background = reader.Real("background", 0.0, 0.0);
  neuron.bias = reader.Real("bias", 0.0, -1e300);
  reader.Finish();
  try {
    neuron.Validate();
  } catch (const Error& e) {
    Fail(ErrorCode::kConfig, std::string("invalid neuron: ") + e.what());
  }

  Json out = {{"n", n}, {"k", k}, {"s", s}, {"support", inst.support()}};
  if (s >= 1) {
    const GoodNeuronProbability p = good_neuron_probability(n, k, s);
    out["good_neuron_probability"] = {{"exact", RationalJson(p.exact)},
                                      {"lower_bound", RationalJson(p.lower_bound)},
                                      {"bound_holds", p.bound_holds}};
  }
  if (k % 2 == 0 && s % 2 == 1 && k < s) {
    const GapConstants g = gap_constants(k, s);
    out["gap_constants"] = {{"relevant", RationalJson(g.relevant_exact)},
                            {"irrelevant", RationalJson(g.irrelevant_exact)},
                            {"kappa_lower", g.kappa_lower},
                            {"ratio_bound", g.ratio_bound},
                            {"ratio_within_bound", g.RatioWithinBound()}};
  }
  if (s < k && k < n && (k - s) % 2 == 0) {
    const GapRatioReport g = undersparse_gap_ratio(n, k, s);
    out["gap_ratio"] = {{"ratio", RationalJson(g.exact)},
                        {"stated_form", g.stated_form},
                        {"derived_form", g.derived_form},
                        {"matches_stated", g.matches_stated},
                        {"matches_derived", g.matches_derived}};
  }
  const std::vector<double> grad = PopulationNeuronGrad(neuron, inst);
  Json report = {{"active", neuron.active},
                 {"background", neuron.background},
                 {"bias", neuron.bias},
                 {"gradient", grad}};
  if (n <= kMaxBruteForceDimension) {
    const std::vector<double> direct = brute_force_neuron_grad(neuron, inst);
    double diff = 0.0;
    for (std::size_t i = 0; i < grad.size(); ++i) {
      diff = std::max(diff, std::abs(grad[i] - direct[i]));
    }
    report["brute_force"] = direct;
    report["max_abs_diff"] = diff;
  }
  out["neuron"] = report;
  return out;
}

Json TrainCommand(const Json& request) {
  if (request.is_object() && request.contains("trials")) {
    Fail(ErrorCode::kConfig, "config field 'trials': train runs a single trial");
  }
  Json doc = request;
  if (doc.is_object()) doc["trials"] = 1;
  const SweepGrid grid = ParseConfigJson(doc);
  if (grid.RunCount() != 1) {
    Fail(ErrorCode::kConfig, "train takes exactly one value per axis");
  }
  return ToJson(run_sweep(grid, 1).records.front());
}

SweepResult SweepCommand(const Json& request, int workers) {
  return run_sweep(ParseConfigJson(request), workers);
}

Json SweepSummary(const SweepResult& result) {
  Json cells = Json::array();
  for (const auto& cell : result.cells) cells.push_back(ToJson(cell));
  Json out = {{"cells", cells}};
  try {
    out["frontier"] = ToJson(frontier_stats(result));
  } catch (const Error& e) {
    out["frontier"] = nullptr;
    out["frontier_skipped"] = e.what();
  }
  return out;
}

Json LotteryCommand(const Json& request) {
  ConfigReader reader(request);
  LotteryConfig c;
  c.n = static_cast<int>(reader.Int("n", c.n, 1));
  c.k = static_cast<int>(reader.Int("k", c.k, 1));
  c.r = static_cast<int>(reader.Int("r", c.r, 1));
  c.s = static_cast<int>(reader.Int("s", c.s, 1));
  c.keep = static_cast<int>(reader.Int("keep", c.keep, 1));
  c.retrain_seeds = static_cast<int>(reader.Int("retrain_seeds", c.retrain_seeds, 1));
  const std::string norm = reader.String("norm", "incoming");
  if (norm == "output_weighted") {
    c.norm = PruneNorm::kOutputWeighted;
  } else if (norm != "incoming") {
    reader.FailField("norm", "expected incoming or output_weighted");
  }
  c.seed = reader.Seed("seed", c.seed);
  c.config = ReadTrainConfig(reader, c.config);
  reader.Finish();
  if (c.k > c.n) reader.FailField("k", "must not exceed n");
  if (c.keep > c.r) reader.FailField("keep", "must not exceed r");
  return ToJson(lottery_experiment(c));
}

Json SqCheckCommand(const Json& request) {
  ConfigReader reader(request);
  StarModelConfig c;
  c.n = static_cast<int>(reader.Int("n", 8, 1));
  const int k = static_cast<int>(reader.Int("k", 2, 1));
  c.r = static_cast<int>(reader.Int("width", 1, 1));
  const long steps = reader.Int("steps", 1, 1);
  const double tau = reader.Real("tau", 0.8, 0.0);
  const double delta = reader.Real("delta", 0.9, 0.0);
  c.eta = reader.Real("eta", 0.1, 0.0);
  c.weight_decay = reader.Real("weight_decay", 0.0, 0.0);
  if (reader.Has("trainable")) {
    const Json& list = reader.Raw("trainable");
    if (!list.is_array()) reader.FailField("trainable", "must be an array of group names");
    c.trainable = TrainableGroups::Only(false, false, false, false);
    for (const Json& g : list) {
      const std::string name = g.is_string() ? g.get<std::string>() : "";
      if (name == "W") c.trainable.W = true;
      else if (name == "b") c.trainable.b = true;
      else if (name == "u") c.trainable.u = true;
      else if (name == "beta") c.trainable.beta = true;
      else reader.FailField("trainable", "groups are W, b, u and beta");
    }
  }
  c.scheme = ReadScheme(reader);
  c.seed = reader.Seed("seed", 0);
  reader.Finish();
  if (k > c.n) reader.FailField("k", "must not exceed n");
  if (tau <= 0.0) reader.FailField("tau", "must be positive");
  if (delta <= 0.0 || delta > 1.0) reader.FailField("delta", "must lie in (0, 1]");

  const StarTrajectory traj = star_trajectory(c, steps);
  const long params = traj.ParameterCount();
  const SqBudget budget{static_cast<double>(params), static_cast<double>(steps),
                        tau, delta};
  const double parities = ToDouble(Rational(Binomial(c.n, k)));
  const HardParityResult res = find_hard_parity(traj, k, tau);
  const double hidden_bound =
      1.0 - budget.r * budget.T / (tau * tau * parities);

  Json table = Json::array();
  for (const ParityAuditRow& row : res.table) {
    table.push_back({{"support", row.support},
                     {"max_corr", row.max_corr},
                     {"hidden", row.hidden}});
  }
  return {{"n", c.n},
          {"k", k},
          {"parameters", params},
          {"steps", steps},
          {"budget_ratio", budget.Ratio()},
          {"budget_limit", 0.5 * parities},
          {"budget_ok", budget_check(c.n, k, budget)},
          {"queries", res.queries},
          {"normalization", res.normalization},
          {"hard_support", res.hard_support ? Json(*res.hard_support) : Json(nullptr)},
          {"hidden_fraction", res.hidden_fraction},
          {"hidden_bound", hidden_bound},
          {"hidden_bound_holds", res.hidden_fraction >= hidden_bound},
          {"max_parseval_mean", res.max_parseval_mean},
          {"parseval_limit", 1.0 / parities},
          {"parseval_ok", res.max_parseval_mean <= 1.0 / parities},
          {"table", table}};
}

Json TheoryOversparseCommand(const Json& request) {
  ConfigReader reader(request);
  const int n = static_cast<int>(reader.Int("n", 6, 1));
  const int k = static_cast<int>(reader.Int("k", 2, 2));
  const int s = static_cast<int>(reader.Int("s", k + 1, 1));
  const int width = static_cast<int>(reader.Int("width", 100, 2));
  const std::uint64_t seed = reader.Seed("seed", 0);
  if (k > n) reader.FailField("k", "must not exceed n");
  const ParityInstance inst = ReadInstance(reader, n, k, seed);
  const double eps = reader.Real("eps", 0.1, 0.0);
  const long phase2_steps = reader.Int("phase2_steps", 10000, 0);
  std::optional<double> fixed_step;
  if (reader.Has("fixed_step")) fixed_step = reader.Real("fixed_step", 0.0, 0.0);
  const int test_size = static_cast<int>(reader.Int("test_size", 10000, 1));
  const bool exact = reader.Bool("exact", n <= 12);
  reader.Finish();
  if (n > 16) Fail(ErrorCode::kScaleGuard, "full-cube theory checks need n <= 16");

  const MlpParams init =
      init_params(InitScheme::OverSparseTheory(s, k), width, n, seed);
  const Dataset cube = FullCube(inst);
  const Phase1Result p1 = oversparse_phase1(init, cube, inst, s, exact);
  const GoodNeuronLayout layout = OverSparseLayout(init, inst);

  Json phase1 = {{"eta", p1.eta}, {"good_neurons", layout.good_count()}};
  if (exact) {
    const Rational target = Rational(1, 2 * k);
    bool all_exact = !p1.exact_relevant.empty();
    for (const auto& row : p1.exact_relevant) {
      for (const Rational& w : row) {
        all_exact = all_exact && (w == target || w == -target);
        all_exact = all_exact && (w > 0) == (row.front() > 0);
      }
    }
    phase1["relevant_weight"] = ToString(target);
    phase1["relevant_weights_exact"] = all_exact;
  }

  const FeatureMap ideal = ideal_feature_map(inst, layout, init);
  const IdealSecondLayer second = construct_ideal_second_layer(k, layout);
  const Eigen::VectorXd coef = second.Coefficients();
  Json nu = Json::array();
  for (const Rational& v : second.nu_exact) nu.push_back(ToString(v));

  const Dataset test = generate_dataset(inst, static_cast<std::size_t>(test_size),
                                        DeriveSeed(seed, {1}));
  Phase2Config cfg = Phase2Config::ForAccuracy(eps, coef.norm(), phase2_steps);
  cfg.fixed_step = fixed_step;
  const Phase2Result on_ideal = oversparse_phase2(ideal, cube, cfg);
  const Phase2Result on_step = oversparse_phase2(p1.phi, cube, cfg);
  return {{"n", n},
          {"k", k},
          {"s", s},
          {"width", width},
          {"support", inst.support()},
          {"phase1", phase1},
          {"ideal",
           {{"nu", nu},
            {"norm_bound", second.norm_bound},
            {"coef_norm", coef.norm()},
            {"cube_error", FeatureModelError(ideal, coef, cube)}}},
          {"phase2",
           {{"lambda", cfg.lambda},
            {"steps", cfg.steps},
            {"ideal_test_error", FeatureModelError(ideal, on_ideal.coef, test)},
            {"ideal_objective", on_ideal.final_objective},
            {"post_step_test_error", FeatureModelError(p1.phi, on_step.coef, test)},
            {"post_step_objective", on_step.final_objective},
            {"diverged", on_ideal.diverged || on_step.diverged}}}};
}

Json TheoryUndersparseCommand(const Json& request) {
  ConfigReader reader(request);
  const int n = static_cast<int>(reader.Int("n", 10, 1));
  const int k = static_cast<int>(reader.Int("k", 4, 2));
  const int s = static_cast<int>(reader.Int("s", 2, 0));
  const double eps_init = reader.Real("eps_init", 1.0 / (2.0 * n), 0.0);
  const std::uint64_t seed = reader.Seed("seed", 0);
  const int seeds = static_cast<int>(reader.Int("seeds", 1, 1));
  if (k > n) reader.FailField("k", "must not exceed n");
  const ParityInstance inst = ReadInstance(reader, n, k, seed);
  const int width =
      static_cast<int>(reader.Int("width", UnderSparseWidth(n, k, s), 2));
  reader.Finish();
  if (n > 16) Fail(ErrorCode::kScaleGuard, "full-cube theory checks need n <= 16");

  const Dataset cube = FullCube(inst);
  UnderSparseStepConfig cfg;
  cfg.eps_init = eps_init;
  Json runs = Json::array();
  int passes = 0;
  for (int j = 0; j < seeds; ++j) {
    const std::uint64_t init_seed = seed + static_cast<std::uint64_t>(j);
    const MlpParams init = init_params(
        InitScheme::UnderSparseTheory(s, k, eps_init), width, n, init_seed);
    const UnderSparseResult res = undersparse_one_step(init, cube, inst, s, cfg);
    passes += res.report.pass;
    Json run = SubnetworkJson(res.report);
    run["init_seed"] = init_seed;
    run["eta"] = res.eta;
    run["gamma"] = res.gamma;
    run["lambda"] = res.lambda;
    runs.push_back(run);
  }
  return {{"n", n},   {"k", k},           {"s", s},
          {"eps_init", eps_init},         {"width", width},
          {"support", inst.support()},    {"seeds", seeds},
          {"passes", passes},             {"runs", runs}};
}

}  // namespace sparity
