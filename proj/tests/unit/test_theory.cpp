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


#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <tuple>

#include "oracles.hpp"
#include "sparity/error.hpp"
#include "sparity/popgrad.hpp"
#include "sparity/theory.hpp"

namespace sparity {
namespace {

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

TEST(Phase1Test, RelevantWeightsAreExact) {
  for (const auto& [n, k, s, width] :
       std::vector<std::tuple<int, int, int, int>>{{6, 2, 3, 100}, {8, 2, 5, 60}, {8, 4, 5, 400}}) {
    const Planted p = MakePlanted(n, k, s, width, 3);
    const Phase1Result res = oversparse_phase1(p.init, p.cube, p.inst, s, true);
    ASSERT_GT(p.layout.good_count(), 0);
    ASSERT_EQ(static_cast<int>(res.exact_relevant.size()), p.layout.good_count());
    const Rational target = Rational(1) / Rational(2 * k);
    for (const auto& row : res.exact_relevant) {
      for (const Rational& w : row) EXPECT_EQ(w < 0 ? Rational(-w) : w, target);
    }
    for (std::size_t slot = 0; slot < p.layout.plus.size(); ++slot) {
      for (int i : p.layout.plus[slot]) {
        for (int j : p.inst.support()) EXPECT_DOUBLE_EQ(res.params.W(i, j), 1.0 / (2 * k));
      }
      for (int i : p.layout.minus[slot]) {
        for (int j : p.inst.support()) EXPECT_DOUBLE_EQ(res.params.W(i, j), -1.0 / (2 * k));
      }
    }
  }
}

// With full decay the step replaces the weights by -eta times the gradient.
TEST(Phase1Test, StepIsWeightReplacement) {
  const Planted p = MakePlanted(8, 2, 3, 40, 5);
  const Dataset data = generate_dataset(p.inst, 3000, 2);
  for (const Dataset* d : {&p.cube, &data}) {
    const Phase1Result res = oversparse_phase1(p.init, *d, p.inst, 3);
    const MlpParams grads = loss_and_grad(p.init, *d, Loss::kHinge).grad;
    EXPECT_EQ(res.params.W, (-res.eta * grads.W).eval());
    EXPECT_EQ(res.params.b, p.init.b);
    EXPECT_EQ(res.params.u, p.init.u);
    EXPECT_EQ(res.phi.W, res.params.W);
  }
  EXPECT_EQ(oversparse_phase1(p.init, p.cube, p.inst, 3).eta, 1.0);
}

TEST(Phase1Test, BadNeuronsVanish) {
  const Planted p = MakePlanted(10, 2, 3, 60, 8);
  const Phase1Result cube = oversparse_phase1(p.init, p.cube, p.inst, 3);
  const std::size_t m = 20000;
  const Dataset sample = generate_dataset(p.inst, m, 4);
  const Phase1Result sampled = oversparse_phase1(p.init, sample, p.inst, 3);
  // Hoeffding with failure probability 1e-3 over every coordinate.
  const double tau = std::sqrt(2.0 * std::log(2.0 * 10 * 60 / 1e-3) / static_cast<double>(m));
  int checked = 0;
  for (int i = 0; i < p.init.width(); ++i) {
    int missing = 0;
    for (int j : p.inst.support()) missing += p.init.W(i, j) == 0.0;
    if (missing < 2) continue;
    ++checked;
    EXPECT_TRUE(cube.params.W.row(i).isZero(0.0));
    EXPECT_LE(sampled.params.W.row(i).cwiseAbs().maxCoeff(), cube.eta * tau);
  }
  EXPECT_GT(checked, 0);
}

TEST(Phase1Test, Errors) {
  const Planted p = MakePlanted(6, 2, 3, 10, 1);
  Dataset empty;
  empty.x.resize(0, 6);
  EXPECT_THROW(oversparse_phase1(p.init, empty, p.inst, 3), Error);
  const Dataset sample = generate_dataset(p.inst, 10, 1);
  EXPECT_THROW(oversparse_phase1(p.init, sample, p.inst, 3, true), Error);
}

TEST(IdealMapTest, DependsOnRelevantSumOnly) {
  const Planted p = MakePlanted(8, 4, 5, 200, 2);
  const FeatureMap psi = ideal_feature_map(p.inst, p.layout, p.init);
  const RowMatrix features = psi.Evaluate(p.cube.x);
  std::map<int, Eigen::VectorXd> by_sum;
  const int good = p.layout.good_count();
  for (Eigen::Index row = 0; row < p.cube.x.rows(); ++row) {
    int t = 0;
    for (int j : p.inst.support()) t += static_cast<int>(p.cube.x(row, j));
    const Eigen::VectorXd f = features.row(row).transpose();
    auto [it, inserted] = by_sum.emplace(t, f);
    if (!inserted) EXPECT_EQ(it->second, f);
    EXPECT_LE(f.head(psi.width()).norm(), std::sqrt(8.0 * 4 * good));
  }
  EXPECT_EQ(by_sum.size(), 5u);
}

TEST(SecondLayerTest, RepresentsTheParity) {
  for (const auto& [n, k, s, width] :
       std::vector<std::tuple<int, int, int, int>>{{6, 2, 3, 100}, {8, 4, 5, 400}, {10, 4, 5, 400}}) {
    const Planted p = MakePlanted(n, k, s, width, 6);
    const FeatureMap psi = ideal_feature_map(p.inst, p.layout, p.init);
    const IdealSecondLayer second = construct_ideal_second_layer(k, p.layout);
    const Eigen::VectorXd out = FeatureModelOutput(psi, second.Coefficients(), p.cube.x);
    for (Eigen::Index row = 0; row < out.size(); ++row) {
      EXPECT_NEAR(out(row), p.cube.y(row), 1e-12);
    }
    EXPECT_EQ(FeatureModelError(psi, second.Coefficients(), p.cube), 0.0);
    EXPECT_LE(second.u_star.norm(), second.norm_bound + 1e-12);
  }
}

TEST(SecondLayerTest, EmptySlotIsAnError) {
  Planted p = MakePlanted(6, 2, 3, 100, 1);
  p.layout.minus[0].clear();
  EXPECT_THROW(construct_ideal_second_layer(2, p.layout), Error);
}

TEST(Phase2Test, ZeroStepsKeepsStart) {
  const Planted p = MakePlanted(6, 2, 3, 20, 1);
  const FeatureMap psi = ideal_feature_map(p.inst, p.layout, p.init);
  Phase2Config cfg;
  cfg.lambda = 0.1;
  cfg.steps = 0;
  const Eigen::VectorXd start = Eigen::VectorXd::Constant(psi.dim(), 0.25);
  EXPECT_EQ(oversparse_phase2(psi, p.cube, cfg, start).coef, start);
}

TEST(Phase2Test, SeparableObjectiveDecreases) {
  const Planted p = MakePlanted(6, 2, 3, 100, 2);
  const FeatureMap psi = ideal_feature_map(p.inst, p.layout, p.init);
  Phase2Config cfg;
  cfg.lambda = 0.0;
  cfg.steps = 300;
  cfg.fixed_step = 0.01;
  const Phase2Result res = oversparse_phase2(psi, p.cube, cfg);
  for (std::size_t t = 1; t < res.objective_trace.size(); ++t) {
    EXPECT_LE(res.objective_trace[t], res.objective_trace[t - 1] + 1e-15);
  }
  EXPECT_LT(res.final_objective, res.objective_trace.front());
}

TEST(Phase2Test, PlantedFeaturesGeneralize) {
  const Planted p = MakePlanted(6, 2, 3, 100, 0);
  const FeatureMap psi = ideal_feature_map(p.inst, p.layout, p.init);
  const double bound = construct_ideal_second_layer(2, p.layout).Coefficients().norm();
  const Phase2Result res =
      oversparse_phase2(psi, p.cube, Phase2Config::ForAccuracy(0.1, bound, 10000));
  EXPECT_FALSE(res.diverged);
  const Dataset test = generate_dataset(p.inst, 10000, 99);
  EXPECT_LE(FeatureModelError(psi, res.coef, test), 0.05);
  Phase2Config bad;
  bad.lambda = 0.0;
  EXPECT_THROW(oversparse_phase2(psi, p.cube, bad), Error);
}

TEST(UndersparseTest, FullCubePasses) {
  const int n = 10;
  const int k = 4;
  const double eps = 1.0 / (2.0 * n);
  const ParityInstance inst(n, {1, 3, 6, 8});
  const Dataset cube = FullCube(inst);
  UnderSparseStepConfig cfg;
  cfg.eps_init = eps;
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const MlpParams init = init_params(InitScheme::UnderSparseTheory(2, k, eps),
                                       UnderSparseWidth(n, k, 2), n, seed);
    const UnderSparseResult res = undersparse_one_step(init, cube, inst, 2, cfg);
    EXPECT_TRUE(res.report.pass) << seed;
    EXPECT_FALSE(res.report.infeasible_gamma);
    EXPECT_GE(static_cast<int>(res.report.passing.size()), k);
    EXPECT_LE(res.report.max_off_support, 2 * eps * eps);
    EXPECT_GT(res.on_support_grad, res.off_support_grad);
  }
  EXPECT_EQ(UnderSparseWidth(10, 4, 2), 400);
}

TEST(UndersparseTest, SmallSamplesAreInfeasible) {
  const int n = 10;
  const double eps = 0.05;
  const ParityInstance inst(n, {0, 1, 2, 3});
  UnderSparseStepConfig cfg;
  cfg.eps_init = eps;
  int infeasible = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MlpParams init =
        init_params(InitScheme::UnderSparseTheory(2, 4, eps), 400, n, seed);
    const Dataset data = generate_dataset(inst, 64, seed);
    infeasible += undersparse_one_step(init, data, inst, 2, cfg).report.infeasible_gamma;
  }
  EXPECT_GE(infeasible, 8);
}

TEST(UndersparseTest, Errors) {
  const ParityInstance inst(10, {0, 1, 2, 3});
  const MlpParams init =
      init_params(InitScheme::UnderSparseTheory(2, 4, 0.05), 20, 10, 0);
  UnderSparseStepConfig cfg;
  cfg.eps_init = 0.05;
  EXPECT_THROW(undersparse_one_step(init, FullCube(inst), inst, 4, cfg), Error);
  EXPECT_THROW(undersparse_one_step(init, FullCube(inst), inst, 6, cfg), Error);
}

}  // namespace
}  // namespace sparity
