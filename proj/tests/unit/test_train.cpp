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

#include "sparity/error.hpp"
#include "sparity/train.hpp"

namespace sparity {
namespace {

TrainConfig Short(long steps, std::uint64_t seed) {
  TrainConfig c;
  c.steps = steps;
  c.seed = seed;
  c.test_size = 2000;
  return c;
}

TEST(TrainTest, Deterministic) {
  const ParityInstance inst(10, {1, 4});
  const TrainConfig c = Short(1500, 77);
  for (const DataSource& source : {DataSource::Online(), DataSource::Offline(200)}) {
    const TrainResult a = train(inst, source, 20, InitScheme::SparseExperiment(2), c);
    const TrainResult b = train(inst, source, 20, InitScheme::SparseExperiment(2), c);
    EXPECT_EQ(a.record, b.record);
    EXPECT_EQ(a.final_params, b.final_params);
  }
}

TEST(TrainTest, SingleCoordinateIsLearned) {
  const ParityInstance inst(20, {7});
  const TrainResult res =
      train(inst, DataSource::Online(), 10, InitScheme::UniformDense(), Short(20000, 3));
  EXPECT_TRUE(res.record.success);
  ASSERT_TRUE(res.record.steps_to_success.has_value());
  EXPECT_LE(res.record.final_test_err, 0.10);
}

TEST(TrainTest, RecordCoordinates) {
  const ParityInstance inst(12, {0, 5, 6});
  const TrainResult res = train(inst, DataSource::Offline(64), 8,
                                InitScheme::SparseExperiment(3), Short(300, 9));
  EXPECT_EQ(res.record.n, 12);
  EXPECT_EQ(res.record.k, 3);
  EXPECT_EQ(res.record.m, 64);
  EXPECT_EQ(res.record.r, 8);
  EXPECT_EQ(res.record.scheme, "oversparse");
  EXPECT_EQ(res.record.s, 3);
  EXPECT_EQ(res.record.seed, 9u);
  EXPECT_EQ(res.initial, init_params(InitScheme::SparseExperiment(3), 8, 12, InitSeed(9)));
  ASSERT_EQ(res.record.trajectory.size(), 3u);
  EXPECT_EQ(res.record.trajectory.back().step, 300);
}

// success <=> some snapshot at or below the threshold; steps_to_success is
// the first such snapshot.
TEST(TrainProperty, SuccessDefinition) {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    const ParityInstance inst(8, {static_cast<int>(seed % 8)});
    TrainConfig c = Short(3000, seed);
    c.stop_on_success = seed % 2 == 0;
    c.eval_early_exit = false;
    c.eta = LayerValues::All(0.02);
    const RunRecord rec =
        train(inst, DataSource::Offline(50), 4, InitScheme::UniformDense(), c).record;
    std::optional<long> first;
    for (const Snapshot& s : rec.trajectory) {
      if (!first && s.test_err <= c.success_threshold) first = s.step;
    }
    EXPECT_EQ(rec.success, first.has_value());
    EXPECT_EQ(rec.steps_to_success, first);
    EXPECT_EQ(rec.success, rec.steps_to_success.has_value());
    EXPECT_EQ(rec.final_test_err, rec.trajectory.back().test_err);
  }
}

// The reported test error is measured on the held-out sample of the run.
TEST(TrainProperty, HeldOutErrorIsReproducible) {
  const ParityInstance inst(10, {2, 3});
  TrainConfig c = Short(500, 5);
  c.eval_early_exit = false;
  c.stop_on_success = false;
  const TrainResult res =
      train(inst, DataSource::Online(), 16, InitScheme::SparseExperiment(2), c);
  Rng test_rng = Rng(5).Split("test");
  const Dataset test = SampleDataset(inst, 2000, test_rng);
  EXPECT_EQ(res.record.final_test_err, ZeroOneError(res.final_params, test));
}

TEST(TrainTest, ZeroFunctionPredictsMinusOne) {
  const ParityInstance inst(10, {0, 1, 2, 3});
  const MlpParams p = init_params(InitScheme::OverSparseTheory(3, 4), 40, 10, 1);
  const Dataset data = generate_dataset(inst, 5000, 2);
  const double positives = (data.y.array() > 0.0).cast<double>().mean();
  EXPECT_EQ(ZeroOneError(p, data), positives);
  EXPECT_NEAR(positives, 0.5, 0.03);
}

TEST(TrainTest, EarlyExitReportsPrefix) {
  const ParityInstance inst(10, {0, 1});
  const MlpParams p = MlpParams::Zeros(2, 10);
  const Dataset data = generate_dataset(inst, 10000, 3);
  const double full = ZeroOneError(p, data);
  const double prefix = ZeroOneError(p, data, 0.1);
  EXPECT_GT(prefix, 0.1);
  EXPECT_NEAR(prefix, full, 0.05);
}

TEST(TrainTest, DivergenceIsRecorded) {
  const ParityInstance inst(10, {0, 1});
  TrainConfig c = Short(5000, 1);
  c.loss = Loss::kSquare;
  c.eta = LayerValues::All(50.0);
  const RunRecord rec =
      train(inst, DataSource::Online(), 20, InitScheme::UniformDense(), c).record;
  EXPECT_TRUE(rec.diverged);
  EXPECT_FALSE(rec.success);
  EXPECT_EQ(rec.final_test_err, 0.5);
}

TEST(TrainTest, ConfigValidation) {
  const ParityInstance inst(6, {0});
  TrainConfig c;
  c.batch_size = 0;
  EXPECT_THROW(train(inst, DataSource::Online(), 4, InitScheme::UniformDense(), c), Error);
  c = TrainConfig{};
  c.eta.W = -0.1;
  EXPECT_THROW(c.Validate(), Error);
  c = TrainConfig{};
  c.steps = 0;
  EXPECT_THROW(c.Validate(), Error);
  EXPECT_THROW(train(inst, DataSource::Offline(0), 4, InitScheme::UniformDense(), TrainConfig{}),
               Error);
  EXPECT_THROW(train_from(MlpParams::Zeros(2, 5), inst, DataSource::Online(), TrainConfig{}),
               Error);
}

TEST(TrainTest, FixedDatasetIsUsed) {
  const ParityInstance inst(8, {1, 2});
  const Dataset data = generate_dataset(inst, 40, 11);
  TrainConfig c = Short(200, 4);
  const RunRecord a =
      train(inst, DataSource::Fixed(data), 8, InitScheme::UniformDense(), c).record;
  const RunRecord b =
      train(inst, DataSource::Fixed(data), 8, InitScheme::UniformDense(), c).record;
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.m, 40);
}

}  // namespace
}  // namespace sparity
