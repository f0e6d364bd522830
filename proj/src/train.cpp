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

#include "sparity/train.hpp"

#include <algorithm>
#include <cmath>

#include "sparity/error.hpp"

namespace sparity {
namespace {

constexpr Eigen::Index kEvalChunk = 1000;

// Largest training set evaluated in full; bigger ones use a prefix.
constexpr Eigen::Index kMaxTrainEvalRows = 10000;

bool Finite(const MlpParams& p) { return p.AllFinite(); }

}  // namespace

double ZeroOneError(const MlpParams& params, const Dataset& data,
                    std::optional<double> give_up_above) {
  const Eigen::Index rows = data.x.rows();
  Require(rows > 0, "cannot evaluate on an empty dataset");
  const double limit = give_up_above ? *give_up_above * rows : rows + 1.0;
  long mistakes = 0;
  Eigen::Index seen = 0;
  while (seen < rows) {
    const Eigen::Index take = std::min(kEvalChunk, rows - seen);
    RowMatrix hidden = data.x.middleRows(seen, take) * params.W.transpose();
    hidden.rowwise() += params.b.transpose();
    const Eigen::VectorXd out =
        (hidden.cwiseMax(0.0) * params.u).array() + params.beta;
    for (Eigen::Index i = 0; i < take; ++i) {
      const double predicted = out(i) > 0.0 ? 1.0 : -1.0;
      if (predicted != data.y(seen + i)) ++mistakes;
    }
    seen += take;
    if (mistakes > limit) break;
  }
  return static_cast<double>(mistakes) / static_cast<double>(seen);
}

std::uint64_t InitSeed(std::uint64_t run_seed) {
  return Rng(run_seed).Split("init").seed() ^ 0x5bd1e995ull;
}

TrainResult train_from(const MlpParams& start, const ParityInstance& inst,
                       const DataSource& source, const TrainConfig& config) {
  config.Validate();
  Require(start.dim() == inst.n(), "network dimension does not match parity");
  Require(start.AllFinite(), "initial parameters must be finite");

  const Rng root(config.seed);
  Rng data_rng = root.Split("data");
  Rng batch_rng = root.Split("batch");
  Rng test_rng = root.Split("test");

  TrainResult result;
  RunRecord& rec = result.record;
  rec.n = inst.n();
  rec.k = inst.k();
  rec.r = start.width();
  rec.seed = config.seed;
  if (source.m()) rec.m = static_cast<long>(*source.m());
  result.initial = start;

  const Dataset test = SampleDataset(
      inst, static_cast<std::size_t>(config.test_size), test_rng);
  Dataset train_set;
  if (!source.online()) {
    train_set = source.fixed() ? *source.fixed()
                               : SampleDataset(inst, *source.m(), data_rng);
    Require(train_set.dim() == inst.n(), "fixed dataset has wrong dimension");
    Require(train_set.size() >= 1, "offline training needs m >= 1");
  }
  Dataset train_eval;
  if (!source.online()) {
    const Eigen::Index rows = std::min<Eigen::Index>(
        static_cast<Eigen::Index>(train_set.size()), kMaxTrainEvalRows);
    train_eval.x = train_set.x.topRows(rows);
    train_eval.y = train_set.y.head(rows);
  }

  const auto batch = static_cast<Eigen::Index>(config.batch_size);
  Dataset mb;
  mb.x.resize(batch, inst.n());
  mb.y.resize(batch);
  const std::optional<double> give_up =
      config.eval_early_exit ? std::optional<double>(config.success_threshold)
                             : std::nullopt;

  MlpParams params = start;
  long online_mistakes = 0;
  long online_seen = 0;
  for (long step = 1; step <= config.steps; ++step) {
    if (source.online()) {
      data_rng.FillSigns(mb.x.data(),
                         static_cast<std::size_t>(batch) * inst.n());
      LabelRows(inst, mb.x, mb.y);
    } else {
      const auto m = static_cast<std::uint64_t>(train_set.size());
      for (Eigen::Index i = 0; i < batch; ++i) {
        const auto row = static_cast<Eigen::Index>(batch_rng.Below(m));
        mb.x.row(i) = train_set.x.row(row);
        mb.y(i) = train_set.y(row);
      }
    }

    const Eigen::VectorXd yhat = ForwardBatch(params, mb.x);
    Eigen::VectorXd dloss(batch);
    bool finite = true;
    for (Eigen::Index i = 0; i < batch; ++i) {
      if (!std::isfinite(yhat(i))) finite = false;
      dloss(i) = LossDerivative(config.loss, yhat(i), mb.y(i));
      if (source.online()) {
        online_mistakes += ((yhat(i) > 0.0 ? 1.0 : -1.0) != mb.y(i));
        ++online_seen;
      }
    }
    if (finite) {
      params = sgd_step(params, Backprop(params, mb.x, dloss), config, step);
    }
    if (!finite || !Finite(params)) {
      rec.diverged = true;
      rec.trajectory.push_back({step, 0.5, 0.5});
      break;
    }

    if (step % config.eval_interval == 0 || step == config.steps) {
      Snapshot snap;
      snap.step = step;
      if (source.online()) {
        snap.train_err = static_cast<double>(online_mistakes) /
                         static_cast<double>(std::max(online_seen, 1L));
        online_mistakes = 0;
        online_seen = 0;
      } else {
        snap.train_err = ZeroOneError(params, train_eval);
      }
      snap.test_err = ZeroOneError(params, test, give_up);
      if (!rec.train_success_step &&
          snap.train_err <= config.success_threshold) {
        rec.train_success_step = step;
      }
      rec.final_train_err = snap.train_err;
      rec.final_test_err = snap.test_err;
      if (config.keep_trajectory || step == config.steps) {
        rec.trajectory.push_back(snap);
      }
      if (snap.test_err <= config.success_threshold) {
        if (!rec.success) {
          rec.success = true;
          rec.steps_to_success = step;
        }
        if (config.stop_on_success) {
          if (!config.keep_trajectory && step != config.steps) {
            rec.trajectory.push_back(snap);
          }
          break;
        }
      }
    }
  }
  if (rec.diverged) {
    rec.final_train_err = 0.5;
    rec.final_test_err = 0.5;
  }
  result.final_params = std::move(params);
  return result;
}

TrainResult train(const ParityInstance& inst, const DataSource& source, int r,
                  const InitScheme& scheme, const TrainConfig& config) {
  const MlpParams start =
      init_params(scheme, r, inst.n(), InitSeed(config.seed));
  TrainResult result = train_from(start, inst, source, config);
  result.record.scheme = ToString(scheme.variant);
  result.record.s = scheme.s;
  return result;
}

}  // namespace sparity
