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

#ifndef SPARITY_TRAIN_HPP_
#define SPARITY_TRAIN_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparity/dataset.hpp"
#include "sparity/mlp.hpp"

namespace sparity {

struct Snapshot {
  long step = 0;
  double train_err = 0.0;
  double test_err = 0.0;

  friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

struct RunRecord {
  // Grid coordinates. m is empty for the online regime.
  int n = 0;
  int k = 0;
  std::optional<long> m;
  int r = 0;
  std::string scheme;
  int s = 0;
  int trial = 0;
  std::uint64_t seed = 0;

  bool success = false;
  std::optional<long> steps_to_success;
  double final_train_err = 0.5;
  double final_test_err = 0.5;
  bool diverged = false;
  // First evaluation at which the training error met the threshold; the
  // gap to steps_to_success is the delayed-generalization interval.
  std::optional<long> train_success_step;
  std::vector<Snapshot> trajectory;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct TrainResult {
  RunRecord record;
  MlpParams initial;
  MlpParams final_params;
};

// Fraction of misclassified rows, predicting +1 iff the output is positive.
// With `give_up_above` set, counting stops once the error provably exceeds
// it and the fraction over the rows seen so far is returned.
double ZeroOneError(const MlpParams& params, const Dataset& data,
                    std::optional<double> give_up_above = std::nullopt);

// Trains from the given parameters. Substreams of config.seed drive the
// data, minibatch, and test-set draws.
TrainResult train_from(const MlpParams& start, const ParityInstance& inst,
                       const DataSource& source, const TrainConfig& config);

// Initializes with a substream of config.seed, then trains.
TrainResult train(const ParityInstance& inst, const DataSource& source, int r,
                  const InitScheme& scheme, const TrainConfig& config);

// Seed of the initialization substream used by train().
std::uint64_t InitSeed(std::uint64_t run_seed);

}  // namespace sparity

#endif  // SPARITY_TRAIN_HPP_
