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

#ifndef SPARITY_HARNESS_HPP_
#define SPARITY_HARNESS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparity/train.hpp"

namespace sparity {

struct SweepGrid {
  std::vector<int> n;
  std::vector<int> k;
  // std::nullopt is the online regime.
  std::vector<std::optional<long>> m;
  std::vector<int> r;
  std::vector<InitScheme> schemes;
  int trials = 50;
  std::uint64_t base_seed = 0;
  TrainConfig config;

  void Validate() const;
  std::size_t RunCount() const;
};

struct CellKey {
  int n = 0;
  int k = 0;
  std::optional<long> m;
  int r = 0;
  std::string scheme;
  int s = 0;

  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct CellSummary {
  CellKey key;
  int trials = 0;
  int successes = 0;
  double success_prob = 0.0;
  std::optional<double> median_steps;

  friend bool operator==(const CellSummary&, const CellSummary&) = default;
};

struct SweepResult {
  std::vector<CellSummary> cells;  // sorted by key
  std::vector<RunRecord> records;  // sorted by (key, trial)

  friend bool operator==(const SweepResult&, const SweepResult&) = default;
};

// Worker count from SPARITY_WORKERS, else the hardware concurrency.
int DefaultWorkerCount();

// Seed of one trial: a hash of the base seed and the grid coordinates.
std::uint64_t TrialSeed(std::uint64_t base, const CellKey& key, int trial);

// Hidden support for a trial, drawn from its seed.
ParityInstance TrialInstance(int n, int k, std::uint64_t trial_seed);

// Runs every trial on `workers` threads (0 = DefaultWorkerCount()).
// The result does not depend on the worker count.
SweepResult run_sweep(const SweepGrid& grid, int workers = 0);

// Cell summaries from trial records; order-independent.
std::vector<CellSummary> AggregateCells(std::vector<RunRecord>& records);

enum class PruneNorm {
  kIncoming,        // ||w_i||_2
  kOutputWeighted,  // |u_i| * ||w_i||_2
};

// Indices of the `keep` largest neurons, ties to the lower index; sorted.
std::vector<int> TopNeurons(const MlpParams& params, int keep, PruneNorm norm);

struct LotteryConfig {
  int n = 50;
  int k = 5;
  int r = 100;
  int s = 2;
  int keep = 5;
  int retrain_seeds = 20;
  PruneNorm norm = PruneNorm::kIncoming;
  std::uint64_t seed = 0;
  // No weight decay by default.
  TrainConfig config = [] {
    TrainConfig c;
    c.lambda = LayerValues::All(0.0);
    return c;
  }();
};

struct LotteryResult {
  ParityInstance instance{1, {0}};
  RunRecord full;
  std::vector<int> kept;
  std::vector<RunRecord> rewound;
  std::vector<RunRecord> random;
  int rewound_successes = 0;
  int random_successes = 0;
  // One-sided Fisher exact test of rewound > random.
  double p_value = 1.0;
};

// (a) trains the full network online; (b) keeps the top neurons, rewinds
// them to initialization and retrains under fresh seeds; (c) retrains
// subnetworks of the same size drawn from a fresh initialization.
LotteryResult lottery_experiment(const LotteryConfig& config);

// P[X >= a] for the first group in a 2x2 table with successes a of n1 and
// b of n2, conditioned on the margins.
double FisherOneSided(int a, int n1, int b, int n2);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

// Wilson score interval at 95%.
Interval WilsonInterval(int successes, int trials);

struct WidthSlice {
  CellKey base;  // r unset
  std::vector<int> widths;
  std::vector<double> probs;
  bool monotone = true;
};

struct SampleSlice {
  CellKey base;  // m unset
  std::vector<std::optional<long>> sizes;
  std::vector<double> probs;
  bool non_monotone = false;
  // Enters, leaves and re-enters a high-success region as m grows.
  bool double_descent = false;
};

struct FrontierReport {
  std::vector<WidthSlice> width_slices;
  std::vector<SampleSlice> sample_slices;
  bool width_monotone = true;
  bool any_double_descent = false;
};

// Width slices are monotone when every wider cell's interval reaches the
// narrower cell's lower limit. Needs two widths and three sizes per (n, k).
FrontierReport frontier_stats(const SweepResult& result);

}  // namespace sparity

#endif  // SPARITY_HARNESS_HPP_
