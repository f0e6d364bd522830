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

#include "sparity/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "sparity/error.hpp"

namespace sparity {
namespace {

constexpr std::uint64_t kOnlineSentinel = ~std::uint64_t{0};

// Sorts online after every finite size.
long SizeOrder(const std::optional<long>& m) {
  return m ? *m : std::numeric_limits<long>::max();
}

double Median(std::vector<long> v) {
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  if (v.size() % 2 == 1) return static_cast<double>(v[mid]);
  return 0.5 * (static_cast<double>(v[mid - 1]) + static_cast<double>(v[mid]));
}

CellKey KeyOf(const RunRecord& rec) {
  return {rec.n, rec.k, rec.m, rec.r, rec.scheme, rec.s};
}

// log C(n, k)
double LogChoose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

void SweepGrid::Validate() const {
  Require(!n.empty() && !k.empty() && !m.empty() && !r.empty() &&
              !schemes.empty(),
          "every sweep axis needs at least one value");
  Require(trials >= 1, "trials per cell must be at least 1");
  for (int v : n) Require(v >= 1, "n must be positive");
  for (int v : k) Require(v >= 1, "k must be positive");
  for (const auto& v : m) Require(!v || *v >= 1, "m must be positive");
  for (int v : r) Require(v >= 1, "r must be positive");
  for (int nv : n) {
    for (int kv : k) Require(kv <= nv, "k must not exceed n");
    for (int rv : r) {
      for (const auto& scheme : schemes) scheme.Validate(rv, nv);
    }
  }
  config.Validate();
}

std::size_t SweepGrid::RunCount() const {
  return n.size() * k.size() * m.size() * r.size() * schemes.size() *
         static_cast<std::size_t>(trials);
}

int DefaultWorkerCount() {
  if (const char* env = std::getenv("SPARITY_WORKERS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

std::uint64_t TrialSeed(std::uint64_t base, const CellKey& key, int trial) {
  return DeriveSeed(
      base, {static_cast<std::uint64_t>(key.n), static_cast<std::uint64_t>(key.k),
             key.m ? static_cast<std::uint64_t>(*key.m) : kOnlineSentinel,
             static_cast<std::uint64_t>(key.r), HashTag(key.scheme),
             static_cast<std::uint64_t>(key.s),
             static_cast<std::uint64_t>(trial)});
}

ParityInstance TrialInstance(int n, int k, std::uint64_t trial_seed) {
  Rng rng = Rng(trial_seed).Split("support");
  return ParityInstance(n, rng.SampleSubset(n, k));
}

std::vector<CellSummary> AggregateCells(std::vector<RunRecord>& records) {
  std::sort(records.begin(), records.end(),
            [](const RunRecord& a, const RunRecord& b) {
              const CellKey ka = KeyOf(a);
              const CellKey kb = KeyOf(b);
              if (ka != kb) return ka < kb;
              return a.trial < b.trial;
            });
  std::map<CellKey, std::vector<const RunRecord*>> groups;
  for (const RunRecord& rec : records) groups[KeyOf(rec)].push_back(&rec);
  std::vector<CellSummary> cells;
  for (const auto& [key, recs] : groups) {
    CellSummary cell;
    cell.key = key;
    cell.trials = static_cast<int>(recs.size());
    std::vector<long> steps;
    for (const RunRecord* rec : recs) {
      if (rec->success) {
        ++cell.successes;
        steps.push_back(*rec->steps_to_success);
      }
    }
    cell.success_prob =
        static_cast<double>(cell.successes) / static_cast<double>(cell.trials);
    if (!steps.empty()) cell.median_steps = Median(std::move(steps));
    cells.push_back(std::move(cell));
  }
  return cells;
}

SweepResult run_sweep(const SweepGrid& grid, int workers) {
  grid.Validate();
  struct Task {
    CellKey key;
    InitScheme scheme;
    int trial;
  };
  std::vector<Task> tasks;
  for (int n : grid.n) {
    for (int k : grid.k) {
      for (const auto& m : grid.m) {
        for (int r : grid.r) {
          for (const auto& scheme : grid.schemes) {
            const CellKey key{n, k, m, r, ToString(scheme.variant), scheme.s};
            for (int t = 0; t < grid.trials; ++t) tasks.push_back({key, scheme, t});
          }
        }
      }
    }
  }

  std::vector<RunRecord> records(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& task = tasks[i];
      try {
        TrainConfig config = grid.config;
        config.seed = TrialSeed(grid.base_seed, task.key, task.trial);
        const ParityInstance inst =
            TrialInstance(task.key.n, task.key.k, config.seed);
        const DataSource source = task.key.m
                                      ? DataSource::Offline(
                                            static_cast<std::size_t>(*task.key.m))
                                      : DataSource::Online();
        RunRecord rec =
            train(inst, source, task.key.r, task.scheme, config).record;
        rec.trial = task.trial;
        records[i] = std::move(rec);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int count = std::max(1, workers > 0 ? workers : DefaultWorkerCount());
  std::vector<std::thread> pool;
  for (int w = 1; w < count; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);

  SweepResult result;
  result.records = std::move(records);
  result.cells = AggregateCells(result.records);
  return result;
}

std::vector<int> TopNeurons(const MlpParams& params, int keep, PruneNorm norm) {
  Require(keep >= 1 && keep <= params.width(),
          "keep must lie between 1 and the width");
  std::vector<std::pair<double, int>> scored;
  for (int i = 0; i < params.width(); ++i) {
    double score = params.W.row(i).norm();
    if (norm == PruneNorm::kOutputWeighted) score *= std::abs(params.u(i));
    scored.emplace_back(-score, i);
  }
  std::sort(scored.begin(), scored.end());
  std::vector<int> kept;
  for (int i = 0; i < keep; ++i) kept.push_back(scored[static_cast<std::size_t>(i)].second);
  std::sort(kept.begin(), kept.end());
  return kept;
}

double FisherOneSided(int a, int n1, int b, int n2) {
  Require(a >= 0 && a <= n1 && b >= 0 && b <= n2, "invalid 2x2 table");
  const int total = a + b;
  const int n = n1 + n2;
  double p = 0.0;
  for (int x = a; x <= std::min(n1, total); ++x) {
    if (total - x > n2) continue;
    p += std::exp(LogChoose(n1, x) + LogChoose(n2, total - x) -
                  LogChoose(n, total));
  }
  return std::min(p, 1.0);
}

LotteryResult lottery_experiment(const LotteryConfig& config) {
  Require(config.keep >= 1 && config.keep <= config.r,
          "keep must lie between 1 and the width");
  Require(config.retrain_seeds >= 1, "need at least one retrain seed");
  LotteryResult result;
  const InitScheme scheme = InitScheme::SparseExperiment(config.s);
  result.instance = TrialInstance(config.n, config.k, config.seed);

  TrainConfig full_config = config.config;
  full_config.seed = DeriveSeed(config.seed, {0});
  const TrainResult full = train(result.instance, DataSource::Online(),
                                 config.r, scheme, full_config);
  result.full = full.record;
  result.kept = TopNeurons(full.final_params, config.keep, config.norm);
  const MlpParams ticket = full.initial.Subnetwork(result.kept);

  for (int j = 0; j < config.retrain_seeds; ++j) {
    TrainConfig c = config.config;
    c.seed = DeriveSeed(config.seed, {1, static_cast<std::uint64_t>(j)});
    RunRecord rec =
        train_from(ticket, result.instance, DataSource::Online(), c).record;
    rec.scheme = "rewound";
    rec.s = config.s;
    rec.trial = j;
    result.rewound_successes += rec.success;
    result.rewound.push_back(std::move(rec));

    // Same-size subnetwork of a fresh full-width initialization.
    const std::uint64_t fresh = DeriveSeed(config.seed, {2, static_cast<std::uint64_t>(j)});
    const MlpParams pool = init_params(scheme, config.r, config.n, fresh);
    std::vector<int> pick = Rng(fresh).Split("pick").SampleSubset(config.r, config.keep);
    c.seed = DeriveSeed(config.seed, {3, static_cast<std::uint64_t>(j)});
    RunRecord rnd = train_from(pool.Subnetwork(pick), result.instance,
                               DataSource::Online(), c)
                        .record;
    rnd.scheme = "random";
    rnd.s = config.s;
    rnd.trial = j;
    result.random_successes += rnd.success;
    result.random.push_back(std::move(rnd));
  }
  result.p_value =
      FisherOneSided(result.rewound_successes, config.retrain_seeds,
                     result.random_successes, config.retrain_seeds);
  return result;
}

Interval WilsonInterval(int successes, int trials) {
  Require(trials >= 1 && successes >= 0 && successes <= trials,
          "invalid success count");
  constexpr double z = 1.959963984540054;
  const double n = trials;
  const double p = successes / n;
  const double denom = 1.0 + z * z / n;
  const double center = (p + z * z / (2.0 * n)) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

FrontierReport frontier_stats(const SweepResult& result) {
  std::map<CellKey, std::vector<const CellSummary*>> by_width;
  std::map<CellKey, std::vector<const CellSummary*>> by_size;
  std::map<std::pair<int, int>, std::pair<std::vector<int>, std::vector<long>>> axes;
  for (const CellSummary& cell : result.cells) {
    CellKey w = cell.key;
    w.r = 0;
    by_width[w].push_back(&cell);
    CellKey s = cell.key;
    s.m = std::nullopt;
    by_size[s].push_back(&cell);
    auto& [widths, sizes] = axes[{cell.key.n, cell.key.k}];
    widths.push_back(cell.key.r);
    sizes.push_back(SizeOrder(cell.key.m));
  }
  for (auto& [nk, lists] : axes) {
    auto& [widths, sizes] = lists;
    std::sort(widths.begin(), widths.end());
    std::sort(sizes.begin(), sizes.end());
    widths.erase(std::unique(widths.begin(), widths.end()), widths.end());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
    Require(widths.size() >= 2 && sizes.size() >= 3,
            "frontier statistics need >= 2 widths and >= 3 sizes per (n, k)");
  }

  FrontierReport report;
  for (auto& [base, cells] : by_width) {
    std::sort(cells.begin(), cells.end(),
              [](auto* a, auto* b) { return a->key.r < b->key.r; });
    WidthSlice slice;
    slice.base = base;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      slice.widths.push_back(cells[i]->key.r);
      slice.probs.push_back(cells[i]->success_prob);
      for (std::size_t j = 0; j < i; ++j) {
        const Interval narrow = WilsonInterval(cells[j]->successes, cells[j]->trials);
        const Interval wide = WilsonInterval(cells[i]->successes, cells[i]->trials);
        if (wide.hi < narrow.lo) slice.monotone = false;
      }
    }
    report.width_monotone = report.width_monotone && slice.monotone;
    report.width_slices.push_back(std::move(slice));
  }
  for (auto& [base, cells] : by_size) {
    std::sort(cells.begin(), cells.end(), [](auto* a, auto* b) {
      return SizeOrder(a->key.m) < SizeOrder(b->key.m);
    });
    SampleSlice slice;
    slice.base = base;
    std::vector<Interval> ci;
    for (const CellSummary* cell : cells) {
      slice.sizes.push_back(cell->key.m);
      slice.probs.push_back(cell->success_prob);
      ci.push_back(WilsonInterval(cell->successes, cell->trials));
    }
    for (std::size_t j = 0; j < ci.size(); ++j) {
      bool drop_after_high = false;
      bool rise_after = false;
      for (std::size_t i = 0; i < j; ++i) drop_after_high |= ci[j].hi < ci[i].lo;
      for (std::size_t l = j + 1; l < ci.size(); ++l) rise_after |= ci[j].hi < ci[l].lo;
      slice.non_monotone |= drop_after_high;
      slice.double_descent |= drop_after_high && rise_after;
    }
    report.any_double_descent = report.any_double_descent || slice.double_descent;
    report.sample_slices.push_back(std::move(slice));
  }
  return report;
}

}  // namespace sparity
