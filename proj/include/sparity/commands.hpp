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


// One entry point per CLI subcommand: a JSON request in, a JSON report
// out. Requests reject unknown keys; every field has a default unless
// noted.

#ifndef SPARITY_COMMANDS_HPP_
#define SPARITY_COMMANDS_HPP_

#include "sparity/io.hpp"

namespace sparity {

// {n, kind: "maj" | "half" (default by parity of n), brute_force}
Json FourierCommand(const Json& request);

// {n, k, s, support, active, background, bias}
Json PopgradCommand(const Json& request);

// A sweep document with one value per axis and no "trials"; the record
// matches trial 0 of the equivalent sweep cell.
Json TrainCommand(const Json& request);

// Sweep document in, {"cells", "records", "frontier"} out. `workers` = 0
// uses the default worker count.
SweepResult SweepCommand(const Json& request, int workers);
Json SweepSummary(const SweepResult& result);

// {n, k, r, s, keep, retrain_seeds, norm, seed, training fields}
Json LotteryCommand(const Json& request);

// {n, k, width, steps, tau, delta, eta, weight_decay, trainable, scheme,
//  s, seed}
Json SqCheckCommand(const Json& request);

// {n, k, s, width, seed, support, eps, phase2_steps, fixed_step,
//  test_size}
Json TheoryOversparseCommand(const Json& request);

// {n, k, s, eps_init, width, seed, seeds, support}
Json TheoryUndersparseCommand(const Json& request);

}  // namespace sparity

#endif  // SPARITY_COMMANDS_HPP_
