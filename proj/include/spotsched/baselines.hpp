// Copyright 2026 The spotsched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Comparison schedulers: uniform random, filter-and-score, and filter-and-score
// limited to on-demand nodes.

#ifndef SPOTSCHED_BASELINES_HPP_
#define SPOTSCHED_BASELINES_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "spotsched/cluster.hpp"
#include "spotsched/simulator.hpp"

namespace spotsched {

enum class BaselineKind { random, k8_default, on_demand_only };

const char* to_string(BaselineKind kind);
// Accepts "random", "k8-default" and "on-demand".
std::optional<BaselineKind> parse_baseline(const std::string& name);

// Uniform over feasible nodes. Throws NoFeasibleAction if there are none.
std::size_t random_policy(const Observation& observation, std::mt19937_64& rng);

struct ScoreWeights {
  double cpu = 0.5;
  double mem = 0.5;
};

// Least-allocated score over feasible nodes (optionally of one class); ties go
// to the lowest index. Throws NoFeasibleAction if nothing passes the filter.
std::size_t score_policy(const Observation& observation, std::optional<PricingClass> restrict_to = std::nullopt,
                         const ScoreWeights& weights = {});

double least_allocated_score(const NodeObservation& node, const ScoreWeights& weights = {});

// Environment options the baseline needs (on-demand-only restricts placement).
EnvOptions baseline_env_options(BaselineKind kind);

// Scheduler callback; the random baseline draws from a stream seeded by `seed`.
SchedulerFn make_baseline(BaselineKind kind, std::uint64_t seed);

}  // namespace spotsched

#endif  // SPOTSCHED_BASELINES_HPP_
