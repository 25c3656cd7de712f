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

#include "spotsched/baselines.hpp"

#include <memory>
#include <vector>

#include "spotsched/errors.hpp"

namespace spotsched {

const char* to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::random:
      return "random";
    case BaselineKind::k8_default:
      return "k8-default";
    case BaselineKind::on_demand_only:
      return "on-demand";
  }
  return "unknown";
}

std::optional<BaselineKind> parse_baseline(const std::string& name) {
  if (name == "random") return BaselineKind::random;
  if (name == "k8-default") return BaselineKind::k8_default;
  if (name == "on-demand") return BaselineKind::on_demand_only;
  return std::nullopt;
}

std::size_t random_policy(const Observation& observation, std::mt19937_64& rng) {
  std::vector<std::size_t> feasible;
  for (std::size_t i = 0; i < observation.nodes.size(); ++i) {
    if (observation.feasible(i)) feasible.push_back(i);
  }
  if (feasible.empty()) throw NoFeasibleAction("no feasible node for the pending task");
  std::uniform_int_distribution<std::size_t> pick(0, feasible.size() - 1);
  return feasible[pick(rng)];
}

double least_allocated_score(const NodeObservation& node, const ScoreWeights& weights) {
  return weights.cpu * (node.cpu_free / node.cpu_capacity) + weights.mem * (node.mem_free / node.mem_capacity);
}

std::size_t score_policy(const Observation& observation, std::optional<PricingClass> restrict_to,
                         const ScoreWeights& weights) {
  std::optional<std::size_t> best;
  double best_score = 0.0;
  for (std::size_t i = 0; i < observation.nodes.size(); ++i) {
    if (!observation.feasible(i)) continue;
    if (restrict_to && observation.nodes[i].pricing != *restrict_to) continue;
    const double score = least_allocated_score(observation.nodes[i], weights);
    if (!best || score > best_score) {
      best = i;
      best_score = score;
    }
  }
  if (!best) throw NoFeasibleAction("no node passes the filter for the pending task");
  return *best;
}

EnvOptions baseline_env_options(BaselineKind kind) {
  EnvOptions options;
  if (kind == BaselineKind::on_demand_only) options.restrict_to = PricingClass::on_demand;
  return options;
}

SchedulerFn make_baseline(BaselineKind kind, std::uint64_t seed) {
  switch (kind) {
    case BaselineKind::random: {
      std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x4a4du};
      auto rng = std::make_shared<std::mt19937_64>(seq);
      return [rng](const Observation& observation) { return random_policy(observation, *rng); };
    }
    case BaselineKind::k8_default:
      return [](const Observation& observation) { return score_policy(observation); };
    case BaselineKind::on_demand_only:
      return [](const Observation& observation) { return score_policy(observation, PricingClass::on_demand); };
  }
  throw InvalidArgument("unknown baseline kind");
}

}  // namespace spotsched
