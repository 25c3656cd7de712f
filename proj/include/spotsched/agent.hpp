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

// Hierarchical scheduling agent: pick a pricing group, then a node inside it.

#ifndef SPOTSCHED_AGENT_HPP_
#define SPOTSCHED_AGENT_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "spotsched/cluster.hpp"
#include "spotsched/ppo.hpp"
#include "spotsched/simulator.hpp"

namespace spotsched {

inline constexpr std::size_t kGroupCount = 2;
inline constexpr std::size_t kOnDemandGroup = 0;
inline constexpr std::size_t kSpotGroup = 1;

struct ActionSpaceLayout {
  // Cluster node indices per group, in cluster order. Group 0 is on-demand, group 1 spot.
  std::array<std::vector<std::size_t>, kGroupCount> groups;

  static ActionSpaceLayout from_cluster(const ClusterSpec& cluster);
  std::size_t node_count() const { return groups[0].size() + groups[1].size(); }
  std::size_t node_at(std::size_t group, std::size_t slot) const { return groups.at(group).at(slot); }
  // (group, slot) of a cluster node index.
  std::pair<std::size_t, std::size_t> locate(std::size_t node) const;
  friend bool operator==(const ActionSpaceLayout&, const ActionSpaceLayout&) = default;
};

struct ScalingConstants {
  double cpu = 1.0;    // largest node cpu capacity
  double mem = 1.0;    // largest node memory
  double work = 1000.0;
  double wait = 1000.0;  // wait saturates at 1 beyond this many seconds
  double cost = 1.0;   // largest on-demand unit cost per second

  static ScalingConstants from_cluster(const ClusterSpec& cluster);
  friend bool operator==(const ScalingConstants&, const ScalingConstants&) = default;
};

inline std::size_t feature_size(std::size_t nodes) { return 3 + 5 * nodes; }

// [cpu_req, mem_req, work] then per node [cpu_free, mem_free, wait, unit_cost, alive].
Vector encode(const Observation& observation, const ScalingConstants& scaling);

struct ActionMasks {
  Mask group;
  std::array<Mask, kGroupCount> node;
};

ActionMasks build_masks(const Observation& observation, const ActionSpaceLayout& layout);

enum class SelectMode { sample, greedy };

struct ActionChoice {
  std::size_t group = 0;
  std::size_t slot = 0;
  std::size_t node = 0;  // cluster index
  double logp_group = 0.0;
  double logp_node = 0.0;
  double value = 0.0;
};

// Throws NoFeasibleAction when every group is masked out.
ActionChoice select_action(const PolicySet& policies, const Vector& features, const ActionMasks& masks,
                           const ActionSpaceLayout& layout, std::mt19937_64& rng, SelectMode mode);

struct NetworkShape {
  std::vector<std::size_t> hidden{64, 64};
  double hidden_gain = 1.4142135623730951;
  double policy_output_gain = 0.01;
  double value_output_gain = 1.0;
};

PolicySet make_policy_set(const ActionSpaceLayout& layout, std::size_t features, const NetworkShape& shape,
                          std::mt19937_64& rng);

class Agent {
 public:
  Agent() = default;
  Agent(PolicySet policies, ActionSpaceLayout layout, ScalingConstants scaling);

  // Freshly initialized agent for `cluster`.
  static Agent create(const ClusterSpec& cluster, std::uint64_t seed, const NetworkShape& shape = {});

  ActionChoice act(const Observation& observation, std::mt19937_64& rng, SelectMode mode) const;

  // Throws LayoutError when the cluster's groups do not match this agent.
  void check_layout(const ClusterSpec& cluster) const;

  PolicySet& policies() { return policies_; }
  const PolicySet& policies() const { return policies_; }
  const ActionSpaceLayout& layout() const { return layout_; }
  const ScalingConstants& scaling() const { return scaling_; }

  std::string to_checkpoint() const;
  static Agent from_checkpoint(const std::string& text);  // throws ConfigError
  void save(const std::filesystem::path& path) const;
  static Agent load(const std::filesystem::path& path);

 private:
  PolicySet policies_;
  ActionSpaceLayout layout_;
  ScalingConstants scaling_;
};

struct EpisodeSetup {
  ClusterSpec cluster;
  std::vector<WorkflowSpec> workload;
  std::uint64_t seed = 0;
};

using EpisodeFactory = std::function<EpisodeSetup(std::size_t episode)>;

struct EpisodeCurvePoint {
  std::size_t episode = 0;
  double total_reward = 0.0;
  double total_cost = 0.0;
  double mean_execution_time = 0.0;
  std::size_t completed = 0;
  std::size_t interrupted = 0;
  std::size_t timed_out = 0;
  std::size_t steps = 0;
  UpdateReport update;
};

struct TrainResult {
  Agent agent;
  std::vector<EpisodeCurvePoint> curve;
};

// Collects one episode per iteration with sampled actions and applies a PPO update.
TrainResult train(const EpisodeFactory& factory, Agent agent, const TrainConfig& config,
                  const std::function<void(const EpisodeCurvePoint&)>& progress = {});

struct EvaluationSummary {
  std::size_t episodes = 0;
  double mean_cost = 0.0;
  double std_cost = 0.0;
  double mean_execution_time = 0.0;
  double mean_completed = 0.0;
  double mean_interrupted = 0.0;
  double mean_timed_out = 0.0;
  std::vector<EpisodeStats> per_seed;
};

EvaluationSummary summarize(std::vector<EpisodeStats> episodes);

// Greedy-mode episodes, one per seed; the workload may depend on the seed.
EvaluationSummary evaluate(const Agent& agent, const ClusterSpec& cluster,
                           const std::function<std::vector<WorkflowSpec>(std::uint64_t)>& workload,
                           std::span<const std::uint64_t> seeds);
EvaluationSummary evaluate(const Agent& agent, const ClusterSpec& cluster,
                           const std::vector<WorkflowSpec>& workload, std::span<const std::uint64_t> seeds);

// Scheduler callback running `agent` greedily.
SchedulerFn greedy_scheduler(const Agent& agent);

}  // namespace spotsched

#endif  // SPOTSCHED_AGENT_HPP_
