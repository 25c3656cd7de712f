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

// Cluster nodes, pricing, bandwidth and the spot interruption process.

#ifndef SPOTSCHED_CLUSTER_HPP_
#define SPOTSCHED_CLUSTER_HPP_

#include <cstddef>
#include <deque>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "spotsched/workflow.hpp"

namespace spotsched {

using NodeId = std::string;

enum class PricingClass { on_demand, spot };

const char* to_string(PricingClass pricing);
PricingClass parse_pricing_class(const std::string& text);

struct NodeSpec {
  NodeId id;
  std::string flavor;
  double cpu_capacity = 1.0;  // cores
  double mem_capacity = 1.0;  // GB
  double rate = 1.0;          // work-units per second
  PricingClass pricing = PricingClass::on_demand;
  double price_per_hour = 0.0;
};

struct ClusterSpec {
  std::vector<NodeSpec> nodes;
  double bandwidth_mbps = 100.0;
  // Optional symmetric overrides of the uniform bandwidth, keyed by node index pair (lo, hi).
  std::map<std::pair<std::size_t, std::size_t>, double> bandwidth_overrides;
  double interruption_rate_per_hour = 0.0;  // per spot node
  double interruption_downtime_s = 300.0;

  // MB/s between two distinct nodes.
  double bandwidth(std::size_t a, std::size_t b) const;
  std::size_t node_index(const NodeId& id) const;  // throws ReferenceError
  void set_bandwidth(std::size_t a, std::size_t b, double mbps);

  // Throws ConfigError when an invariant does not hold.
  void validate() const;

  // Six spot and five on-demand t4g nodes at their listed hourly prices.
  static ClusterSpec table_one(double interruption_rate_per_hour = 0.5);
};

double unit_cost_per_second(const NodeSpec& node);

// Identifies a task inside a running simulation by workflow and task index.
struct TaskRef {
  std::size_t workflow = 0;
  std::size_t task = 0;
  friend bool operator==(const TaskRef&, const TaskRef&) = default;
  friend auto operator<=>(const TaskRef&, const TaskRef&) = default;
};

struct RunningTask {
  TaskRef ref;
  double cpu_req = 0.0;
  double mem_req = 0.0;
  double work = 0.0;
  double compute_start = 0.0;  // after inbound transfers complete
  double compute_time = 0.0;
};

struct QueuedTask {
  TaskRef ref;
  double cpu_req = 0.0;
  double mem_req = 0.0;
  double work = 0.0;
};

struct NodeState {
  double cpu_free = 0.0;
  double mem_free = 0.0;
  std::vector<RunningTask> running;
  std::deque<QueuedTask> queued;
  bool alive = true;
  double next_interruption = std::numeric_limits<double>::infinity();
  double revive_at = std::numeric_limits<double>::infinity();

  static NodeState idle(const NodeSpec& node);
};

struct ClusterState {
  std::vector<NodeState> nodes;

  static ClusterState idle(const ClusterSpec& spec);
};

inline constexpr double kDeadNodeWait = 1e9;

bool can_fit(const NodeState& state, const TaskSpec& task);

// Seconds of backlog on a node: remaining work of running tasks plus queued work, over rate.
double estimated_wait(const NodeState& state, double rate, double now,
                      double dead_sentinel = kDeadNodeWait);

// Exponential gap with mean 3600 / rate_per_hour; +inf at rate 0.
double sample_next_interruption(double rate_per_hour, std::mt19937_64& rng);

// Kills everything on a spot node and marks it dead until now + downtime.
// Returns the killed running tasks followed by the killed queued tasks.
std::vector<TaskRef> apply_interruption(const ClusterSpec& spec, ClusterState& state,
                                        std::size_t node, double now);

// Brings a dead node back with all resources free.
void revive_node(const ClusterSpec& spec, ClusterState& state, std::size_t node);

}  // namespace spotsched

#endif  // SPOTSCHED_CLUSTER_HPP_
