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

#include "spotsched/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "spotsched/errors.hpp"

namespace spotsched {

const char* to_string(PricingClass pricing) {
  return pricing == PricingClass::spot ? "spot" : "on_demand";
}

PricingClass parse_pricing_class(const std::string& text) {
  if (text == "spot") return PricingClass::spot;
  if (text == "on_demand") return PricingClass::on_demand;
  throw ConfigError("unknown pricing class '" + text + "' (expected \"spot\" or \"on_demand\")");
}

double ClusterSpec::bandwidth(std::size_t a, std::size_t b) const {
  auto key = std::minmax(a, b);
  auto it = bandwidth_overrides.find({key.first, key.second});
  return it == bandwidth_overrides.end() ? bandwidth_mbps : it->second;
}

std::size_t ClusterSpec::node_index(const NodeId& id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i].id == id) return i;
  }
  throw ReferenceError("unknown node '" + id + "'");
}

void ClusterSpec::set_bandwidth(std::size_t a, std::size_t b, double mbps) {
  auto key = std::minmax(a, b);
  bandwidth_overrides[{key.first, key.second}] = mbps;
}

void ClusterSpec::validate() const {
  if (nodes.empty()) throw ConfigError("cluster has no nodes");
  std::set<NodeId> seen;
  for (const auto& node : nodes) {
    const std::string where = "node '" + node.id + "'";
    if (!seen.insert(node.id).second) throw ConfigError("duplicate " + where);
    if (!(node.cpu_capacity > 0.0)) throw ConfigError(where + ": cpu must be > 0");
    if (!(node.mem_capacity > 0.0)) throw ConfigError(where + ": mem_gb must be > 0");
    if (!(node.rate > 0.0)) throw ConfigError(where + ": rate must be > 0");
    if (!(node.price_per_hour >= 0.0)) throw ConfigError(where + ": price_per_hour must be >= 0");
  }
  if (!(bandwidth_mbps > 0.0)) throw ConfigError("bandwidth_mbps must be > 0");
  for (const auto& [pair, mbps] : bandwidth_overrides) {
    if (pair.first >= nodes.size() || pair.second >= nodes.size() || pair.first == pair.second) {
      throw ConfigError("bandwidth override references an invalid node pair");
    }
    if (!(mbps > 0.0)) throw ConfigError("bandwidth override must be > 0");
  }
  if (!(interruption_rate_per_hour >= 0.0)) {
    throw ConfigError("interruption_rate_per_hour must be >= 0");
  }
  if (!(interruption_downtime_s >= 0.0)) throw ConfigError("interruption_downtime_s must be >= 0");
}

ClusterSpec ClusterSpec::table_one(double interruption_rate_per_hour) {
  struct Flavor {
    const char* name;
    double cores;
    double mem_gb;
    int spot_count;
    int on_demand_count;
    double spot_price;
    double on_demand_price;
  };
  static constexpr Flavor kFlavors[] = {
      {"t4g.large", 2, 8, 2, 2, 0.033, 0.0672},
      {"t4g.xlarge", 4, 16, 3, 2, 0.0857, 0.1344},
      {"t4g.2xlarge", 8, 32, 1, 1, 0.1589, 0.2688},
  };
  ClusterSpec spec;
  for (PricingClass pricing : {PricingClass::spot, PricingClass::on_demand}) {
    for (const auto& flavor : kFlavors) {
      const bool spot = pricing == PricingClass::spot;
      const int count = spot ? flavor.spot_count : flavor.on_demand_count;
      for (int i = 0; i < count; ++i) {
        NodeSpec node;
        node.id = std::string(flavor.name) + (spot ? "-spot-" : "-od-") + std::to_string(i);
        node.flavor = flavor.name;
        node.cpu_capacity = flavor.cores;
        node.mem_capacity = flavor.mem_gb;
        node.rate = flavor.cores;
        node.pricing = pricing;
        node.price_per_hour = spot ? flavor.spot_price : flavor.on_demand_price;
        spec.nodes.push_back(std::move(node));
      }
    }
  }
  spec.interruption_rate_per_hour = interruption_rate_per_hour;
  return spec;
}

double unit_cost_per_second(const NodeSpec& node) { return node.price_per_hour / 3600.0; }

NodeState NodeState::idle(const NodeSpec& node) {
  NodeState state;
  state.cpu_free = node.cpu_capacity;
  state.mem_free = node.mem_capacity;
  return state;
}

ClusterState ClusterState::idle(const ClusterSpec& spec) {
  ClusterState state;
  state.nodes.reserve(spec.nodes.size());
  for (const auto& node : spec.nodes) state.nodes.push_back(NodeState::idle(node));
  return state;
}

bool can_fit(const NodeState& state, const TaskSpec& task) {
  return state.alive && state.cpu_free >= task.cpu_req && state.mem_free >= task.mem_req;
}

double estimated_wait(const NodeState& state, double rate, double now, double dead_sentinel) {
  if (!(rate > 0.0)) throw InvalidArgument("processing rate must be > 0");
  if (!state.alive) return dead_sentinel;
  double backlog = 0.0;
  for (const auto& running : state.running) {
    double remaining = running.work;
    if (running.compute_time > 0.0) {
      const double elapsed = std::max(0.0, now - running.compute_start);
      remaining = running.work * (1.0 - elapsed / running.compute_time);
    }
    backlog += std::clamp(remaining, 0.0, running.work);
  }
  for (const auto& queued : state.queued) backlog += queued.work;
  return backlog / rate;
}

double sample_next_interruption(double rate_per_hour, std::mt19937_64& rng) {
  if (!(rate_per_hour > 0.0)) return std::numeric_limits<double>::infinity();
  std::exponential_distribution<double> gap(rate_per_hour / 3600.0);
  return gap(rng);
}

std::vector<TaskRef> apply_interruption(const ClusterSpec& spec, ClusterState& state,
                                        std::size_t node, double now) {
  if (node >= spec.nodes.size()) throw ReferenceError("node index out of range");
  if (spec.nodes[node].pricing != PricingClass::spot) {
    throw ContractViolation("node '" + spec.nodes[node].id + "' is on-demand and cannot be interrupted");
  }
  NodeState& target = state.nodes[node];
  if (!target.alive) {
    throw ContractViolation("node '" + spec.nodes[node].id + "' is already interrupted");
  }
  std::vector<TaskRef> killed;
  killed.reserve(target.running.size() + target.queued.size());
  for (const auto& running : target.running) killed.push_back(running.ref);
  for (const auto& queued : target.queued) killed.push_back(queued.ref);
  target.running.clear();
  target.queued.clear();
  target.cpu_free = spec.nodes[node].cpu_capacity;
  target.mem_free = spec.nodes[node].mem_capacity;
  target.alive = false;
  target.revive_at = now + spec.interruption_downtime_s;
  return killed;
}

void revive_node(const ClusterSpec& spec, ClusterState& state, std::size_t node) {
  NodeState& target = state.nodes[node];
  target = NodeState::idle(spec.nodes[node]);
}

}  // namespace spotsched
