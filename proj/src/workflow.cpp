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

#include "spotsched/workflow.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "spotsched/errors.hpp"

namespace spotsched {

namespace {

void require_nonnegative(double value, const char* what) {
  if (!(value >= 0.0)) {
    throw InvalidArgument(std::string(what) + " must be >= 0");
  }
}

std::map<TaskId, std::size_t> index_tasks(const WorkflowSpec& workflow) {
  std::map<TaskId, std::size_t> index;
  for (std::size_t i = 0; i < workflow.tasks.size(); ++i) {
    index.emplace(workflow.tasks[i].id, i);
  }
  return index;
}

}  // namespace

std::optional<std::size_t> WorkflowSpec::task_index(const TaskId& task) const {
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    if (tasks[i].id == task) return i;
  }
  return std::nullopt;
}

WorkflowGraph WorkflowGraph::build(const WorkflowSpec& workflow) {
  const auto index = index_tasks(workflow);
  WorkflowGraph graph;
  graph.preds.resize(workflow.tasks.size());
  graph.succs.resize(workflow.tasks.size());
  for (const auto& edge : workflow.edges) {
    auto src = index.find(edge.src);
    auto dst = index.find(edge.dst);
    if (src == index.end() || dst == index.end()) {
      throw ReferenceError("workflow '" + workflow.id + "': edge " + edge.src + " -> " + edge.dst +
                           " references an unknown task");
    }
    graph.preds[dst->second].push_back({src->second, edge.data_mb});
    graph.succs[src->second].push_back(dst->second);
  }
  return graph;
}

const char* to_string(WorkflowOutcome outcome) {
  switch (outcome) {
    case WorkflowOutcome::completed:
      return "completed";
    case WorkflowOutcome::failed_interrupted:
      return "failed-interrupted";
    case WorkflowOutcome::failed_timeout:
      return "failed-timeout";
  }
  return "unknown";
}

double computation_time(double work, double rate) {
  if (!(rate > 0.0)) throw InvalidArgument("processing rate must be > 0");
  require_nonnegative(work, "work");
  return work / rate;
}

double transmission_time(double data_mb, double bandwidth) {
  return transmission_time(data_mb, bandwidth, false);
}

double transmission_time(double data_mb, double bandwidth, bool same_node) {
  require_nonnegative(data_mb, "data size");
  if (same_node) return 0.0;
  if (!(bandwidth > 0.0)) throw InvalidArgument("bandwidth between distinct nodes must be > 0");
  return data_mb / bandwidth;
}

TaskTiming task_timing(double start, double compute, double wait,
                       std::span<const double> pred_transfers) {
  require_nonnegative(start, "start");
  require_nonnegative(compute, "compute time");
  require_nonnegative(wait, "wait time");
  double max_transfer = 0.0;
  for (double transfer : pred_transfers) {
    require_nonnegative(transfer, "transfer time");
    max_transfer = std::max(max_transfer, transfer);
  }
  TaskTiming timing;
  timing.start = start;
  timing.compute = compute;
  timing.wait = wait;
  timing.max_transfer = max_transfer;
  timing.delay = compute + wait + max_transfer;
  timing.finish = start + timing.delay;
  return timing;
}

double task_cost(double compute, double unit_cost) {
  require_nonnegative(compute, "compute time");
  require_nonnegative(unit_cost, "unit cost");
  return compute * unit_cost;
}

WorkflowStats workflow_stats(std::span<const TaskTiming> timings, WorkflowOutcome outcome) {
  WorkflowStats stats;
  stats.outcome = outcome;
  for (const auto& timing : timings) {
    stats.makespan = std::max(stats.makespan, timing.finish);
    stats.cost += timing.cost;
  }
  return stats;
}

std::vector<TaskId> ready_tasks(const WorkflowSpec& workflow, const std::set<TaskId>& completed,
                                const std::set<TaskId>& in_flight) {
  const auto index = index_tasks(workflow);
  for (const auto* ids : {&completed, &in_flight}) {
    for (const auto& id : *ids) {
      if (!index.contains(id)) {
        throw ReferenceError("workflow '" + workflow.id + "' has no task '" + id + "'");
      }
    }
  }
  const WorkflowGraph graph = WorkflowGraph::build(workflow);
  std::vector<TaskId> ready;
  for (std::size_t i = 0; i < workflow.tasks.size(); ++i) {
    const auto& id = workflow.tasks[i].id;
    if (completed.contains(id) || in_flight.contains(id)) continue;
    const bool satisfied = std::all_of(graph.preds[i].begin(), graph.preds[i].end(),
                                       [&](const WorkflowGraph::Incoming& in) {
                                         return completed.contains(workflow.tasks[in.pred].id);
                                       });
    if (satisfied) ready.push_back(id);
  }
  std::sort(ready.begin(), ready.end());
  return ready;
}

void validate_dag(const WorkflowSpec& workflow) {
  const WorkflowGraph graph = WorkflowGraph::build(workflow);
  const std::size_t n = workflow.tasks.size();

  // Iterative DFS; a back edge to a node on the stack closes a cycle.
  enum class Mark { unvisited, active, done };
  std::vector<Mark> mark(n, Mark::unvisited);
  for (std::size_t root = 0; root < n; ++root) {
    if (mark[root] != Mark::unvisited) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    mark[root] = Mark::active;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next < graph.succs[node].size()) {
        const std::size_t succ = graph.succs[node][next++];
        if (mark[succ] == Mark::active) {
          const auto& src = workflow.tasks[node].id;
          const auto& dst = workflow.tasks[succ].id;
          throw CycleError("workflow '" + workflow.id + "': edge " + src + " -> " + dst +
                               " closes a cycle",
                           src, dst);
        }
        if (mark[succ] == Mark::unvisited) {
          mark[succ] = Mark::active;
          stack.emplace_back(succ, 0);
        }
      } else {
        mark[node] = Mark::done;
        stack.pop_back();
      }
    }
  }
}

void validate_workflow(const WorkflowSpec& workflow) {
  const std::string where = "workflow '" + workflow.id + "'";
  if (workflow.tasks.empty()) throw ConfigError(where + " has no tasks");
  if (!(workflow.timeout > 0.0)) throw ConfigError(where + ": timeout must be > 0");
  if (!(workflow.arrival_time >= 0.0) || !std::isfinite(workflow.arrival_time)) {
    throw ConfigError(where + ": arrival_time must be finite and >= 0");
  }
  std::set<TaskId> seen;
  for (const auto& task : workflow.tasks) {
    if (!seen.insert(task.id).second) throw ConfigError(where + ": duplicate task id '" + task.id + "'");
    if (!(task.cpu_req > 0.0) || !(task.mem_req > 0.0)) {
      throw ConfigError(where + ": task '" + task.id + "' needs positive cpu and memory");
    }
    if (!(task.work >= 0.0) || !std::isfinite(task.work)) {
      throw ConfigError(where + ": task '" + task.id + "' work must be finite and >= 0");
    }
  }
  for (const auto& edge : workflow.edges) {
    if (!(edge.data_mb >= 0.0)) {
      throw ConfigError(where + ": edge " + edge.src + " -> " + edge.dst + " has negative data");
    }
  }
  validate_dag(workflow);
}

}  // namespace spotsched
