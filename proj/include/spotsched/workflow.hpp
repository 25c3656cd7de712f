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

// Workflow DAGs and the per-task timing / cost model.
//
// Units: time in seconds, work in work-units (1 unit = 1 s on a rate-1 node),
// data in megabytes, money in dollars.

#ifndef SPOTSCHED_WORKFLOW_HPP_
#define SPOTSCHED_WORKFLOW_HPP_

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace spotsched {

using TaskId = std::string;
using WorkflowId = std::string;

struct TaskSpec {
  TaskId id;
  double cpu_req = 1.0;  // cores
  double mem_req = 1.0;  // GB
  double work = 0.0;     // work-units
};

struct EdgeSpec {
  TaskId src;
  TaskId dst;
  double data_mb = 0.0;
};

struct WorkflowSpec {
  WorkflowId id;
  std::vector<TaskSpec> tasks;
  std::vector<EdgeSpec> edges;
  double arrival_time = 0.0;
  double timeout = 3600.0;

  std::optional<std::size_t> task_index(const TaskId& task) const;
};

// Index-based adjacency of a validated workflow, built once per workflow.
struct WorkflowGraph {
  struct Incoming {
    std::size_t pred;
    double data_mb;
  };
  std::vector<std::vector<Incoming>> preds;
  std::vector<std::vector<std::size_t>> succs;

  static WorkflowGraph build(const WorkflowSpec& workflow);
};

struct TaskTiming {
  double start = 0.0;         // ST: instant the task became eligible
  double compute = 0.0;       // CT
  double wait = 0.0;          // WT
  double max_transfer = 0.0;  // max TT over predecessors
  double delay = 0.0;         // TD = CT + WT + max TT
  double finish = 0.0;        // FT = ST + TD
  double cost = 0.0;          // CC
};

enum class WorkflowOutcome { completed, failed_interrupted, failed_timeout };

const char* to_string(WorkflowOutcome outcome);

struct WorkflowStats {
  double makespan = 0.0;  // MT, absolute simulation time of the last finish
  double cost = 0.0;      // MC
  WorkflowOutcome outcome = WorkflowOutcome::completed;
};

double computation_time(double work, double rate);

// Transfer between two distinct nodes.
double transmission_time(double data_mb, double bandwidth);
// Same-node transfers are free regardless of bandwidth.
double transmission_time(double data_mb, double bandwidth, bool same_node);

TaskTiming task_timing(double start, double compute, double wait,
                       std::span<const double> pred_transfers);

double task_cost(double compute, double unit_cost);

// Makespan is the maximum finish, cost the sum of task costs.
WorkflowStats workflow_stats(std::span<const TaskTiming> timings, WorkflowOutcome outcome);

// Tasks whose predecessors are all completed, excluding completed and
// in-flight tasks, sorted by id. Throws ReferenceError on unknown ids.
std::vector<TaskId> ready_tasks(const WorkflowSpec& workflow, const std::set<TaskId>& completed,
                                const std::set<TaskId>& in_flight = {});

// Throws ReferenceError for dangling endpoints, CycleError naming one edge on a cycle.
void validate_dag(const WorkflowSpec& workflow);

// validate_dag plus field invariants (positive demands, unique ids, timeout).
void validate_workflow(const WorkflowSpec& workflow);

}  // namespace spotsched

#endif  // SPOTSCHED_WORKFLOW_HPP_
