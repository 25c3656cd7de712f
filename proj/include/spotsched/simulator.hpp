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

// Discrete-event simulation of workflows on a mixed spot / on-demand cluster,
// exposed as an episodic environment: every observation offers exactly one
// ready task and the scheduler answers with a node.

#ifndef SPOTSCHED_SIMULATOR_HPP_
#define SPOTSCHED_SIMULATOR_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <tuple>
#include <vector>

#include "spotsched/cluster.hpp"
#include "spotsched/workflow.hpp"

namespace spotsched {

// Declaration order is the tie-break priority for simultaneous events.
enum class EventKind : std::uint8_t {
  task_finish = 0,
  node_revive = 1,
  node_interrupt = 2,
  workflow_arrival = 3,
  workflow_timeout = 4,
};

const char* to_string(EventKind kind);

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::task_finish;
  std::uint64_t seq = 0;
  std::size_t workflow = 0;
  std::size_t task = 0;
  std::size_t node = 0;
  std::uint64_t attempt = 0;  // task_finish only; stale after cancellation

  // Ordering key used by the queue: (time, kind, seq).
  friend bool operator>(const Event& a, const Event& b) {
    return std::tie(a.time, a.kind, a.seq) > std::tie(b.time, b.kind, b.seq);
  }
};

struct NodeObservation {
  double cpu_free = 0.0;
  double mem_free = 0.0;
  double cpu_capacity = 0.0;
  double mem_capacity = 0.0;
  double rate = 0.0;
  double estimated_wait = 0.0;
  double unit_cost = 0.0;
  PricingClass pricing = PricingClass::on_demand;
  bool alive = true;
  bool eligible = true;  // false when the episode restricts placement to another class
};

struct PendingTask {
  std::size_t workflow = 0;
  std::size_t task_index = 0;
  WorkflowId workflow_id;
  TaskSpec task;
  double ready_time = 0.0;
};

struct Observation {
  PendingTask pending;
  std::vector<NodeObservation> nodes;  // cluster config order
  double time = 0.0;

  bool feasible(std::size_t node) const;
  std::vector<bool> feasibility_mask() const;
};

struct StepResult {
  std::optional<Observation> observation;  // empty once done
  double reward = 0.0;                     // negated cost of the placement
  bool done = false;
};

struct EpisodeStats {
  std::vector<WorkflowStats> workflows;   // workload order
  std::vector<double> execution_times;    // makespan - arrival, completed workflows only
  double total_cost = 0.0;
  double mean_execution_time = 0.0;  // over completed workflows
  std::size_t completed = 0;
  std::size_t interrupted = 0;
  std::size_t timed_out = 0;
};

struct EnvOptions {
  std::optional<PricingClass> restrict_to;
  double dead_wait_sentinel = kDeadNodeWait;
  std::ostream* trace = nullptr;  // line-delimited JSON event records
};

class Environment {
 public:
  enum class TaskState { waiting, ready, placed, finished, cancelled };

  struct TaskRecord {
    TaskState state = TaskState::waiting;
    std::optional<std::size_t> node;
    double ready_time = 0.0;
    double placement_time = 0.0;
    std::uint64_t attempt = 0;
    bool billed = false;
    TaskTiming timing;
  };

  enum class WorkflowState { not_arrived, active, completed, failed_interrupted, failed_timeout };

  struct WorkflowRecord {
    WorkflowState state = WorkflowState::not_arrived;
    std::vector<TaskRecord> tasks;
    std::vector<std::size_t> unmet_preds;
    std::size_t finished_tasks = 0;
  };

  using EventHook = std::function<void(const Environment&, const Event&)>;

  explicit Environment(EnvOptions options = {});

  // Starts a new episode; returns the first observation, or nothing when the
  // workload is empty. Throws ConfigError for an invalid cluster or workload.
  std::optional<Observation> reset(ClusterSpec cluster, std::vector<WorkflowSpec> workload,
                                   std::uint64_t seed);

  // Places the pending task. Throws InvalidAction (state unchanged) when the
  // node is dead, ineligible, or cannot fit the task.
  StepResult step(std::size_t node);
  StepResult step(const NodeId& node);

  bool done() const { return done_; }
  double now() const { return now_; }
  const Observation& observation() const;
  EpisodeStats stats() const;

  const ClusterSpec& cluster() const { return cluster_; }
  const ClusterState& cluster_state() const { return state_; }
  const std::vector<WorkflowSpec>& workload() const { return workload_; }
  const std::vector<WorkflowRecord>& workflow_records() const { return records_; }
  const EnvOptions& options() const { return options_; }

  // Called after every processed event.
  void set_event_hook(EventHook hook) { hook_ = std::move(hook); }

 private:
  struct PendingKey {
    double ready_time;
    WorkflowId workflow_id;
    TaskId task_id;
    TaskRef ref;
    friend auto operator<=>(const PendingKey& a, const PendingKey& b) {
      return std::tie(a.ready_time, a.workflow_id, a.task_id, a.ref) <=>
             std::tie(b.ready_time, b.workflow_id, b.task_id, b.ref);
    }
    friend bool operator==(const PendingKey&, const PendingKey&) = default;
  };

  void push_event(Event event);
  void advance();
  bool process(const Event& event);
  void on_arrival(std::size_t workflow);
  bool on_finish(const Event& event);
  bool on_interrupt(std::size_t node);
  void on_revive(std::size_t node);
  bool on_timeout(std::size_t workflow);
  void mark_ready(std::size_t workflow, std::size_t task);
  void fail_workflow(std::size_t workflow, WorkflowState outcome);
  void release(std::size_t node, const TaskRef& ref);
  bool node_feasible(std::size_t node, const TaskSpec& task) const;
  Observation build_observation(const PendingKey& key) const;
  void trace_event(const Event& event) const;
  void trace_placement(const TaskRef& ref, std::size_t node) const;

  EnvOptions options_;
  ClusterSpec cluster_;
  ClusterState state_;
  std::vector<WorkflowSpec> workload_;
  std::vector<WorkflowGraph> graphs_;
  std::vector<WorkflowRecord> records_;
  std::vector<std::mt19937_64> interruption_rngs_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::set<PendingKey> pending_;
  std::optional<PendingKey> offered_;
  std::optional<Observation> observation_;
  std::uint64_t seq_ = 0;
  std::size_t unresolved_ = 0;
  double now_ = 0.0;
  bool done_ = true;
  EventHook hook_;
};

using SchedulerFn = std::function<std::size_t(const Observation&)>;

// Drives reset/step to completion with the given scheduler.
EpisodeStats run_episode(const SchedulerFn& scheduler, const ClusterSpec& cluster,
                         const std::vector<WorkflowSpec>& workload, std::uint64_t seed,
                         const EnvOptions& options = {});

}  // namespace spotsched

#endif  // SPOTSCHED_SIMULATOR_HPP_
