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

#include "spotsched/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "json.hpp"
#include "spotsched/errors.hpp"

namespace spotsched {

namespace {

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string quoted(const std::string& text) { return nlohmann::json(text).dump(); }

std::mt19937_64 node_stream(std::uint64_t seed, std::size_t node) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(node), 0x51070u};
  return std::mt19937_64(seq);
}

}  // namespace

const char* to_string(EventKind kind) {
  switch (kind) {
    case EventKind::task_finish:
      return "task_finish";
    case EventKind::node_revive:
      return "node_revive";
    case EventKind::node_interrupt:
      return "node_interrupt";
    case EventKind::workflow_arrival:
      return "workflow_arrival";
    case EventKind::workflow_timeout:
      return "workflow_timeout";
  }
  return "unknown";
}

bool Observation::feasible(std::size_t node) const {
  const auto& record = nodes.at(node);
  return record.alive && record.eligible && record.cpu_free >= pending.task.cpu_req &&
         record.mem_free >= pending.task.mem_req;
}

std::vector<bool> Observation::feasibility_mask() const {
  std::vector<bool> mask(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) mask[i] = feasible(i);
  return mask;
}

Environment::Environment(EnvOptions options) : options_(std::move(options)) {}

std::optional<Observation> Environment::reset(ClusterSpec cluster,
                                              std::vector<WorkflowSpec> workload,
                                              std::uint64_t seed) {
  cluster.validate();
  std::set<WorkflowId> ids;
  for (const auto& workflow : workload) {
    validate_workflow(workflow);
    if (!ids.insert(workflow.id).second) {
      throw ConfigError("duplicate workflow id '" + workflow.id + "'");
    }
    for (const auto& task : workflow.tasks) {
      const bool placeable = std::any_of(cluster.nodes.begin(), cluster.nodes.end(), [&](const NodeSpec& n) {
        const bool eligible = !options_.restrict_to || n.pricing == *options_.restrict_to;
        return eligible && n.cpu_capacity >= task.cpu_req && n.mem_capacity >= task.mem_req;
      });
      if (!placeable) {
        throw ConfigError("workflow '" + workflow.id + "': task '" + task.id +
                          "' does not fit on any eligible node");
      }
    }
  }

  cluster_ = std::move(cluster);
  workload_ = std::move(workload);
  state_ = ClusterState::idle(cluster_);
  graphs_.clear();
  records_.clear();
  for (const auto& workflow : workload_) {
    graphs_.push_back(WorkflowGraph::build(workflow));
    WorkflowRecord record;
    record.tasks.resize(workflow.tasks.size());
    record.unmet_preds.resize(workflow.tasks.size());
    for (std::size_t t = 0; t < workflow.tasks.size(); ++t) {
      record.unmet_preds[t] = graphs_.back().preds[t].size();
    }
    records_.push_back(std::move(record));
  }
  events_ = {};
  pending_.clear();
  offered_.reset();
  observation_.reset();
  seq_ = 0;
  now_ = 0.0;
  unresolved_ = workload_.size();
  done_ = false;

  for (std::size_t w = 0; w < workload_.size(); ++w) {
    Event arrival;
    arrival.time = workload_[w].arrival_time;
    arrival.kind = EventKind::workflow_arrival;
    arrival.workflow = w;
    push_event(arrival);
  }
  interruption_rngs_.clear();
  for (std::size_t n = 0; n < cluster_.nodes.size(); ++n) {
    interruption_rngs_.push_back(node_stream(seed, n));
    if (cluster_.nodes[n].pricing != PricingClass::spot) continue;
    const double gap = sample_next_interruption(cluster_.interruption_rate_per_hour, interruption_rngs_[n]);
    state_.nodes[n].next_interruption = gap;
    if (std::isfinite(gap)) {
      Event interrupt;
      interrupt.time = gap;
      interrupt.kind = EventKind::node_interrupt;
      interrupt.node = n;
      push_event(interrupt);
    }
  }

  advance();
  return observation_;
}

const Observation& Environment::observation() const {
  if (!observation_) throw InvalidState("no task is awaiting placement");
  return *observation_;
}

StepResult Environment::step(const NodeId& node) {
  if (done_ || !offered_) throw InvalidState("episode is finished; call reset()");
  return step(cluster_.node_index(node));
}

StepResult Environment::step(std::size_t node) {
  if (done_ || !offered_) throw InvalidState("episode is finished; call reset()");
  if (node >= cluster_.nodes.size()) throw InvalidAction("node index " + std::to_string(node) + " out of range");
  const TaskRef ref = offered_->ref;
  const TaskSpec& task = workload_[ref.workflow].tasks[ref.task];
  if (!node_feasible(node, task)) {
    throw InvalidAction("node '" + cluster_.nodes[node].id + "' cannot host task '" + task.id + "'");
  }

  const NodeSpec& spec = cluster_.nodes[node];
  TaskRecord& record = records_[ref.workflow].tasks[ref.task];
  std::vector<double> transfers;
  for (const auto& incoming : graphs_[ref.workflow].preds[ref.task]) {
    const std::size_t source = *records_[ref.workflow].tasks[incoming.pred].node;
    transfers.push_back(transmission_time(incoming.data_mb,
                                          source == node ? 0.0 : cluster_.bandwidth(source, node),
                                          source == node));
  }
  const double compute = computation_time(task.work, spec.rate);
  const double wait = std::max(0.0, now_ - record.ready_time);
  TaskTiming timing = task_timing(record.ready_time, compute, wait, transfers);
  timing.cost = task_cost(compute, unit_cost_per_second(spec));

  record.state = TaskState::placed;
  record.node = node;
  record.placement_time = now_;
  record.billed = true;
  record.timing = timing;
  ++record.attempt;

  NodeState& target = state_.nodes[node];
  target.cpu_free -= task.cpu_req;
  target.mem_free -= task.mem_req;
  target.running.push_back({ref, task.cpu_req, task.mem_req, task.work, now_ + timing.max_transfer, compute});

  Event finish;
  finish.time = std::max(timing.finish, now_);
  finish.kind = EventKind::task_finish;
  finish.workflow = ref.workflow;
  finish.task = ref.task;
  finish.node = node;
  finish.attempt = record.attempt;
  push_event(finish);

  pending_.erase(*offered_);
  trace_placement(ref, node);

  StepResult result;
  result.reward = -timing.cost;
  advance();
  result.observation = observation_;
  result.done = done_;
  return result;
}

void Environment::push_event(Event event) {
  event.seq = seq_++;
  events_.push(event);
}

void Environment::advance() {
  offered_.reset();
  observation_.reset();
  while (true) {
    while (unresolved_ > 0 && !events_.empty() && events_.top().time <= now_) {
      const Event event = events_.top();
      events_.pop();
      if (process(event)) {
        trace_event(event);
        if (hook_) hook_(*this, event);
      }
    }
    if (unresolved_ == 0) {
      done_ = true;
      return;
    }
    for (const auto& key : pending_) {
      const TaskSpec& task = workload_[key.ref.workflow].tasks[key.ref.task];
      for (std::size_t n = 0; n < cluster_.nodes.size(); ++n) {
        if (node_feasible(n, task)) {
          offered_ = key;
          observation_ = build_observation(key);
          return;
        }
      }
    }
    if (events_.empty()) throw InvalidState("simulation stalled with unresolved workflows");
    now_ = std::max(now_, events_.top().time);
  }
}

bool Environment::process(const Event& event) {
  switch (event.kind) {
    case EventKind::workflow_arrival:
      on_arrival(event.workflow);
      return true;
    case EventKind::task_finish:
      return on_finish(event);
    case EventKind::node_interrupt:
      return on_interrupt(event.node);
    case EventKind::node_revive:
      on_revive(event.node);
      return true;
    case EventKind::workflow_timeout:
      return on_timeout(event.workflow);
  }
  return false;
}

void Environment::on_arrival(std::size_t workflow) {
  WorkflowRecord& record = records_[workflow];
  record.state = WorkflowState::active;
  for (std::size_t t = 0; t < record.tasks.size(); ++t) {
    if (record.unmet_preds[t] == 0) mark_ready(workflow, t);
  }
  const double deadline = now_ + workload_[workflow].timeout;
  if (std::isfinite(deadline)) {
    Event timeout;
    timeout.time = deadline;
    timeout.kind = EventKind::workflow_timeout;
    timeout.workflow = workflow;
    push_event(timeout);
  }
}

void Environment::mark_ready(std::size_t workflow, std::size_t task) {
  TaskRecord& record = records_[workflow].tasks[task];
  record.state = TaskState::ready;
  record.ready_time = now_;
  pending_.insert({now_, workload_[workflow].id, workload_[workflow].tasks[task].id, {workflow, task}});
}

bool Environment::on_finish(const Event& event) {
  WorkflowRecord& workflow = records_[event.workflow];
  TaskRecord& record = workflow.tasks[event.task];
  if (record.state != TaskState::placed || record.attempt != event.attempt) return false;
  release(event.node, {event.workflow, event.task});
  record.state = TaskState::finished;
  ++workflow.finished_tasks;
  for (std::size_t succ : graphs_[event.workflow].succs[event.task]) {
    if (--workflow.unmet_preds[succ] == 0) mark_ready(event.workflow, succ);
  }
  if (workflow.finished_tasks == workflow.tasks.size()) {
    workflow.state = WorkflowState::completed;
    --unresolved_;
  }
  return true;
}

bool Environment::on_interrupt(std::size_t node) {
  if (!state_.nodes[node].alive) return false;
  const std::vector<TaskRef> killed = apply_interruption(cluster_, state_, node, now_);
  for (const auto& ref : killed) fail_workflow(ref.workflow, WorkflowState::failed_interrupted);
  state_.nodes[node].next_interruption = std::numeric_limits<double>::infinity();
  Event revive;
  revive.time = state_.nodes[node].revive_at;
  revive.kind = EventKind::node_revive;
  revive.node = node;
  push_event(revive);
  return true;
}

void Environment::on_revive(std::size_t node) {
  revive_node(cluster_, state_, node);
  const double gap = sample_next_interruption(cluster_.interruption_rate_per_hour, interruption_rngs_[node]);
  state_.nodes[node].next_interruption = now_ + gap;
  if (std::isfinite(gap)) {
    Event interrupt;
    interrupt.time = now_ + gap;
    interrupt.kind = EventKind::node_interrupt;
    interrupt.node = node;
    push_event(interrupt);
  }
}

bool Environment::on_timeout(std::size_t workflow) {
  if (records_[workflow].state != WorkflowState::active) return false;
  fail_workflow(workflow, WorkflowState::failed_timeout);
  return true;
}

void Environment::fail_workflow(std::size_t workflow, WorkflowState outcome) {
  WorkflowRecord& record = records_[workflow];
  if (record.state != WorkflowState::active) return;
  record.state = outcome;
  --unresolved_;
  for (std::size_t t = 0; t < record.tasks.size(); ++t) {
    TaskRecord& task = record.tasks[t];
    switch (task.state) {
      case TaskState::placed:
        release(*task.node, {workflow, t});
        task.state = TaskState::cancelled;
        break;
      case TaskState::ready:
        pending_.erase({task.ready_time, workload_[workflow].id, workload_[workflow].tasks[t].id, {workflow, t}});
        task.state = TaskState::cancelled;
        break;
      case TaskState::waiting:
        task.state = TaskState::cancelled;
        break;
      case TaskState::finished:
      case TaskState::cancelled:
        break;
    }
  }
}

void Environment::release(std::size_t node, const TaskRef& ref) {
  NodeState& target = state_.nodes[node];
  auto it = std::find_if(target.running.begin(), target.running.end(),
                         [&](const RunningTask& running) { return running.ref == ref; });
  if (it == target.running.end()) return;  // already removed by an interruption
  target.cpu_free += it->cpu_req;
  target.mem_free += it->mem_req;
  target.running.erase(it);
  if (target.running.empty()) {
    target.cpu_free = cluster_.nodes[node].cpu_capacity;
    target.mem_free = cluster_.nodes[node].mem_capacity;
  }
}

bool Environment::node_feasible(std::size_t node, const TaskSpec& task) const {
  if (options_.restrict_to && cluster_.nodes[node].pricing != *options_.restrict_to) return false;
  return can_fit(state_.nodes[node], task);
}

Observation Environment::build_observation(const PendingKey& key) const {
  Observation observation;
  observation.time = now_;
  observation.pending.workflow = key.ref.workflow;
  observation.pending.task_index = key.ref.task;
  observation.pending.workflow_id = key.workflow_id;
  observation.pending.task = workload_[key.ref.workflow].tasks[key.ref.task];
  observation.pending.ready_time = key.ready_time;
  observation.nodes.reserve(cluster_.nodes.size());
  for (std::size_t n = 0; n < cluster_.nodes.size(); ++n) {
    const NodeSpec& spec = cluster_.nodes[n];
    const NodeState& state = state_.nodes[n];
    NodeObservation record;
    record.cpu_free = state.cpu_free;
    record.mem_free = state.mem_free;
    record.cpu_capacity = spec.cpu_capacity;
    record.mem_capacity = spec.mem_capacity;
    record.rate = spec.rate;
    record.estimated_wait = estimated_wait(state, spec.rate, now_, options_.dead_wait_sentinel);
    record.unit_cost = unit_cost_per_second(spec);
    record.pricing = spec.pricing;
    record.alive = state.alive;
    record.eligible = !options_.restrict_to || spec.pricing == *options_.restrict_to;
    observation.nodes.push_back(record);
  }
  return observation;
}

void Environment::trace_event(const Event& event) const {
  if (options_.trace == nullptr) return;
  std::ostream& out = *options_.trace;
  out << "{\"time\":" << format_double(event.time) << ",\"kind\":\"" << to_string(event.kind) << "\"";
  switch (event.kind) {
    case EventKind::workflow_arrival:
    case EventKind::workflow_timeout:
      out << ",\"workflow\":" << quoted(workload_[event.workflow].id);
      break;
    case EventKind::task_finish:
      out << ",\"workflow\":" << quoted(workload_[event.workflow].id)
          << ",\"task\":" << quoted(workload_[event.workflow].tasks[event.task].id)
          << ",\"node\":" << quoted(cluster_.nodes[event.node].id);
      break;
    case EventKind::node_interrupt:
    case EventKind::node_revive:
      out << ",\"node\":" << quoted(cluster_.nodes[event.node].id);
      break;
  }
  out << "}\n";
}

void Environment::trace_placement(const TaskRef& ref, std::size_t node) const {
  if (options_.trace == nullptr) return;
  *options_.trace << "{\"time\":" << format_double(now_) << ",\"kind\":\"task_place\""
                  << ",\"workflow\":" << quoted(workload_[ref.workflow].id)
                  << ",\"task\":" << quoted(workload_[ref.workflow].tasks[ref.task].id)
                  << ",\"node\":" << quoted(cluster_.nodes[node].id) << "}\n";
}

EpisodeStats Environment::stats() const {
  EpisodeStats stats;
  double execution_sum = 0.0;
  for (std::size_t w = 0; w < records_.size(); ++w) {
    const WorkflowRecord& record = records_[w];
    WorkflowOutcome outcome = WorkflowOutcome::completed;
    if (record.state == WorkflowState::failed_interrupted) outcome = WorkflowOutcome::failed_interrupted;
    if (record.state == WorkflowState::failed_timeout) outcome = WorkflowOutcome::failed_timeout;

    std::vector<TaskTiming> billed;
    double makespan = 0.0;
    for (const auto& task : record.tasks) {
      if (task.billed) billed.push_back(task.timing);
      if (task.state == TaskState::finished) makespan = std::max(makespan, task.timing.finish);
    }
    WorkflowStats workflow = workflow_stats(billed, outcome);
    workflow.makespan = makespan;
    stats.total_cost += workflow.cost;
    switch (record.state) {
      case WorkflowState::completed:
        ++stats.completed;
        stats.execution_times.push_back(makespan - workload_[w].arrival_time);
        execution_sum += stats.execution_times.back();
        break;
      case WorkflowState::failed_interrupted:
        ++stats.interrupted;
        break;
      case WorkflowState::failed_timeout:
        ++stats.timed_out;
        break;
      default:
        break;
    }
    stats.workflows.push_back(workflow);
  }
  if (stats.completed > 0) stats.mean_execution_time = execution_sum / static_cast<double>(stats.completed);
  return stats;
}

EpisodeStats run_episode(const SchedulerFn& scheduler, const ClusterSpec& cluster,
                         const std::vector<WorkflowSpec>& workload, std::uint64_t seed,
                         const EnvOptions& options) {
  Environment env(options);
  auto observation = env.reset(cluster, workload, seed);
  while (observation) observation = env.step(scheduler(*observation)).observation;
  return env.stats();
}

}  // namespace spotsched
