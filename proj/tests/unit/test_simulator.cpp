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


#include <gtest/gtest.h>

#include <map>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "spotsched/baselines.hpp"
#include "spotsched/errors.hpp"
#include "spotsched/simulator.hpp"
#include "spotsched/workload.hpp"

namespace spotsched {
namespace {

using testing::chain;
using testing::node;
using testing::task;

ClusterSpec single(double rate = 2, double price = 0.033, PricingClass pricing = PricingClass::spot) {
  ClusterSpec c;
  c.nodes = {node("n0", 2, 8, rate, pricing, price)};
  c.interruption_rate_per_hour = 0;
  return c;
}

ClusterSpec pair_cluster() {
  ClusterSpec c;
  c.nodes = {node("a", 4, 16, 2, PricingClass::on_demand, 0.1), node("b", 4, 16, 4, PricingClass::on_demand, 0.2)};
  c.bandwidth_mbps = 100;
  return c;
}

std::size_t first_feasible(const Observation& obs) {
  for (std::size_t i = 0; i < obs.nodes.size(); ++i) {
    if (obs.feasible(i)) return i;
  }
  throw NoFeasibleAction("none");
}

TEST(Event, OrderedByTimeKindSeq) {
  Event a{1.0, EventKind::task_finish, 5};
  Event b{1.0, EventKind::node_revive, 1};
  Event c{1.0, EventKind::task_finish, 6};
  Event d{0.5, EventKind::workflow_timeout, 9};
  EXPECT_TRUE(b > a);
  EXPECT_TRUE(c > a);
  EXPECT_TRUE(a > d);
  EXPECT_LT(static_cast<int>(EventKind::node_revive), static_cast<int>(EventKind::node_interrupt));
  EXPECT_LT(static_cast<int>(EventKind::node_interrupt), static_cast<int>(EventKind::workflow_arrival));
  EXPECT_LT(static_cast<int>(EventKind::workflow_arrival), static_cast<int>(EventKind::workflow_timeout));
}

TEST(Reset, SingleTaskPendingAtTimeZero) {
  Environment env;
  const auto obs = env.reset(single(), {chain("w", {100})}, 0);
  ASSERT_TRUE(obs.has_value());
  EXPECT_EQ(obs->time, 0.0);
  EXPECT_EQ(obs->pending.task.id, "t0");
  EXPECT_EQ(obs->pending.workflow_id, "w");
  ASSERT_EQ(obs->nodes.size(), 1u);
}

TEST(Reset, EmptyWorkloadIsDone) {
  Environment env;
  EXPECT_FALSE(env.reset(single(), {}, 0).has_value());
  EXPECT_TRUE(env.done());
  EXPECT_EQ(env.stats().workflows.size(), 0u);
}

TEST(Reset, PreQueuesOneArrivalPerWorkflow) {
  WorkloadConfig config;
  config.count = 10;
  Environment env;
  int arrivals = 0;
  env.set_event_hook([&](const Environment&, const Event& e) {
    if (e.kind == EventKind::workflow_arrival) ++arrivals;
  });
  auto obs = env.reset(ClusterSpec::table_one(0), generate(config), 3);
  while (obs) obs = env.step(first_feasible(*obs)).observation;
  EXPECT_EQ(arrivals, 10);
}

TEST(Reset, RejectsInvalidInputs) {
  Environment env;
  ClusterSpec bad = single();
  bad.nodes[0].rate = 0;
  EXPECT_THROW(env.reset(bad, {chain("w", {1})}, 0), ConfigError);
  WorkflowSpec cyc = chain("w", {1, 1});
  cyc.edges.push_back({"t1", "t0", 0});
  EXPECT_THROW(env.reset(single(), {cyc}, 0), CycleError);
  WorkflowSpec huge = chain("w", {1});
  huge.tasks[0].cpu_req = 64;
  EXPECT_THROW(env.reset(single(), {huge}, 0), ConfigError);
  EXPECT_THROW(env.reset(single(), {chain("w", {1}), chain("w", {1})}, 0), ConfigError);
}

TEST(Step, RewardIsNegatedCost) {
  Environment env;
  env.reset(single(2, 0.033), {chain("w", {100})}, 0);
  const StepResult r = env.step(std::size_t{0});
  EXPECT_NEAR(r.reward, -(50 * 0.033 / 3600), 1e-15);
  EXPECT_NEAR(r.reward, -4.5833e-4, 1e-8);
  EXPECT_TRUE(r.done);
  EXPECT_FALSE(r.observation.has_value());
}

TEST(Step, ZeroWorkTaskHasZeroReward) {
  Environment env;
  env.reset(single(), {chain("w", {0})}, 0);
  EXPECT_EQ(env.step(std::size_t{0}).reward, 0.0);
}

TEST(Step, AcceptsNodeIds) {
  Environment env;
  env.reset(pair_cluster(), {chain("w", {8})}, 0);
  env.step(NodeId("b"));
  EXPECT_EQ(*env.workflow_records()[0].tasks[0].node, 1u);
  EXPECT_THROW(Environment().step(NodeId("b")), InvalidState);
}

TEST(Step, InvalidActionLeavesStateUnchanged) {
  ClusterSpec c = pair_cluster();
  c.nodes[0].cpu_capacity = 1;
  WorkflowSpec wf = chain("w", {10});
  wf.tasks[0].cpu_req = 2;
  Environment env;
  env.reset(c, {wf}, 0);
  const Observation before = env.observation();
  EXPECT_THROW(env.step(std::size_t{0}), InvalidAction);
  EXPECT_THROW(env.step(std::size_t{7}), InvalidAction);
  EXPECT_EQ(env.observation().pending.task.id, before.pending.task.id);
  EXPECT_DOUBLE_EQ(env.cluster_state().nodes[1].cpu_free, 4);
  EXPECT_TRUE(env.step(std::size_t{1}).done);
}

TEST(Step, DeadNodeIsInvalid) {
  ClusterSpec c;
  c.nodes = {node("s", 2, 8, 2, PricingClass::spot, 0.03), node("o", 2, 8, 2, PricingClass::on_demand, 0.06)};
  c.interruption_rate_per_hour = 3600.0 * 100;  // interrupts almost immediately
  c.interruption_downtime_s = 1e6;
  WorkflowSpec wf = chain("w", {10});
  wf.arrival_time = 5;
  Environment env;
  const auto obs = env.reset(c, {wf}, 1);
  ASSERT_TRUE(obs.has_value());
  EXPECT_FALSE(obs->nodes[0].alive);
  EXPECT_FALSE(obs->feasible(0));
  EXPECT_EQ(obs->nodes[0].estimated_wait, kDeadNodeWait);
  EXPECT_THROW(env.step(std::size_t{0}), InvalidAction);
}

TEST(RunEpisode, SingleTaskHandTrace) {
  const auto stats = run_episode(first_feasible, single(2, 0.033), {chain("w", {100})}, 0);
  ASSERT_EQ(stats.workflows.size(), 1u);
  EXPECT_DOUBLE_EQ(stats.workflows[0].makespan, 50);
  EXPECT_NEAR(stats.workflows[0].cost, 50 * 0.033 / 3600, 1e-15);
  EXPECT_EQ(stats.completed, 1u);
  EXPECT_DOUBLE_EQ(stats.mean_execution_time, 50);
}

TEST(RunEpisode, CrossNodeTransferAddsDelay) {
  Environment env;
  auto obs = env.reset(pair_cluster(), {chain("w", {4, 8}, 200)}, 0);
  obs = env.step(std::size_t{0}).observation;  // t0 on a: CT 2
  ASSERT_TRUE(obs.has_value());
  EXPECT_DOUBLE_EQ(obs->time, 2);
  env.step(std::size_t{1});  // t1 on b: TT 2, CT 2
  const auto& t1 = env.workflow_records()[0].tasks[1].timing;
  EXPECT_DOUBLE_EQ(t1.max_transfer, 2);
  EXPECT_DOUBLE_EQ(t1.compute, 2);
  EXPECT_DOUBLE_EQ(t1.delay, 4);
  EXPECT_DOUBLE_EQ(t1.finish, 6);
  EXPECT_DOUBLE_EQ(env.stats().workflows[0].makespan, 6);
}

TEST(RunEpisode, SameNodeTransferIsFree) {
  Environment env;
  env.reset(pair_cluster(), {chain("w", {4, 8}, 200)}, 0);
  env.step(std::size_t{0});
  env.step(std::size_t{0});
  const auto& t1 = env.workflow_records()[0].tasks[1].timing;
  EXPECT_EQ(t1.max_transfer, 0.0);
  EXPECT_DOUBLE_EQ(t1.finish, 6);
}

TEST(RunEpisode, DeferredTaskAccruesWait) {
  ClusterSpec c = single(1, 0);
  c.nodes[0].cpu_capacity = 1;
  WorkflowSpec a = chain("a", {10});
  WorkflowSpec b = chain("b", {5});
  Environment env;
  auto obs = env.reset(c, {a, b}, 0);
  EXPECT_EQ(obs->pending.workflow_id, "a");
  obs = env.step(std::size_t{0}).observation;
  ASSERT_TRUE(obs.has_value());
  EXPECT_EQ(obs->pending.workflow_id, "b");
  EXPECT_DOUBLE_EQ(obs->time, 10);
  env.step(std::size_t{0});
  const auto& tb = env.workflow_records()[1].tasks[0].timing;
  EXPECT_DOUBLE_EQ(tb.start, 0);
  EXPECT_DOUBLE_EQ(tb.wait, 10);
  EXPECT_DOUBLE_EQ(tb.finish, 15);
}

TEST(RunEpisode, EstimatedWaitMatchesRealizedResidual) {
  // A 100-work task on a rate-2 node; a second workflow arrives halfway.
  ClusterSpec c = single(2, 0);
  c.nodes[0].cpu_capacity = 4;
  Environment env;
  env.reset(c, {chain("a", {100}), chain("b", {1}, 0, 25)}, 0);
  const auto obs = env.step(std::size_t{0}).observation;
  ASSERT_TRUE(obs.has_value());
  EXPECT_DOUBLE_EQ(obs->time, 25);
  const double estimate = obs->nodes[0].estimated_wait;
  env.step(std::size_t{0});
  const double residual = env.workflow_records()[0].tasks[0].timing.finish - 25;
  EXPECT_DOUBLE_EQ(estimate, 25);
  EXPECT_DOUBLE_EQ(estimate, residual);
}

TEST(RunEpisode, NoInterruptionsMeansNoInterruptedFailures) {
  WorkloadConfig config;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    config.seed = seed;
    const auto stats = run_episode(first_feasible, ClusterSpec::table_one(0), generate(config), seed);
    EXPECT_EQ(stats.interrupted, 0u);
    EXPECT_EQ(stats.completed, config.count);
  }
}

TEST(RunEpisode, InterruptionFailsWorkflowAndKeepsCost) {
  ClusterSpec c;
  c.nodes = {node("s", 2, 8, 1, PricingClass::spot, 3.6)};
  c.interruption_rate_per_hour = 3600.0 / 10.0;  // mean gap 10 s
  c.interruption_downtime_s = 1;
  const auto stats = run_episode(first_feasible, c, {chain("w", {1000, 1})}, 4);
  EXPECT_EQ(stats.interrupted, 1u);
  EXPECT_EQ(stats.completed, 0u);
  EXPECT_NEAR(stats.total_cost, 1000 * 3.6 / 3600, 1e-12);
  EXPECT_EQ(stats.workflows[0].outcome, WorkflowOutcome::failed_interrupted);
}

TEST(RunEpisode, TimeoutFailsWorkflow) {
  WorkflowSpec wf = chain("w", {100, 100});
  wf.timeout = 30;
  const auto stats = run_episode(first_feasible, single(1, 0, PricingClass::on_demand), {wf}, 0);
  EXPECT_EQ(stats.timed_out, 1u);
  EXPECT_EQ(stats.completed, 0u);
  EXPECT_EQ(stats.workflows[0].outcome, WorkflowOutcome::failed_timeout);
  EXPECT_EQ(stats.execution_times.size(), 0u);
}

TEST(RunEpisode, EveryWorkflowCompletesWithoutFailures) {
  WorkloadConfig config;
  config.timeout = 1e12;
  config.count = 30;
  std::mt19937_64 rng(2);
  auto random = [&](const Observation& obs) { return random_policy(obs, rng); };
  const auto stats = run_episode(random, ClusterSpec::table_one(0), generate(config), 9);
  EXPECT_EQ(stats.completed, 30u);
}

TEST(RunEpisode, DeterministicForSeedAndActions) {
  WorkloadConfig config;
  config.count = 15;
  const auto workload = generate(config);
  auto run = [&] {
    std::mt19937_64 rng(17);
    std::ostringstream trace;
    EnvOptions options;
    options.trace = &trace;
    auto stats = run_episode([&](const Observation& obs) { return random_policy(obs, rng); },
                             ClusterSpec::table_one(5.0), workload, 21, options);
    return std::make_pair(stats, trace.str());
  };
  const auto a = run();
  const auto b = run();
  EXPECT_EQ(a.second, b.second);
  EXPECT_EQ(a.first.total_cost, b.first.total_cost);
  EXPECT_EQ(a.first.execution_times, b.first.execution_times);
  EXPECT_EQ(a.first.interrupted, b.first.interrupted);
}

TEST(RunEpisode, ClockNeverMovesBackward) {
  WorkloadConfig config;
  std::mt19937_64 rng(3);
  Environment env;
  double last = 0;
  bool monotone = true;
  env.set_event_hook([&](const Environment& e, const Event& ev) {
    monotone = monotone && ev.time >= last && e.now() >= ev.time;
    last = ev.time;
  });
  auto obs = env.reset(ClusterSpec::table_one(2.0), generate(config), 5);
  while (obs) obs = env.step(random_policy(*obs, rng)).observation;
  EXPECT_TRUE(monotone);
}

TEST(RunEpisode, InterruptionsOnlyHitSpotNodes) {
  WorkloadConfig config;
  std::ostringstream trace;
  EnvOptions options;
  options.trace = &trace;
  std::mt19937_64 rng(8);
  run_episode([&](const Observation& obs) { return random_policy(obs, rng); }, ClusterSpec::table_one(20.0),
              generate(config), 2, options);
  std::istringstream lines(trace.str());
  std::string line;
  int interrupts = 0;
  while (std::getline(lines, line)) {
    if (line.find("\"node_interrupt\"") == std::string::npos) continue;
    ++interrupts;
    EXPECT_NE(line.find("-spot-"), std::string::npos) << line;
  }
  EXPECT_GT(interrupts, 0);
}

TEST(RunEpisode, InterruptionTimesIndependentOfDecisions) {
  WorkloadConfig config;
  const auto workload = generate(config);
  auto interrupt_times = [&](const SchedulerFn& scheduler) {
    std::vector<std::pair<double, std::size_t>> times;
    Environment env;
    env.set_event_hook([&](const Environment&, const Event& e) {
      if (e.kind == EventKind::node_interrupt) times.emplace_back(e.time, e.node);
    });
    auto obs = env.reset(ClusterSpec::table_one(10.0), workload, 6);
    while (obs) obs = env.step(scheduler(*obs)).observation;
    return times;
  };
  const auto a = interrupt_times(first_feasible);
  const auto b = interrupt_times(make_baseline(BaselineKind::random, 3));
  const std::size_t n = std::min(a.size(), b.size());
  ASSERT_GT(n, 0u);
  // Each node's sequence is a prefix of the other's (episodes may end at different times).
  std::map<std::size_t, std::vector<double>> per_a, per_b;
  for (auto [t, node] : a) per_a[node].push_back(t);
  for (auto [t, node] : b) per_b[node].push_back(t);
  for (auto& [node, ta] : per_a) {
    const auto& tb = per_b[node];
    for (std::size_t i = 0; i < std::min(ta.size(), tb.size()); ++i) EXPECT_EQ(ta[i], tb[i]);
  }
}

TEST(Trace, OneRecordPerEvent) {
  std::ostringstream trace;
  EnvOptions options;
  options.trace = &trace;
  run_episode(first_feasible, single(), {chain("w", {2})}, 0, options);
  EXPECT_EQ(trace.str(),
            "{\"time\":0,\"kind\":\"workflow_arrival\",\"workflow\":\"w\"}\n"
            "{\"time\":0,\"kind\":\"task_place\",\"workflow\":\"w\",\"task\":\"t0\",\"node\":\"n0\"}\n"
            "{\"time\":1,\"kind\":\"task_finish\",\"workflow\":\"w\",\"task\":\"t0\",\"node\":\"n0\"}\n");
}

TEST(Restriction, OnlyEligibleNodesAreFeasible) {
  EnvOptions options;
  options.restrict_to = PricingClass::on_demand;
  Environment env(options);
  auto obs = env.reset(ClusterSpec::table_one(), {chain("w", {5})}, 0);
  ASSERT_TRUE(obs.has_value());
  for (std::size_t i = 0; i < obs->nodes.size(); ++i) {
    if (obs->nodes[i].pricing == PricingClass::spot) {
      EXPECT_FALSE(obs->nodes[i].eligible);
      EXPECT_FALSE(obs->feasible(i));
      EXPECT_THROW(env.step(i), InvalidAction);
    }
  }
}

}  // namespace
}  // namespace spotsched
