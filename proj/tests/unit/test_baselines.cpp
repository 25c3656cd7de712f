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

#include <random>
#include <vector>

#include "helpers.hpp"
#include "spotsched/baselines.hpp"
#include "spotsched/errors.hpp"
#include "spotsched/workload.hpp"

namespace spotsched {
namespace {

Observation idle_observation(const ClusterSpec& cluster) {
  Environment env;
  return *env.reset(cluster, {testing::chain("w", {10})}, 0);
}

TEST(RandomPolicy, SingleFeasibleNode) {
  Observation obs = idle_observation(ClusterSpec::table_one());
  for (std::size_t i = 0; i < obs.nodes.size(); ++i) obs.nodes[i].alive = i == 9;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(random_policy(obs, rng), 9u);
}

TEST(RandomPolicy, UniformOverElevenNodes) {
  const Observation obs = idle_observation(ClusterSpec::table_one());
  std::mt19937_64 rng(2);
  std::vector<int> counts(11, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[random_policy(obs, rng)];
  for (int c : counts) EXPECT_NEAR(c / static_cast<double>(n), 1.0 / 11.0, 0.01);
}

TEST(RandomPolicy, NeverPicksDeadNodes) {
  Observation obs = idle_observation(ClusterSpec::table_one());
  for (std::size_t i = 0; i < obs.nodes.size(); i += 2) obs.nodes[i].alive = false;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5000; ++i) EXPECT_EQ(random_policy(obs, rng) % 2, 1u);
  for (auto& n : obs.nodes) n.alive = false;
  EXPECT_THROW(random_policy(obs, rng), NoFeasibleAction);
}

TEST(RandomPolicy, DeterministicGivenRngState) {
  const Observation obs = idle_observation(ClusterSpec::table_one());
  std::mt19937_64 a(77);
  std::mt19937_64 b(77);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(random_policy(obs, a), random_policy(obs, b));
}

TEST(ScorePolicy, IdleClusterPicksFirstNode) {
  EXPECT_EQ(score_policy(idle_observation(ClusterSpec::table_one())), 0u);
}

TEST(ScorePolicy, PrefersLessAllocatedNode) {
  ClusterSpec c;
  c.nodes = {testing::node("A", 4, 8, 4, PricingClass::on_demand, 0.1),
             testing::node("B", 4, 8, 4, PricingClass::on_demand, 0.1)};
  Observation obs = idle_observation(c);
  obs.nodes[0].cpu_free = 2;  // 50% cpu, 100% memory
  EXPECT_EQ(score_policy(obs), 1u);
  EXPECT_DOUBLE_EQ(least_allocated_score(obs.nodes[0]), 0.75);
  EXPECT_DOUBLE_EQ(least_allocated_score(obs.nodes[1]), 1.0);
  EXPECT_DOUBLE_EQ(least_allocated_score(obs.nodes[0], {1.0, 0.0}), 0.5);
}

TEST(ScorePolicy, RestrictionAndFilter) {
  Observation obs = idle_observation(ClusterSpec::table_one());
  EXPECT_EQ(score_policy(obs, PricingClass::on_demand), 6u);
  obs.nodes[6].alive = false;
  EXPECT_EQ(score_policy(obs, PricingClass::on_demand), 7u);
  for (auto& n : obs.nodes) {
    if (n.pricing == PricingClass::on_demand) n.alive = false;
  }
  EXPECT_THROW(score_policy(obs, PricingClass::on_demand), NoFeasibleAction);
  EXPECT_EQ(score_policy(obs), 0u);
}

TEST(ScorePolicy, Deterministic) {
  Observation obs = idle_observation(ClusterSpec::table_one());
  obs.nodes[0].cpu_free = 1;
  obs.nodes[3].mem_free = 2;
  const std::size_t first = score_policy(obs);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(score_policy(obs), first);
}

TEST(OnDemandBaseline, NeverUsesSpotNodes) {
  WorkloadConfig config;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    config.seed = seed;
    Environment env(baseline_env_options(BaselineKind::on_demand_only));
    bool spot_used = false;
    const SchedulerFn policy = make_baseline(BaselineKind::on_demand_only, seed);
    auto obs = env.reset(ClusterSpec::table_one(30.0), generate(config), seed);
    while (obs) {
      const std::size_t n = policy(*obs);
      spot_used = spot_used || env.cluster().nodes[n].pricing == PricingClass::spot;
      obs = env.step(n).observation;
    }
    EXPECT_FALSE(spot_used);
    EXPECT_EQ(env.stats().interrupted, 0u);
  }
}

TEST(Baselines, NamesRoundTrip) {
  for (BaselineKind kind : {BaselineKind::random, BaselineKind::k8_default, BaselineKind::on_demand_only}) {
    EXPECT_EQ(parse_baseline(to_string(kind)), kind);
  }
  EXPECT_FALSE(parse_baseline("agent").has_value());
  EXPECT_FALSE(parse_baseline("K8-Default").has_value());
}

TEST(Baselines, RandomStreamDependsOnSeed) {
  const Observation obs = idle_observation(ClusterSpec::table_one());
  const SchedulerFn a = make_baseline(BaselineKind::random, 1);
  const SchedulerFn b = make_baseline(BaselineKind::random, 1);
  const SchedulerFn c = make_baseline(BaselineKind::random, 2);
  std::vector<std::size_t> sa, sb, sc;
  for (int i = 0; i < 30; ++i) {
    sa.push_back(a(obs));
    sb.push_back(b(obs));
    sc.push_back(c(obs));
  }
  EXPECT_EQ(sa, sb);
  EXPECT_NE(sa, sc);
}

}  // namespace
}  // namespace spotsched
