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

#include "spotsched/errors.hpp"
#include "spotsched/workflow.hpp"
#include "spotsched/workload.hpp"

namespace spotsched {
namespace {

TEST(Generate, MapReduceShape) {
  WorkloadConfig config;
  config.parallelism = 3;
  config.count = 4;
  const auto workload = generate(config);
  ASSERT_EQ(workload.size(), 4u);
  for (const auto& wf : workload) {
    EXPECT_EQ(wf.tasks.size(), 5u);
    EXPECT_EQ(wf.edges.size(), 6u);
    EXPECT_NO_THROW(validate_dag(wf));
    EXPECT_EQ(ready_tasks(wf, {}), (std::vector<TaskId>{"split"}));
    EXPECT_EQ(ready_tasks(wf, {"split"}).size(), 3u);
    EXPECT_EQ(ready_tasks(wf, {"split", "map-000", "map-001", "map-002"}), (std::vector<TaskId>{"reduce"}));
  }
  EXPECT_EQ(workload[0].id, "wf-0000");
  EXPECT_EQ(workload[3].id, "wf-0003");
}

TEST(Generate, DegenerateInterarrival) {
  WorkloadConfig config;
  config.interarrival_range = {10, 10};
  config.count = 5;
  const auto workload = generate(config);
  for (std::size_t i = 0; i < workload.size(); ++i) {
    EXPECT_DOUBLE_EQ(workload[i].arrival_time, 10.0 * static_cast<double>(i + 1));
  }
}

TEST(Generate, DegenerateWorkGivesFixedComputeTime) {
  WorkloadConfig config;
  config.work_range = {50, 50};
  for (const auto& wf : generate(config)) {
    for (const auto& t : wf.tasks) {
      if (t.id.rfind("map-", 0) == 0) EXPECT_DOUBLE_EQ(computation_time(t.work, 1.0), 50);
    }
  }
}

TEST(Generate, FieldsFollowConfig) {
  WorkloadConfig config;
  config.data_mb = 12;
  config.cpu_req = 2;
  config.mem_req = 3;
  config.timeout = 99;
  for (const auto& wf : generate(config)) {
    EXPECT_EQ(wf.timeout, 99);
    for (const auto& e : wf.edges) EXPECT_EQ(e.data_mb, 12);
    for (const auto& t : wf.tasks) {
      if (t.id.rfind("map-", 0) != 0) {
        EXPECT_DOUBLE_EQ(t.work, 0.1);
        continue;
      }
      EXPECT_EQ(t.cpu_req, 2);
      EXPECT_EQ(t.mem_req, 3);
      EXPECT_GE(t.work, 50);
      EXPECT_LE(t.work, 200);
    }
  }
}

TEST(Generate, ArrivalsStrictlyIncrease) {
  WorkloadConfig config;
  config.count = 200;
  const auto workload = generate(config);
  for (std::size_t i = 1; i < workload.size(); ++i) {
    EXPECT_GT(workload[i].arrival_time, workload[i - 1].arrival_time);
  }
}

TEST(Generate, InterarrivalMean) {
  WorkloadConfig config;
  config.count = 10000;
  config.parallelism = 1;
  config.seed = 42;
  const auto workload = generate(config);
  const double mean = workload.back().arrival_time / static_cast<double>(workload.size());
  EXPECT_NEAR(mean, 17.5, 0.02 * 17.5);
}

TEST(Generate, DeterministicForSeed) {
  WorkloadConfig config;
  config.seed = 7;
  const auto a = generate(config);
  const auto b = generate(config);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].arrival_time, b[i].arrival_time);
    for (std::size_t t = 0; t < a[i].tasks.size(); ++t) EXPECT_EQ(a[i].tasks[t].work, b[i].tasks[t].work);
  }
  config.seed = 8;
  EXPECT_NE(generate(config)[0].arrival_time, a[0].arrival_time);
}

TEST(WorkloadConfig, ValidateRejectsBadRanges) {
  WorkloadConfig config;
  config.work_range = {0, 10};
  EXPECT_THROW(config.validate(), ConfigError);
  config = {};
  config.interarrival_range = {5, 4};
  EXPECT_THROW(config.validate(), ConfigError);
  config = {};
  config.count = 0;
  EXPECT_THROW(config.validate(), ConfigError);
  config = {};
  config.parallelism = 0;
  EXPECT_THROW(generate(config), ConfigError);
}

}  // namespace
}  // namespace spotsched
