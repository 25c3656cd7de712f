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

#include "spotsched/workload.hpp"

#include <cstdio>
#include <random>

#include "spotsched/errors.hpp"

namespace spotsched {

namespace {

void check_range(const std::pair<double, double>& range, const char* name) {
  if (!(range.first > 0.0) || !(range.first <= range.second)) {
    throw ConfigError(std::string(name) + " must satisfy 0 < lo <= hi");
  }
}

double draw(std::mt19937_64& rng, const std::pair<double, double>& range) {
  if (range.first == range.second) return range.first;
  return std::uniform_real_distribution<double>(range.first, range.second)(rng);
}

std::string numbered(const char* prefix, std::size_t n, int width) {
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%s%0*zu", prefix, width, n);
  return buffer;
}

}  // namespace

void WorkloadConfig::validate() const {
  if (count < 1) throw ConfigError("workload count must be >= 1");
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  check_range(work_range, "work_range");
  check_range(interarrival_range, "interarrival_range");
  if (!(data_mb >= 0.0)) throw ConfigError("data_mb must be >= 0");
  if (!(cpu_req > 0.0) || !(mem_req > 0.0)) throw ConfigError("cpu_req and mem_req must be > 0");
  if (!(timeout > 0.0)) throw ConfigError("timeout must be > 0");
  if (!(anchor_work >= 0.0) || !(anchor_cpu > 0.0) || !(anchor_mem > 0.0)) {
    throw ConfigError("anchor task demands must be positive");
  }
}

std::vector<WorkflowSpec> generate(const WorkloadConfig& config) {
  config.validate();
  std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                    0x3011u};
  std::mt19937_64 rng(seq);

  std::vector<WorkflowSpec> workload;
  workload.reserve(config.count);
  double clock = 0.0;
  for (std::size_t i = 0; i < config.count; ++i) {
    clock += draw(rng, config.interarrival_range);
    WorkflowSpec workflow;
    workflow.id = numbered("wf-", i, 4);
    workflow.arrival_time = clock;
    workflow.timeout = config.timeout;
    workflow.tasks.push_back({"split", config.anchor_cpu, config.anchor_mem, config.anchor_work});
    for (std::size_t m = 0; m < config.parallelism; ++m) {
      TaskSpec map{numbered("map-", m, 3), config.cpu_req, config.mem_req, draw(rng, config.work_range)};
      workflow.edges.push_back({"split", map.id, config.data_mb});
      workflow.edges.push_back({map.id, "reduce", config.data_mb});
      workflow.tasks.push_back(std::move(map));
    }
    workflow.tasks.push_back({"reduce", config.anchor_cpu, config.anchor_mem, config.anchor_work});
    workload.push_back(std::move(workflow));
  }
  return workload;
}

}  // namespace spotsched
