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

#ifndef SPOTSCHED_WORKLOAD_HPP_
#define SPOTSCHED_WORKLOAD_HPP_

#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "spotsched/workflow.hpp"

namespace spotsched {

// Map-Reduce batch: split -> `parallelism` map tasks -> reduce, with
// uniform-random map sizes and uniform-random gaps between arrivals.
struct WorkloadConfig {
  std::size_t count = 20;
  std::size_t parallelism = 4;
  std::pair<double, double> work_range{50.0, 200.0};
  std::pair<double, double> interarrival_range{5.0, 30.0};
  double data_mb = 50.0;  // on every edge
  double cpu_req = 1.0;   // per map task
  double mem_req = 2.0;   // per map task
  double timeout = 3600.0;
  std::uint64_t seed = 0;

  // Split and reduce anchors.
  double anchor_work = 0.1;
  double anchor_cpu = 0.1;
  double anchor_mem = 0.1;

  void validate() const;  // throws ConfigError
};

std::vector<WorkflowSpec> generate(const WorkloadConfig& config);

}  // namespace spotsched

#endif  // SPOTSCHED_WORKLOAD_HPP_
