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


#ifndef SPOTSCHED_TESTS_HELPERS_HPP_
#define SPOTSCHED_TESTS_HELPERS_HPP_

#include <cmath>
#include <string>
#include <vector>

#include "spotsched/cluster.hpp"
#include "spotsched/workflow.hpp"

namespace spotsched::testing {

inline TaskSpec task(const std::string& id, double work, double cpu = 1.0, double mem = 1.0) {
  return TaskSpec{id, cpu, mem, work};
}

inline WorkflowSpec chain(const std::string& id, const std::vector<double>& work, double data_mb = 0.0,
                          double arrival = 0.0) {
  WorkflowSpec wf;
  wf.id = id;
  wf.arrival_time = arrival;
  for (std::size_t i = 0; i < work.size(); ++i) {
    wf.tasks.push_back(task("t" + std::to_string(i), work[i]));
    if (i > 0) wf.edges.push_back({"t" + std::to_string(i - 1), "t" + std::to_string(i), data_mb});
  }
  return wf;
}

inline WorkflowSpec diamond() {
  WorkflowSpec wf;
  wf.id = "diamond";
  wf.tasks = {task("a", 1), task("b", 1), task("c", 1), task("d", 1)};
  wf.edges = {{"a", "b", 0}, {"a", "c", 0}, {"b", "d", 0}, {"c", "d", 0}};
  return wf;
}

inline NodeSpec node(const std::string& id, double cpu, double mem, double rate, PricingClass pricing,
                     double price) {
  return NodeSpec{id, "custom", cpu, mem, rate, pricing, price};
}

inline bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace spotsched::testing

#endif  // SPOTSCHED_TESTS_HELPERS_HPP_
