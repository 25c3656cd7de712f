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

// Experiment commands behind the CLI: train, compare, generate.

#ifndef SPOTSCHED_EXPERIMENT_HPP_
#define SPOTSCHED_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "spotsched/agent.hpp"
#include "spotsched/baselines.hpp"
#include "spotsched/cluster.hpp"
#include "spotsched/ppo.hpp"
#include "spotsched/workload.hpp"

namespace spotsched {

// Deterministic 64-bit mix of a base seed, an index and a stream tag.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index, std::uint32_t tag);

// Either a generator config (one workload per seed) or a fixed list of workflows.
struct WorkloadSource {
  std::optional<WorkloadConfig> config;
  std::vector<WorkflowSpec> fixed;

  static WorkloadSource generated(WorkloadConfig config);
  static WorkloadSource fixed_list(std::vector<WorkflowSpec> workflows);
  // A workload config document, a workflow document, an array of workflow
  // documents, or a directory of workflow files.
  static WorkloadSource load(const std::filesystem::path& path);

  std::vector<WorkflowSpec> for_evaluation(std::uint64_t seed) const;
  std::vector<WorkflowSpec> for_training(std::uint64_t train_seed, std::size_t episode) const;
};

struct MetricsRow {
  std::string scheduler;
  std::uint64_t seed = 0;
  double total_cost = 0.0;
  double mean_execution_time = 0.0;
  std::size_t completed = 0;
  std::size_t interrupted = 0;
  std::size_t timed_out = 0;
};

struct SchedulerSummary {
  std::string scheduler;
  double mean_cost = 0.0;
  double std_cost = 0.0;
  double mean_execution_time = 0.0;
  double mean_completed = 0.0;
  double mean_interrupted = 0.0;
  double mean_timed_out = 0.0;
};

struct ComparisonResult {
  std::vector<MetricsRow> rows;             // (scheduler order, seed order)
  std::vector<SchedulerSummary> summaries;  // ascending mean cost, stable
  std::string comparison_csv;
  std::string summary_table;
};

struct TrainCommand {
  ClusterSpec cluster;
  WorkloadSource workload;
  TrainConfig train;
  std::filesystem::path out_dir;
};

struct TrainOutput {
  TrainResult result;
  std::string learning_curve_csv;
};

// Writes checkpoint.json and learning_curve.csv to out_dir.
TrainOutput cmd_train(const TrainCommand& command);

std::string learning_curve_csv(const std::vector<EpisodeCurvePoint>& curve);

struct CompareCommand {
  ClusterSpec cluster;
  WorkloadSource workload;
  std::vector<std::string> schedulers;  // "agent", "random", "k8-default", "on-demand"
  std::optional<Agent> agent;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path out_dir;  // empty: nothing written
  bool trace = false;             // per-episode event traces in out_dir
};

// Runs every scheduler on identical per-seed workloads and interruption streams.
// Writes comparison.csv and summary.txt to out_dir.
ComparisonResult cmd_compare(const CompareCommand& command);

// Writes one <workflow id>.json per generated workflow; returns the paths.
std::vector<std::filesystem::path> cmd_generate(const WorkloadConfig& config, const std::filesystem::path& out_dir);

}  // namespace spotsched

#endif  // SPOTSCHED_EXPERIMENT_HPP_
