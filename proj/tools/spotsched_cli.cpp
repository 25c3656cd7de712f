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

// spotsched: train the hierarchical PPO scheduler, compare it with baselines,
// and generate Map-Reduce workloads.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "spotsched/errors.hpp"
#include "spotsched/experiment.hpp"
#include "spotsched/io.hpp"

namespace {

constexpr int kConfigExit = 2;
constexpr int kRuntimeExit = 1;

// Inline workload flags; each one overrides the matching field of --workload.
struct WorkloadFlags {
  std::optional<std::size_t> count;
  std::optional<std::size_t> parallelism;
  std::optional<std::pair<double, double>> work_range;
  std::optional<std::pair<double, double>> interarrival_range;
  std::optional<double> data_mb;
  std::optional<double> timeout;
  std::optional<std::uint64_t> seed;

  void attach(CLI::App& app) {
    app.add_option("--count", count, "Workflows per episode");
    app.add_option("--parallelism", parallelism, "Map tasks per workflow");
    app.add_option("--work-range", work_range, "Map task work range: LO HI");
    app.add_option("--interarrival-range", interarrival_range, "Gap between arrivals in seconds: LO HI");
    app.add_option("--data-mb", data_mb, "Data per edge in MB");
    app.add_option("--timeout", timeout, "Workflow timeout in seconds");
    app.add_option("--workload-seed", seed, "Base seed of the workload generator");
  }

  bool any() const {
    return count || parallelism || work_range || interarrival_range || data_mb || timeout || seed;
  }

  void apply(spotsched::WorkloadConfig& config) const {
    if (count) config.count = *count;
    if (parallelism) config.parallelism = *parallelism;
    if (work_range) config.work_range = *work_range;
    if (interarrival_range) config.interarrival_range = *interarrival_range;
    if (data_mb) config.data_mb = *data_mb;
    if (timeout) config.timeout = *timeout;
    if (seed) config.seed = *seed;
  }
};

spotsched::WorkloadSource resolve_workload(const std::string& path, const WorkloadFlags& flags) {
  if (path.empty()) {
    spotsched::WorkloadConfig config;
    flags.apply(config);
    return spotsched::WorkloadSource::generated(config);
  }
  spotsched::WorkloadSource source = spotsched::WorkloadSource::load(path);
  if (flags.any()) {
    if (!source.config) throw spotsched::ConfigError("inline workload flags need a workload config, not workflow files");
    flags.apply(*source.config);
    source.config->validate();
  }
  return source;
}

spotsched::ClusterSpec resolve_cluster(const std::string& path) {
  if (path.empty()) return spotsched::ClusterSpec::table_one();
  return spotsched::load_cluster(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cost-aware workflow scheduling on spot and on-demand nodes"};
  app.require_subcommand(1);

  // train
  auto* train = app.add_subcommand("train", "Train the hierarchical PPO scheduler");
  std::string train_cluster;
  std::string train_workload;
  std::string train_out;
  WorkloadFlags train_flags;
  spotsched::TrainConfig train_config;
  train->add_option("--cluster", train_cluster, "Cluster config file (default: built-in t4g cluster)");
  train->add_option("--workload", train_workload, "Workload config or workflow file(s)");
  train->add_option("--episodes", train_config.episodes, "Training episodes")->capture_default_str();
  train->add_option("--seed", train_config.seed, "Training seed")->capture_default_str();
  train->add_option("--out", train_out, "Output directory")->required();
  train->add_option("--discount", train_config.discount)->capture_default_str();
  train->add_option("--clip", train_config.clip_epsilon)->capture_default_str();
  train->add_option("--epochs", train_config.epochs)->capture_default_str();
  train->add_option("--minibatch", train_config.minibatch)->capture_default_str();
  train->add_option("--group-lr", train_config.group_actor_lr)->capture_default_str();
  train->add_option("--node-lr", train_config.node_actor_lr)->capture_default_str();
  train->add_option("--critic-lr", train_config.critic_lr)->capture_default_str();
  train->add_option("--entropy", train_config.entropy_weight)->capture_default_str();
  train->add_option("--max-grad-norm", train_config.max_grad_norm)->capture_default_str();
  train_flags.attach(*train);

  // compare
  auto* compare = app.add_subcommand("compare", "Evaluate schedulers on identical seeded workloads");
  std::string compare_cluster;
  std::string compare_workload;
  std::string compare_out;
  std::string checkpoint;
  std::vector<std::string> schedulers;
  std::vector<std::uint64_t> seeds;
  bool trace = false;
  WorkloadFlags compare_flags;
  compare->add_option("--cluster", compare_cluster, "Cluster config file (default: built-in t4g cluster)");
  compare->add_option("--workload", compare_workload, "Workload config or workflow file(s)");
  compare->add_option("--schedulers", schedulers, "agent,random,k8-default,on-demand")
      ->delimiter(',')
      ->required();
  compare->add_option("--checkpoint", checkpoint, "Policy checkpoint for the 'agent' scheduler");
  compare->add_option("--seeds", seeds, "Evaluation seeds, comma separated")->delimiter(',')->required();
  compare->add_option("--out", compare_out, "Output directory")->required();
  compare->add_flag("--trace", trace, "Write per-episode event traces");
  compare_flags.attach(*compare);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a generated workload as workflow files");
  std::string gen_config;
  std::string gen_out;
  WorkloadFlags gen_flags;
  gen->add_option("--config", gen_config, "Workload config file");
  gen->add_option("--out", gen_out, "Output directory")->required();
  gen_flags.attach(*gen);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      spotsched::TrainCommand command{resolve_cluster(train_cluster), resolve_workload(train_workload, train_flags),
                                      train_config, train_out};
      const auto output = spotsched::cmd_train(command);
      const auto& curve = output.result.curve;
      if (!curve.empty()) {
        std::cout << "trained " << curve.size() << " episodes; last episode cost " << curve.back().total_cost
                  << " USD\n";
      }
      std::cout << "wrote " << (std::filesystem::path(train_out) / "checkpoint.json").string() << " and "
                << (std::filesystem::path(train_out) / "learning_curve.csv").string() << "\n";
    } else if (*compare) {
      spotsched::CompareCommand command;
      command.cluster = resolve_cluster(compare_cluster);
      command.workload = resolve_workload(compare_workload, compare_flags);
      command.schedulers = schedulers;
      if (!checkpoint.empty()) command.agent = spotsched::Agent::load(checkpoint);
      command.seeds = seeds;
      command.out_dir = compare_out;
      command.trace = trace;
      const auto result = spotsched::cmd_compare(command);
      std::cout << result.summary_table;
    } else if (*gen) {
      spotsched::WorkloadConfig config =
          gen_config.empty() ? spotsched::WorkloadConfig{} : spotsched::load_workload_config(gen_config);
      gen_flags.apply(config);
      const auto paths = spotsched::cmd_generate(config, gen_out);
      std::cout << "wrote " << paths.size() << " workflow files to " << gen_out << "\n";
    }
  } catch (const spotsched::ConfigError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kConfigExit;
  } catch (const spotsched::LayoutError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kConfigExit;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return kRuntimeExit;
  }
  return 0;
}
