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

#include "spotsched/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "spotsched/errors.hpp"
#include "spotsched/io.hpp"

namespace spotsched {

namespace {

constexpr std::uint32_t kTrainStream = 0x7261u;
constexpr std::uint32_t kEvalStream = 0x6576u;

std::string fmt(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

std::string fmt_fixed(double value, int precision) {
  char buffer[48];
  std::snprintf(buffer, sizeof(buffer), "%.*f", precision, value);
  return buffer;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code error;
  std::filesystem::create_directories(dir, error);
  if (error) throw ConfigError("cannot create output directory '" + dir.string() + "': " + error.message());
}

std::string csv_escape(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index, std::uint32_t tag) {
  std::seed_seq seq{static_cast<std::uint32_t>(base), static_cast<std::uint32_t>(base >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), tag};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

WorkloadSource WorkloadSource::generated(WorkloadConfig config) {
  config.validate();
  WorkloadSource source;
  source.config = config;
  return source;
}

WorkloadSource WorkloadSource::fixed_list(std::vector<WorkflowSpec> workflows) {
  WorkloadSource source;
  source.fixed = std::move(workflows);
  return source;
}

WorkloadSource WorkloadSource::load(const std::filesystem::path& path) {
  if (std::filesystem::is_directory(path)) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(path)) {
      if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw ConfigError("'" + path.string() + "' contains no workflow files");
    std::vector<WorkflowSpec> workflows;
    for (const auto& file : files) workflows.push_back(load_workflow(file));
    return fixed_list(std::move(workflows));
  }
  const Json document = read_json_file(path);
  try {
    if (document.is_array()) {
      std::vector<WorkflowSpec> workflows;
      for (const auto& item : document) {
        workflows.push_back(workflow_from_json(item));
        validate_workflow(workflows.back());
      }
      return fixed_list(std::move(workflows));
    }
    if (document.is_object() && document.contains("tasks")) {
      WorkflowSpec workflow = workflow_from_json(document);
      validate_workflow(workflow);
      return fixed_list({std::move(workflow)});
    }
    return generated(workload_config_from_json(document));
  } catch (const Error& error) {
    throw ConfigError("'" + path.string() + "': " + error.what());
  }
}

std::vector<WorkflowSpec> WorkloadSource::for_evaluation(std::uint64_t seed) const {
  if (!config) return fixed;
  WorkloadConfig instance = *config;
  instance.seed = derive_seed(config->seed, seed, kEvalStream);
  return generate(instance);
}

std::vector<WorkflowSpec> WorkloadSource::for_training(std::uint64_t train_seed, std::size_t episode) const {
  if (!config) return fixed;
  WorkloadConfig instance = *config;
  instance.seed = derive_seed(config->seed ^ train_seed, episode, kTrainStream);
  return generate(instance);
}

std::string learning_curve_csv(const std::vector<EpisodeCurvePoint>& curve) {
  std::ostringstream out;
  out << "episode,total_reward,total_cost,mean_execution_time,completed,interrupted,timed_out,failures,steps,"
         "group_actor_loss,node_actor_loss,critic_loss,clip_fraction\n";
  for (const auto& point : curve) {
    out << point.episode << ',' << fmt(point.total_reward) << ',' << fmt(point.total_cost) << ','
        << fmt(point.mean_execution_time) << ',' << point.completed << ',' << point.interrupted << ','
        << point.timed_out << ',' << (point.interrupted + point.timed_out) << ',' << point.steps << ','
        << fmt(point.update.group_actor_loss) << ',' << fmt(point.update.node_actor_loss) << ','
        << fmt(point.update.critic_loss) << ',' << fmt(point.update.clip_fraction) << '\n';
  }
  return out.str();
}

TrainOutput cmd_train(const TrainCommand& command) {
  command.cluster.validate();
  command.train.validate();
  const WorkloadSource& source = command.workload;
  const std::uint64_t seed = command.train.seed;
  const ClusterSpec& cluster = command.cluster;
  EpisodeFactory factory = [&](std::size_t episode) {
    return EpisodeSetup{cluster, source.for_training(seed, episode), derive_seed(seed, episode, kTrainStream)};
  };
  TrainOutput output;
  output.result = train(factory, Agent::create(cluster, seed), command.train);
  output.learning_curve_csv = learning_curve_csv(output.result.curve);
  if (!command.out_dir.empty()) {
    ensure_dir(command.out_dir);
    output.result.agent.save(command.out_dir / "checkpoint.json");
    write_text_file(command.out_dir / "learning_curve.csv", output.learning_curve_csv);
  }
  return output;
}

ComparisonResult cmd_compare(const CompareCommand& command) {
  command.cluster.validate();
  if (command.seeds.empty()) throw ConfigError("compare needs at least one evaluation seed");
  if (command.schedulers.empty()) throw ConfigError("compare needs at least one scheduler");
  for (const auto& name : command.schedulers) {
    if (name == "agent") {
      if (!command.agent) throw ConfigError("scheduler 'agent' requires a checkpoint");
      command.agent->check_layout(command.cluster);
    } else if (!parse_baseline(name)) {
      throw ConfigError("unknown scheduler '" + name + "' (expected agent, random, k8-default, on-demand)");
    }
  }
  if (!command.out_dir.empty()) ensure_dir(command.out_dir);

  ComparisonResult result;
  for (const auto& name : command.schedulers) {
    std::vector<EpisodeStats> episodes;
    for (std::uint64_t seed : command.seeds) {
      EnvOptions options;
      SchedulerFn scheduler;
      if (name == "agent") {
        scheduler = greedy_scheduler(*command.agent);
      } else {
        const BaselineKind kind = *parse_baseline(name);
        options = baseline_env_options(kind);
        scheduler = make_baseline(kind, seed);
      }
      std::ofstream trace;
      if (command.trace && !command.out_dir.empty()) {
        trace.open(command.out_dir / ("trace_" + name + "_" + std::to_string(seed) + ".jsonl"),
                   std::ios::binary | std::ios::trunc);
        options.trace = &trace;
      }
      EpisodeStats stats = run_episode(scheduler, command.cluster, command.workload.for_evaluation(seed), seed, options);
      result.rows.push_back({name, seed, stats.total_cost, stats.mean_execution_time, stats.completed,
                             stats.interrupted, stats.timed_out});
      episodes.push_back(std::move(stats));
    }
    const EvaluationSummary summary = summarize(std::move(episodes));
    result.summaries.push_back({name, summary.mean_cost, summary.std_cost, summary.mean_execution_time,
                                summary.mean_completed, summary.mean_interrupted, summary.mean_timed_out});
  }

  std::ostringstream csv;
  csv << "scheduler,seed,total_cost,mean_execution_time,completed,interrupted,timed_out\n";
  for (const auto& row : result.rows) {
    csv << csv_escape(row.scheduler) << ',' << row.seed << ',' << fmt(row.total_cost) << ','
        << fmt(row.mean_execution_time) << ',' << row.completed << ',' << row.interrupted << ',' << row.timed_out
        << '\n';
  }
  for (const auto& summary : result.summaries) {
    csv << csv_escape(summary.scheduler) << ",mean," << fmt(summary.mean_cost) << ','
        << fmt(summary.mean_execution_time) << ',' << fmt(summary.mean_completed) << ','
        << fmt(summary.mean_interrupted) << ',' << fmt(summary.mean_timed_out) << '\n';
  }
  result.comparison_csv = csv.str();

  std::stable_sort(result.summaries.begin(), result.summaries.end(),
                   [](const SchedulerSummary& a, const SchedulerSummary& b) { return a.mean_cost < b.mean_cost; });
  std::ostringstream table;
  char line[256];
  std::snprintf(line, sizeof(line), "%-12s %14s %12s %14s %10s %12s %10s\n", "scheduler", "mean_cost_usd",
                "std_cost", "mean_exec_s", "completed", "interrupted", "timed_out");
  table << line;
  for (const auto& summary : result.summaries) {
    std::snprintf(line, sizeof(line), "%-12s %14s %12s %14s %10s %12s %10s\n", summary.scheduler.c_str(),
                  fmt_fixed(summary.mean_cost, 6).c_str(), fmt_fixed(summary.std_cost, 6).c_str(),
                  fmt_fixed(summary.mean_execution_time, 2).c_str(), fmt_fixed(summary.mean_completed, 2).c_str(),
                  fmt_fixed(summary.mean_interrupted, 2).c_str(), fmt_fixed(summary.mean_timed_out, 2).c_str());
    table << line;
  }
  result.summary_table = table.str();

  if (!command.out_dir.empty()) {
    write_text_file(command.out_dir / "comparison.csv", result.comparison_csv);
    write_text_file(command.out_dir / "summary.txt", result.summary_table);
  }
  return result;
}

std::vector<std::filesystem::path> cmd_generate(const WorkloadConfig& config, const std::filesystem::path& out_dir) {
  const std::vector<WorkflowSpec> workload = generate(config);
  ensure_dir(out_dir);
  std::vector<std::filesystem::path> paths;
  for (const auto& workflow : workload) {
    const auto path = out_dir / (workflow.id + ".json");
    write_text_file(path, workflow_to_json(workflow).dump(2) + "\n");
    paths.push_back(path);
  }
  return paths;
}

}  // namespace spotsched
