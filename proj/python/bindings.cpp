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

// Python module spotsched._core. Specs cross the boundary as JSON text.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "spotsched/agent.hpp"
#include "spotsched/baselines.hpp"
#include "spotsched/errors.hpp"
#include "spotsched/experiment.hpp"
#include "spotsched/io.hpp"
#include "spotsched/mlp.hpp"
#include "spotsched/ppo.hpp"
#include "spotsched/simulator.hpp"
#include "spotsched/workload.hpp"

namespace py = pybind11;
using namespace spotsched;

namespace {

ClusterSpec cluster_from_text(const std::string& text) {
  ClusterSpec cluster = cluster_from_json(Json::parse(text));
  cluster.validate();
  return cluster;
}

std::vector<WorkflowSpec> workload_from_text(const std::vector<std::string>& texts) {
  std::vector<WorkflowSpec> workload;
  for (const auto& text : texts) {
    workload.push_back(workflow_from_json(Json::parse(text)));
    validate_workflow(workload.back());
  }
  return workload;
}

WorkloadConfig config_from_text(const std::string& text) {
  WorkloadConfig config = workload_config_from_json(Json::parse(text));
  config.validate();
  return config;
}

py::dict observation_dict(const Observation& obs) {
  py::list nodes;
  for (const auto& n : obs.nodes) {
    py::dict node;
    node["cpu_free"] = n.cpu_free;
    node["mem_free"] = n.mem_free;
    node["cpu_capacity"] = n.cpu_capacity;
    node["mem_capacity"] = n.mem_capacity;
    node["rate"] = n.rate;
    node["estimated_wait"] = n.estimated_wait;
    node["unit_cost"] = n.unit_cost;
    node["pricing"] = to_string(n.pricing);
    node["alive"] = n.alive;
    node["eligible"] = n.eligible;
    nodes.append(node);
  }
  py::dict pending;
  pending["workflow"] = obs.pending.workflow;
  pending["workflow_id"] = obs.pending.workflow_id;
  pending["task_index"] = obs.pending.task_index;
  pending["task_id"] = obs.pending.task.id;
  pending["cpu_req"] = obs.pending.task.cpu_req;
  pending["mem_req"] = obs.pending.task.mem_req;
  pending["work"] = obs.pending.task.work;
  pending["ready_time"] = obs.pending.ready_time;
  py::dict out;
  out["time"] = obs.time;
  out["pending"] = pending;
  out["nodes"] = nodes;
  out["feasible"] = obs.feasibility_mask();
  return out;
}

py::dict stats_dict(const EpisodeStats& stats) {
  py::list workflows;
  for (const auto& w : stats.workflows) {
    py::dict d;
    d["makespan"] = w.makespan;
    d["cost"] = w.cost;
    d["outcome"] = to_string(w.outcome);
    workflows.append(d);
  }
  py::dict out;
  out["total_cost"] = stats.total_cost;
  out["mean_execution_time"] = stats.mean_execution_time;
  out["execution_times"] = stats.execution_times;
  out["completed"] = stats.completed;
  out["interrupted"] = stats.interrupted;
  out["timed_out"] = stats.timed_out;
  out["workflows"] = workflows;
  return out;
}

py::object maybe_observation(const std::optional<Observation>& obs) {
  if (!obs) return py::none();
  return observation_dict(*obs);
}

class PyEnvironment {
 public:
  explicit PyEnvironment(const std::optional<std::string>& restrict_to) : env_(options(restrict_to)) {}

  py::object reset(const std::string& cluster, const std::vector<std::string>& workload, std::uint64_t seed) {
    return maybe_observation(env_.reset(cluster_from_text(cluster), workload_from_text(workload), seed));
  }

  py::tuple step(std::size_t node) {
    const StepResult result = env_.step(node);
    return py::make_tuple(maybe_observation(result.observation), result.reward, result.done);
  }

  bool done() const { return env_.done(); }
  double now() const { return env_.now(); }
  py::dict stats() const { return stats_dict(env_.stats()); }

 private:
  static EnvOptions options(const std::optional<std::string>& restrict_to) {
    EnvOptions out;
    if (restrict_to) out.restrict_to = parse_pricing_class(*restrict_to);
    return out;
  }

  Environment env_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Cost-aware workflow scheduling on spot and on-demand clusters";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<InvalidAction>(m, "InvalidAction", base.ptr());
  py::register_exception<InvalidState>(m, "InvalidState", base.ptr());
  py::register_exception<LayoutError>(m, "LayoutError", base.ptr());
  py::register_exception<NoFeasibleAction>(m, "NoFeasibleAction", base.ptr());

  m.def("table_one_cluster", [](double rate) { return cluster_to_json(ClusterSpec::table_one(rate)).dump(); },
        py::arg("interruption_rate_per_hour") = 0.5);
  m.def("default_workload_config", [] { return workload_config_to_json(WorkloadConfig{}).dump(); });
  m.def(
      "generate_workload",
      [](const std::string& config) {
        std::vector<std::string> out;
        for (const auto& wf : generate(config_from_text(config))) out.push_back(workflow_to_json(wf).dump());
        return out;
      },
      py::arg("config"));

  py::class_<PyEnvironment>(m, "Environment")
      .def(py::init<const std::optional<std::string>&>(), py::arg("restrict_to") = py::none())
      .def("reset", &PyEnvironment::reset, py::arg("cluster"), py::arg("workload"), py::arg("seed"))
      .def("step", &PyEnvironment::step, py::arg("node"))
      .def_property_readonly("done", &PyEnvironment::done)
      .def_property_readonly("now", &PyEnvironment::now)
      .def("stats", &PyEnvironment::stats);

  m.def(
      "run_baseline",
      [](const std::string& name, const std::string& cluster, const std::vector<std::string>& workload,
         std::uint64_t seed) {
        const auto kind = parse_baseline(name);
        if (!kind) throw ConfigError("unknown baseline '" + name + "'");
        return stats_dict(run_episode(make_baseline(*kind, seed), cluster_from_text(cluster),
                                      workload_from_text(workload), seed, baseline_env_options(*kind)));
      },
      py::arg("name"), py::arg("cluster"), py::arg("workload"), py::arg("seed"));

  m.def(
      "train",
      [](const std::string& cluster, const std::string& workload_config, std::size_t episodes, std::uint64_t seed) {
        TrainCommand command;
        command.cluster = cluster_from_text(cluster);
        command.workload = WorkloadSource::generated(config_from_text(workload_config));
        command.train.episodes = episodes;
        command.train.seed = seed;
        TrainOutput output;
        {
          py::gil_scoped_release release;
          output = cmd_train(command);
        }
        return py::make_tuple(output.result.agent.to_checkpoint(), output.learning_curve_csv);
      },
      py::arg("cluster"), py::arg("workload_config"), py::arg("episodes") = 300, py::arg("seed") = 0);

  m.def(
      "compare",
      [](const std::string& cluster, const std::string& workload_config, const std::vector<std::string>& schedulers,
         const std::vector<std::uint64_t>& seeds, std::optional<std::string> checkpoint) {
        CompareCommand command;
        command.cluster = cluster_from_text(cluster);
        command.workload = WorkloadSource::generated(config_from_text(workload_config));
        command.schedulers = schedulers;
        command.seeds = seeds;
        if (checkpoint) command.agent = Agent::from_checkpoint(*checkpoint);
        const ComparisonResult result = cmd_compare(command);
        py::list summaries;
        for (const auto& s : result.summaries) {
          py::dict d;
          d["scheduler"] = s.scheduler;
          d["mean_cost"] = s.mean_cost;
          d["std_cost"] = s.std_cost;
          d["mean_execution_time"] = s.mean_execution_time;
          d["mean_completed"] = s.mean_completed;
          d["mean_interrupted"] = s.mean_interrupted;
          d["mean_timed_out"] = s.mean_timed_out;
          summaries.append(d);
        }
        return py::make_tuple(summaries, result.comparison_csv);
      },
      py::arg("cluster"), py::arg("workload_config"), py::arg("schedulers"), py::arg("seeds"),
      py::arg("checkpoint") = py::none());

  m.def(
      "masked_softmax",
      [](const std::vector<double>& logits, std::optional<std::vector<bool>> mask) {
        const Vector x = Eigen::Map<const Vector>(logits.data(), static_cast<Eigen::Index>(logits.size()));
        const Vector p = mask ? masked_softmax(x, &*mask) : masked_softmax(x);
        return std::vector<double>(p.data(), p.data() + p.size());
      },
      py::arg("logits"), py::arg("mask") = py::none());
  m.def("ppo_clip_objective", &ppo_clip_objective, py::arg("ratio"), py::arg("advantage"), py::arg("epsilon"));
  m.def(
      "discounted_returns",
      [](const std::vector<double>& rewards, double discount) { return discounted_returns(rewards, discount); },
      py::arg("rewards"), py::arg("discount"));
}
