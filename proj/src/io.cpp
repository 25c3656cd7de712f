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

#include "spotsched/io.hpp"

#include <fstream>
#include <initializer_list>
#include <set>
#include <sstream>

#include "spotsched/errors.hpp"

namespace spotsched {

namespace {

// Rejects fields outside `allowed` and requires every entry of `required`.
void check_fields(const Json& object, const char* what, std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional = {}) {
  if (!object.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
  std::set<std::string> allowed;
  for (const char* key : required) {
    allowed.insert(key);
    if (!object.contains(key)) throw ConfigError(std::string(what) + " is missing field '" + key + "'");
  }
  for (const char* key : optional) allowed.insert(key);
  for (const auto& item : object.items()) {
    if (!allowed.contains(item.key())) {
      throw ConfigError(std::string(what) + " has unknown field '" + item.key() + "'");
    }
  }
}

template <typename T>
T get(const Json& object, const char* key, const char* what) {
  try {
    return object.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string(what) + ": field '" + key + "' has the wrong type");
  }
}

std::pair<double, double> get_range(const Json& object, const char* key) {
  const auto values = get<std::vector<double>>(object, key, "workload config");
  if (values.size() != 2) throw ConfigError(std::string("workload config: '") + key + "' must be [lo, hi]");
  return {values[0], values[1]};
}

}  // namespace

Json workflow_to_json(const WorkflowSpec& workflow) {
  Json tasks = Json::array();
  for (const auto& task : workflow.tasks) {
    tasks.push_back({{"id", task.id}, {"cpu", task.cpu_req}, {"mem_gb", task.mem_req}, {"work", task.work}});
  }
  Json edges = Json::array();
  for (const auto& edge : workflow.edges) {
    edges.push_back({{"src", edge.src}, {"dst", edge.dst}, {"data_mb", edge.data_mb}});
  }
  return {{"id", workflow.id},
          {"arrival_time", workflow.arrival_time},
          {"timeout", workflow.timeout},
          {"tasks", tasks},
          {"edges", edges}};
}

WorkflowSpec workflow_from_json(const Json& document) {
  check_fields(document, "workflow", {"id", "arrival_time", "timeout", "tasks", "edges"});
  WorkflowSpec workflow;
  workflow.id = get<std::string>(document, "id", "workflow");
  workflow.arrival_time = get<double>(document, "arrival_time", "workflow");
  workflow.timeout = get<double>(document, "timeout", "workflow");
  if (!document["tasks"].is_array() || !document["edges"].is_array()) {
    throw ConfigError("workflow: 'tasks' and 'edges' must be arrays");
  }
  for (const auto& item : document["tasks"]) {
    check_fields(item, "task", {"id", "cpu", "mem_gb", "work"});
    workflow.tasks.push_back({get<std::string>(item, "id", "task"), get<double>(item, "cpu", "task"),
                              get<double>(item, "mem_gb", "task"), get<double>(item, "work", "task")});
  }
  for (const auto& item : document["edges"]) {
    check_fields(item, "edge", {"src", "dst", "data_mb"});
    workflow.edges.push_back({get<std::string>(item, "src", "edge"), get<std::string>(item, "dst", "edge"),
                              get<double>(item, "data_mb", "edge")});
  }
  return workflow;
}

Json cluster_to_json(const ClusterSpec& cluster) {
  Json nodes = Json::array();
  for (const auto& node : cluster.nodes) {
    nodes.push_back({{"id", node.id},
                     {"flavor", node.flavor},
                     {"cpu", node.cpu_capacity},
                     {"mem_gb", node.mem_capacity},
                     {"rate", node.rate},
                     {"class", to_string(node.pricing)},
                     {"price_per_hour", node.price_per_hour}});
  }
  Json document = {{"nodes", nodes},
                   {"bandwidth_mbps", cluster.bandwidth_mbps},
                   {"interruption_rate_per_hour", cluster.interruption_rate_per_hour},
                   {"interruption_downtime_s", cluster.interruption_downtime_s}};
  if (!cluster.bandwidth_overrides.empty()) {
    Json overrides = Json::array();
    for (const auto& [pair, mbps] : cluster.bandwidth_overrides) {
      overrides.push_back({{"a", cluster.nodes[pair.first].id}, {"b", cluster.nodes[pair.second].id}, {"mbps", mbps}});
    }
    document["bandwidth_overrides"] = overrides;
  }
  return document;
}

ClusterSpec cluster_from_json(const Json& document) {
  check_fields(document, "cluster",
               {"nodes", "bandwidth_mbps", "interruption_rate_per_hour", "interruption_downtime_s"},
               {"bandwidth_overrides"});
  ClusterSpec cluster;
  if (!document["nodes"].is_array()) throw ConfigError("cluster: 'nodes' must be an array");
  for (const auto& item : document["nodes"]) {
    check_fields(item, "node", {"id", "flavor", "cpu", "mem_gb", "rate", "class", "price_per_hour"});
    NodeSpec node;
    node.id = get<std::string>(item, "id", "node");
    node.flavor = get<std::string>(item, "flavor", "node");
    node.cpu_capacity = get<double>(item, "cpu", "node");
    node.mem_capacity = get<double>(item, "mem_gb", "node");
    node.rate = get<double>(item, "rate", "node");
    node.pricing = parse_pricing_class(get<std::string>(item, "class", "node"));
    node.price_per_hour = get<double>(item, "price_per_hour", "node");
    cluster.nodes.push_back(std::move(node));
  }
  cluster.bandwidth_mbps = get<double>(document, "bandwidth_mbps", "cluster");
  cluster.interruption_rate_per_hour = get<double>(document, "interruption_rate_per_hour", "cluster");
  cluster.interruption_downtime_s = get<double>(document, "interruption_downtime_s", "cluster");
  if (document.contains("bandwidth_overrides")) {
    for (const auto& item : document["bandwidth_overrides"]) {
      check_fields(item, "bandwidth override", {"a", "b", "mbps"});
      try {
        cluster.set_bandwidth(cluster.node_index(get<std::string>(item, "a", "bandwidth override")),
                              cluster.node_index(get<std::string>(item, "b", "bandwidth override")),
                              get<double>(item, "mbps", "bandwidth override"));
      } catch (const ReferenceError& error) {
        throw ConfigError(std::string("bandwidth override: ") + error.what());
      }
    }
  }
  cluster.validate();
  return cluster;
}

Json workload_config_to_json(const WorkloadConfig& config) {
  return {{"count", config.count},
          {"parallelism", config.parallelism},
          {"work_range", {config.work_range.first, config.work_range.second}},
          {"interarrival_range", {config.interarrival_range.first, config.interarrival_range.second}},
          {"data_mb", config.data_mb},
          {"cpu_req", config.cpu_req},
          {"mem_req", config.mem_req},
          {"timeout", config.timeout},
          {"seed", config.seed}};
}

WorkloadConfig workload_config_from_json(const Json& document) {
  // Every field defaults, so partial documents are accepted.
  check_fields(document, "workload config", {},
               {"count", "parallelism", "work_range", "interarrival_range", "data_mb", "cpu_req",
                "mem_req", "timeout", "seed", "anchor_work", "anchor_cpu", "anchor_mem"});
  WorkloadConfig config;
  const char* what = "workload config";
  if (document.contains("count")) config.count = get<std::size_t>(document, "count", what);
  if (document.contains("parallelism")) config.parallelism = get<std::size_t>(document, "parallelism", what);
  if (document.contains("work_range")) config.work_range = get_range(document, "work_range");
  if (document.contains("interarrival_range")) config.interarrival_range = get_range(document, "interarrival_range");
  if (document.contains("data_mb")) config.data_mb = get<double>(document, "data_mb", what);
  if (document.contains("cpu_req")) config.cpu_req = get<double>(document, "cpu_req", what);
  if (document.contains("mem_req")) config.mem_req = get<double>(document, "mem_req", what);
  if (document.contains("timeout")) config.timeout = get<double>(document, "timeout", what);
  if (document.contains("seed")) config.seed = get<std::uint64_t>(document, "seed", what);
  if (document.contains("anchor_work")) config.anchor_work = get<double>(document, "anchor_work", what);
  if (document.contains("anchor_cpu")) config.anchor_cpu = get<double>(document, "anchor_cpu", what);
  if (document.contains("anchor_mem")) config.anchor_mem = get<double>(document, "anchor_mem", what);
  config.validate();
  return config;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& error) {
    throw ConfigError("'" + path.string() + "' is not valid JSON: " + error.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

namespace {

template <typename Fn>
auto load_with_path(const std::filesystem::path& path, Fn&& parse) {
  const Json document = read_json_file(path);
  try {
    return parse(document);
  } catch (const Error& error) {
    throw ConfigError("'" + path.string() + "': " + error.what());
  }
}

}  // namespace

ClusterSpec load_cluster(const std::filesystem::path& path) {
  return load_with_path(path, cluster_from_json);
}

WorkflowSpec load_workflow(const std::filesystem::path& path) {
  return load_with_path(path, [](const Json& document) {
    WorkflowSpec workflow = workflow_from_json(document);
    validate_workflow(workflow);
    return workflow;
  });
}

WorkloadConfig load_workload_config(const std::filesystem::path& path) {
  return load_with_path(path, workload_config_from_json);
}

}  // namespace spotsched
