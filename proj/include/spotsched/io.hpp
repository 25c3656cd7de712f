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

// JSON documents for workflows, clusters and workload configs. Readers reject
// unknown fields and report the offending path in ConfigError messages.

#ifndef SPOTSCHED_IO_HPP_
#define SPOTSCHED_IO_HPP_

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "spotsched/cluster.hpp"
#include "spotsched/workflow.hpp"
#include "spotsched/workload.hpp"

namespace spotsched {

using Json = nlohmann::json;

Json workflow_to_json(const WorkflowSpec& workflow);
WorkflowSpec workflow_from_json(const Json& document);

Json cluster_to_json(const ClusterSpec& cluster);
ClusterSpec cluster_from_json(const Json& document);

Json workload_config_to_json(const WorkloadConfig& config);
WorkloadConfig workload_config_from_json(const Json& document);

// Throws ConfigError naming `path` when the file is missing or malformed.
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

ClusterSpec load_cluster(const std::filesystem::path& path);
WorkflowSpec load_workflow(const std::filesystem::path& path);
WorkloadConfig load_workload_config(const std::filesystem::path& path);

}  // namespace spotsched

#endif  // SPOTSCHED_IO_HPP_
