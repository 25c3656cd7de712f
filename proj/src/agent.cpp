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

#include "spotsched/agent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <memory>

#include "spotsched/errors.hpp"
#include "spotsched/io.hpp"

namespace spotsched {

namespace {

constexpr const char* kCheckpointFormat = "spotsched-policy";
constexpr int kCheckpointVersion = 1;

std::size_t sample_index(const Vector& probs, std::mt19937_64& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double cumulative = 0.0;
  std::size_t last = 0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    cumulative += probs[i];
    last = static_cast<std::size_t>(i);
    if (u < cumulative) return last;
  }
  return last;
}

std::size_t argmax_index(const Vector& probs) {
  Eigen::Index best = 0;
  probs.maxCoeff(&best);
  return static_cast<std::size_t>(best);
}

Json net_to_json(const Mlp& net) {
  const Vector& params = net.parameters();
  return {{"sizes", net.sizes()},
          {"head", net.head() == Mlp::Head::softmax ? "softmax" : "linear"},
          {"parameters", std::vector<double>(params.data(), params.data() + params.size())}};
}

Mlp net_from_json(const Json& document) {
  const auto sizes = document.at("sizes").get<std::vector<std::size_t>>();
  const auto head = document.at("head").get<std::string>();
  if (head != "softmax" && head != "linear") throw ConfigError("checkpoint: unknown network head '" + head + "'");
  Mlp net(sizes, head == "softmax" ? Mlp::Head::softmax : Mlp::Head::linear);
  const auto params = document.at("parameters").get<std::vector<double>>();
  if (params.size() != static_cast<std::size_t>(net.parameters().size())) {
    throw ConfigError("checkpoint: parameter count does not match layer sizes");
  }
  net.parameters() = Eigen::Map<const Vector>(params.data(), static_cast<Eigen::Index>(params.size()));
  if (!net.finite()) throw ConfigError("checkpoint: non-finite parameters");
  return net;
}

}  // namespace

ActionSpaceLayout ActionSpaceLayout::from_cluster(const ClusterSpec& cluster) {
  ActionSpaceLayout layout;
  for (std::size_t i = 0; i < cluster.nodes.size(); ++i) {
    const std::size_t group = cluster.nodes[i].pricing == PricingClass::spot ? kSpotGroup : kOnDemandGroup;
    layout.groups[group].push_back(i);
  }
  return layout;
}

std::pair<std::size_t, std::size_t> ActionSpaceLayout::locate(std::size_t node) const {
  for (std::size_t g = 0; g < kGroupCount; ++g) {
    auto it = std::find(groups[g].begin(), groups[g].end(), node);
    if (it != groups[g].end()) return {g, static_cast<std::size_t>(it - groups[g].begin())};
  }
  throw ReferenceError("node index " + std::to_string(node) + " is not in the action layout");
}

ScalingConstants ScalingConstants::from_cluster(const ClusterSpec& cluster) {
  ScalingConstants scaling;
  scaling.cpu = 0.0;
  scaling.mem = 0.0;
  double on_demand_cost = 0.0;
  double any_cost = 0.0;
  for (const auto& node : cluster.nodes) {
    scaling.cpu = std::max(scaling.cpu, node.cpu_capacity);
    scaling.mem = std::max(scaling.mem, node.mem_capacity);
    any_cost = std::max(any_cost, unit_cost_per_second(node));
    if (node.pricing == PricingClass::on_demand) {
      on_demand_cost = std::max(on_demand_cost, unit_cost_per_second(node));
    }
  }
  scaling.cost = on_demand_cost > 0.0 ? on_demand_cost : (any_cost > 0.0 ? any_cost : 1.0);
  if (scaling.cpu <= 0.0) scaling.cpu = 1.0;
  if (scaling.mem <= 0.0) scaling.mem = 1.0;
  return scaling;
}

Vector encode(const Observation& observation, const ScalingConstants& scaling) {
  Vector features(static_cast<Eigen::Index>(feature_size(observation.nodes.size())));
  const TaskSpec& task = observation.pending.task;
  features[0] = task.cpu_req / scaling.cpu;
  features[1] = task.mem_req / scaling.mem;
  features[2] = task.work / scaling.work;
  Eigen::Index k = 3;
  for (const auto& node : observation.nodes) {
    features[k++] = node.alive ? node.cpu_free / scaling.cpu : 0.0;
    features[k++] = node.alive ? node.mem_free / scaling.mem : 0.0;
    features[k++] = node.alive ? std::min(node.estimated_wait / scaling.wait, 1.0) : 1.0;
    features[k++] = node.unit_cost / scaling.cost;
    features[k++] = node.alive ? 1.0 : 0.0;
  }
  return features;
}

ActionMasks build_masks(const Observation& observation, const ActionSpaceLayout& layout) {
  ActionMasks masks;
  masks.group.assign(kGroupCount, false);
  for (std::size_t g = 0; g < kGroupCount; ++g) {
    masks.node[g].resize(layout.groups[g].size());
    for (std::size_t s = 0; s < layout.groups[g].size(); ++s) {
      masks.node[g][s] = observation.feasible(layout.groups[g][s]);
      if (masks.node[g][s]) masks.group[g] = true;
    }
  }
  return masks;
}

ActionChoice select_action(const PolicySet& policies, const Vector& features, const ActionMasks& masks,
                           const ActionSpaceLayout& layout, std::mt19937_64& rng, SelectMode mode) {
  const Vector group_probs = policies.group_actor.forward(features, &masks.group);
  ActionChoice choice;
  choice.group = mode == SelectMode::greedy ? argmax_index(group_probs) : sample_index(group_probs, rng);
  const Vector node_probs = policies.node_actors.at(choice.group).forward(features, &masks.node[choice.group]);
  choice.slot = mode == SelectMode::greedy ? argmax_index(node_probs) : sample_index(node_probs, rng);
  choice.node = layout.node_at(choice.group, choice.slot);
  choice.logp_group = std::log(group_probs[static_cast<Eigen::Index>(choice.group)]);
  choice.logp_node = std::log(node_probs[static_cast<Eigen::Index>(choice.slot)]);
  choice.value = policies.critic.value(features);
  return choice;
}

PolicySet make_policy_set(const ActionSpaceLayout& layout, std::size_t features, const NetworkShape& shape,
                          std::mt19937_64& rng) {
  auto sizes_for = [&](std::size_t outputs) {
    std::vector<std::size_t> sizes{features};
    sizes.insert(sizes.end(), shape.hidden.begin(), shape.hidden.end());
    sizes.push_back(outputs);
    return sizes;
  };
  PolicySet policies;
  policies.group_actor = Mlp::orthogonal(sizes_for(kGroupCount), Mlp::Head::softmax, shape.hidden_gain,
                                         shape.policy_output_gain, rng);
  for (std::size_t g = 0; g < kGroupCount; ++g) {
    policies.node_actors.push_back(Mlp::orthogonal(sizes_for(layout.groups[g].size()), Mlp::Head::softmax,
                                                   shape.hidden_gain, shape.policy_output_gain, rng));
  }
  policies.critic =
      Mlp::orthogonal(sizes_for(1), Mlp::Head::linear, shape.hidden_gain, shape.value_output_gain, rng);
  return policies;
}

Agent::Agent(PolicySet policies, ActionSpaceLayout layout, ScalingConstants scaling)
    : policies_(std::move(policies)), layout_(std::move(layout)), scaling_(scaling) {}

Agent Agent::create(const ClusterSpec& cluster, std::uint64_t seed, const NetworkShape& shape) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x1417u};
  std::mt19937_64 rng(seq);
  ActionSpaceLayout layout = ActionSpaceLayout::from_cluster(cluster);
  PolicySet policies = make_policy_set(layout, feature_size(cluster.nodes.size()), shape, rng);
  return Agent(std::move(policies), std::move(layout), ScalingConstants::from_cluster(cluster));
}

ActionChoice Agent::act(const Observation& observation, std::mt19937_64& rng, SelectMode mode) const {
  return select_action(policies_, encode(observation, scaling_), build_masks(observation, layout_), layout_, rng,
                       mode);
}

void Agent::check_layout(const ClusterSpec& cluster) const {
  const ActionSpaceLayout other = ActionSpaceLayout::from_cluster(cluster);
  if (other != layout_) {
    throw LayoutError("policy expects " + std::to_string(layout_.groups[kOnDemandGroup].size()) +
                      " on-demand and " + std::to_string(layout_.groups[kSpotGroup].size()) +
                      " spot nodes in a fixed order; cluster has " +
                      std::to_string(other.groups[kOnDemandGroup].size()) + " and " +
                      std::to_string(other.groups[kSpotGroup].size()));
  }
}

std::string Agent::to_checkpoint() const {
  Json node_actors = Json::array();
  for (const auto& actor : policies_.node_actors) node_actors.push_back(net_to_json(actor));
  const Json document = {
      {"format", kCheckpointFormat},
      {"version", kCheckpointVersion},
      {"layout",
       {{"node_count", layout_.node_count()},
        {"on_demand", layout_.groups[kOnDemandGroup]},
        {"spot", layout_.groups[kSpotGroup]}}},
      {"scaling",
       {{"cpu", scaling_.cpu},
        {"mem", scaling_.mem},
        {"work", scaling_.work},
        {"wait", scaling_.wait},
        {"cost", scaling_.cost}}},
      {"networks",
       {{"group_actor", net_to_json(policies_.group_actor)},
        {"node_actors", node_actors},
        {"critic", net_to_json(policies_.critic)}}},
  };
  return document.dump(1) + "\n";
}

Agent Agent::from_checkpoint(const std::string& text) {
  try {
    const Json document = Json::parse(text);
    if (document.at("format").get<std::string>() != kCheckpointFormat) {
      throw ConfigError("checkpoint: unrecognized format");
    }
    if (document.at("version").get<int>() != kCheckpointVersion) {
      throw ConfigError("checkpoint: unsupported version");
    }
    ActionSpaceLayout layout;
    const Json& layout_doc = document.at("layout");
    layout.groups[kOnDemandGroup] = layout_doc.at("on_demand").get<std::vector<std::size_t>>();
    layout.groups[kSpotGroup] = layout_doc.at("spot").get<std::vector<std::size_t>>();
    if (layout.node_count() != layout_doc.at("node_count").get<std::size_t>()) {
      throw ConfigError("checkpoint: layout node count is inconsistent");
    }
    ScalingConstants scaling;
    const Json& scaling_doc = document.at("scaling");
    scaling.cpu = scaling_doc.at("cpu").get<double>();
    scaling.mem = scaling_doc.at("mem").get<double>();
    scaling.work = scaling_doc.at("work").get<double>();
    scaling.wait = scaling_doc.at("wait").get<double>();
    scaling.cost = scaling_doc.at("cost").get<double>();

    PolicySet policies;
    const Json& networks = document.at("networks");
    policies.group_actor = net_from_json(networks.at("group_actor"));
    for (const auto& actor : networks.at("node_actors")) policies.node_actors.push_back(net_from_json(actor));
    policies.critic = net_from_json(networks.at("critic"));

    const std::size_t features = feature_size(layout.node_count());
    if (policies.node_actors.size() != kGroupCount) throw ConfigError("checkpoint: expected two node actors");
    const bool shapes_ok =
        policies.group_actor.input_size() == features && policies.group_actor.output_size() == kGroupCount &&
        policies.critic.input_size() == features && policies.critic.output_size() == 1 &&
        policies.node_actors[0].input_size() == features && policies.node_actors[1].input_size() == features &&
        policies.node_actors[0].output_size() == layout.groups[0].size() &&
        policies.node_actors[1].output_size() == layout.groups[1].size();
    if (!shapes_ok) throw ConfigError("checkpoint: network shapes do not match the layout");
    return Agent(std::move(policies), std::move(layout), scaling);
  } catch (const nlohmann::json::exception& error) {
    throw ConfigError(std::string("checkpoint: malformed document: ") + error.what());
  }
}

void Agent::save(const std::filesystem::path& path) const { write_text_file(path, to_checkpoint()); }

Agent Agent::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return from_checkpoint(text);
  } catch (const ConfigError& error) {
    throw ConfigError("'" + path.string() + "': " + error.what());
  }
}

TrainResult train(const EpisodeFactory& factory, Agent agent, const TrainConfig& config,
                  const std::function<void(const EpisodeCurvePoint&)>& progress) {
  config.validate();
  std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                    0x7a11u};
  std::mt19937_64 rng(seq);
  PolicyOptimizers optimizers = PolicyOptimizers::create(agent.policies(), config);

  TrainResult result;
  RolloutBuffer buffer;
  for (std::size_t episode = 0; episode < config.episodes; ++episode) {
    EpisodeSetup setup = factory(episode);
    agent.check_layout(setup.cluster);
    Environment env;
    auto observation = env.reset(std::move(setup.cluster), std::move(setup.workload), setup.seed);

    EpisodeCurvePoint point;
    point.episode = episode;
    buffer.clear();
    while (observation) {
      Transition transition;
      transition.state = encode(*observation, agent.scaling());
      const ActionMasks masks = build_masks(*observation, agent.layout());
      const ActionChoice choice =
          select_action(agent.policies(), transition.state, masks, agent.layout(), rng, SelectMode::sample);
      StepResult step = env.step(choice.node);
      transition.group = choice.group;
      transition.slot = choice.slot;
      transition.group_mask = masks.group;
      transition.node_mask = masks.node[choice.group];
      transition.logp_group = choice.logp_group;
      transition.logp_node = choice.logp_node;
      transition.value = choice.value;
      transition.reward = step.reward;
      transition.done = step.done;
      point.total_reward += step.reward;
      buffer.push(std::move(transition));
      observation = std::move(step.observation);
    }

    const EpisodeStats stats = env.stats();
    point.total_cost = stats.total_cost;
    point.mean_execution_time = stats.mean_execution_time;
    point.completed = stats.completed;
    point.interrupted = stats.interrupted;
    point.timed_out = stats.timed_out;
    point.steps = buffer.size();
    if (!buffer.empty()) {
      buffer.finish(config.discount);
      point.update = update(agent.policies(), optimizers, buffer, config, rng);
    }
    result.curve.push_back(point);
    if (progress) progress(point);
  }
  result.agent = std::move(agent);
  return result;
}

EvaluationSummary summarize(std::vector<EpisodeStats> episodes) {
  EvaluationSummary summary;
  summary.episodes = episodes.size();
  if (episodes.empty()) return summary;
  const double n = static_cast<double>(episodes.size());
  for (const auto& stats : episodes) {
    summary.mean_cost += stats.total_cost / n;
    summary.mean_execution_time += stats.mean_execution_time / n;
    summary.mean_completed += static_cast<double>(stats.completed) / n;
    summary.mean_interrupted += static_cast<double>(stats.interrupted) / n;
    summary.mean_timed_out += static_cast<double>(stats.timed_out) / n;
  }
  double var = 0.0;
  for (const auto& stats : episodes) var += (stats.total_cost - summary.mean_cost) * (stats.total_cost - summary.mean_cost);
  summary.std_cost = std::sqrt(var / n);
  summary.per_seed = std::move(episodes);
  return summary;
}

SchedulerFn greedy_scheduler(const Agent& agent) {
  auto shared = std::make_shared<const Agent>(agent);
  return [shared](const Observation& observation) {
    std::mt19937_64 unused;
    return shared->act(observation, unused, SelectMode::greedy).node;
  };
}

EvaluationSummary evaluate(const Agent& agent, const ClusterSpec& cluster,
                           const std::function<std::vector<WorkflowSpec>(std::uint64_t)>& workload,
                           std::span<const std::uint64_t> seeds) {
  agent.check_layout(cluster);
  const SchedulerFn scheduler = greedy_scheduler(agent);
  std::vector<EpisodeStats> episodes;
  for (std::uint64_t seed : seeds) episodes.push_back(run_episode(scheduler, cluster, workload(seed), seed));
  return summarize(std::move(episodes));
}

EvaluationSummary evaluate(const Agent& agent, const ClusterSpec& cluster, const std::vector<WorkflowSpec>& workload,
                           std::span<const std::uint64_t> seeds) {
  return evaluate(
      agent, cluster, [&](std::uint64_t) { return workload; }, seeds);
}

}  // namespace spotsched
