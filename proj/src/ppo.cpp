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

#include "spotsched/ppo.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spotsched/errors.hpp"

namespace spotsched {

void TrainConfig::validate() const {
  if (!(discount > 0.0 && discount < 1.0)) throw ConfigError("discount must lie in (0, 1)");
  if (!(clip_epsilon > 0.0)) throw ConfigError("clip epsilon must be > 0");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (minibatch < 1) throw ConfigError("minibatch size must be >= 1");
  if (!(group_actor_lr > 0.0) || !(node_actor_lr > 0.0) || !(critic_lr > 0.0)) {
    throw ConfigError("learning rates must be > 0");
  }
  if (!(entropy_weight >= 0.0)) throw ConfigError("entropy weight must be >= 0");
  if (!(max_grad_norm >= 0.0)) throw ConfigError("gradient clip norm must be >= 0");
}

std::vector<double> discounted_returns(std::span<const double> rewards, double discount) {
  if (!(discount > 0.0 && discount < 1.0)) throw InvalidArgument("discount must lie in (0, 1)");
  std::vector<double> returns(rewards.size());
  double running = 0.0;
  for (std::size_t t = rewards.size(); t-- > 0;) {
    running = rewards[t] + discount * running;
    returns[t] = running;
  }
  return returns;
}

std::vector<double> advantages(std::span<const double> returns, std::span<const double> values,
                               bool normalize) {
  if (returns.size() != values.size()) throw InvalidArgument("returns and values differ in length");
  std::vector<double> adv(returns.size());
  for (std::size_t t = 0; t < adv.size(); ++t) adv[t] = returns[t] - values[t];
  if (!normalize || adv.size() < 2) return adv;
  const double n = static_cast<double>(adv.size());
  const double mean = std::accumulate(adv.begin(), adv.end(), 0.0) / n;
  double var = 0.0;
  for (double a : adv) var += (a - mean) * (a - mean);
  const double stddev = std::sqrt(var / n);
  if (stddev < 1e-12) return adv;
  for (double& a : adv) a = (a - mean) / stddev;
  return adv;
}

double ppo_clip_objective(double ratio, double advantage, double epsilon) {
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

void RolloutBuffer::finish(double discount) {
  std::vector<double> rewards;
  std::vector<double> values;
  rewards.reserve(transitions.size());
  values.reserve(transitions.size());
  for (const auto& transition : transitions) {
    rewards.push_back(transition.reward);
    values.push_back(transition.value);
  }
  returns = discounted_returns(rewards, discount);
  advantages = spotsched::advantages(returns, values);
}

void RolloutBuffer::clear() {
  transitions.clear();
  returns.clear();
  advantages.clear();
}

ActorLoss actor_loss(const Mlp& actor, std::span<const PolicySample> samples, double epsilon,
                     double entropy_weight, Vector* grad) {
  ActorLoss report;
  if (samples.empty()) return report;
  const double scale = 1.0 / static_cast<double>(samples.size());
  Mlp::Cache cache;
  std::size_t clipped = 0;
  for (const auto& sample : samples) {
    const Vector logits = actor.logits(*sample.state, grad != nullptr ? &cache : nullptr);
    const Vector probs = masked_softmax(logits, sample.mask);
    const double logp = std::log(probs[static_cast<Eigen::Index>(sample.action)]);
    const double ratio = std::exp(logp - sample.old_logp);
    const double unclipped = ratio * sample.advantage;
    const double objective = ppo_clip_objective(ratio, sample.advantage, epsilon);
    if (std::abs(ratio - 1.0) > epsilon) ++clipped;

    double entropy = 0.0;
    for (Eigen::Index j = 0; j < probs.size(); ++j) {
      if (probs[j] > 0.0) entropy -= probs[j] * std::log(probs[j]);
    }
    report.surrogate += scale * objective;
    report.entropy += scale * entropy;

    if (grad == nullptr) continue;
    Vector grad_logits = Vector::Zero(logits.size());
    // The min picks the unclipped branch whenever it is not larger; only that branch depends on the policy.
    if (unclipped <= objective) {
      for (Eigen::Index j = 0; j < probs.size(); ++j) {
        if (probs[j] == 0.0) continue;
        const double dlogp = (static_cast<std::size_t>(j) == sample.action ? 1.0 : 0.0) - probs[j];
        grad_logits[j] -= scale * sample.advantage * ratio * dlogp;
      }
    }
    if (entropy_weight > 0.0) {
      for (Eigen::Index j = 0; j < probs.size(); ++j) {
        if (probs[j] == 0.0) continue;
        const double dentropy = -probs[j] * (std::log(probs[j]) + entropy);
        grad_logits[j] -= scale * entropy_weight * dentropy;
      }
    }
    actor.backward(cache, grad_logits, *grad);
  }
  report.loss = -report.surrogate - entropy_weight * report.entropy;
  report.clip_fraction = static_cast<double>(clipped) * scale;
  return report;
}

double critic_loss(const Mlp& critic, std::span<const ValueSample> samples, Vector* grad) {
  if (samples.empty()) return 0.0;
  const double scale = 1.0 / static_cast<double>(samples.size());
  Mlp::Cache cache;
  double loss = 0.0;
  for (const auto& sample : samples) {
    const Vector out = critic.logits(*sample.state, grad != nullptr ? &cache : nullptr);
    const double error = out[0] - sample.target;
    loss += scale * error * error;
    if (grad != nullptr) {
      Vector grad_out(1);
      grad_out[0] = 2.0 * scale * error;
      critic.backward(cache, grad_out, *grad);
    }
  }
  return loss;
}

PolicyOptimizers PolicyOptimizers::create(const PolicySet& policies, const TrainConfig& config) {
  PolicyOptimizers optimizers;
  optimizers.group_actor = Adam(policies.group_actor.parameters().size(), config.group_actor_lr);
  for (const auto& actor : policies.node_actors) {
    optimizers.node_actors.emplace_back(actor.parameters().size(), config.node_actor_lr);
  }
  optimizers.critic = Adam(policies.critic.parameters().size(), config.critic_lr);
  return optimizers;
}

namespace {

void apply_step(Mlp& net, Adam& optimizer, Vector& grad, double max_grad_norm) {
  clip_grad_norm(grad, max_grad_norm);
  optimizer.step(net.parameters(), grad);
  if (!net.finite()) throw NumericError("parameters became non-finite during an update");
}

}  // namespace

UpdateReport update(PolicySet& policies, PolicyOptimizers& optimizers, const RolloutBuffer& buffer,
                    const TrainConfig& config, std::mt19937_64& rng) {
  if (buffer.empty()) throw InvalidState("cannot update from an empty rollout buffer");
  if (buffer.returns.size() != buffer.size() || buffer.advantages.size() != buffer.size()) {
    throw InvalidState("rollout buffer has no returns/advantages; call finish() first");
  }
  const std::size_t groups = policies.node_actors.size();
  UpdateReport report;
  report.node_actor_steps.assign(groups, 0);

  std::vector<std::size_t> order(buffer.size());
  std::iota(order.begin(), order.end(), 0);
  double group_loss_sum = 0.0;
  double node_loss_sum = 0.0;
  double critic_loss_sum = 0.0;
  double clip_sum = 0.0;
  std::size_t node_loss_count = 0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t begin = 0; begin < order.size(); begin += config.minibatch) {
      const std::size_t end = std::min(order.size(), begin + config.minibatch);
      std::vector<PolicySample> group_samples;
      std::vector<std::vector<PolicySample>> node_samples(groups);
      std::vector<ValueSample> value_samples;
      for (std::size_t k = begin; k < end; ++k) {
        const std::size_t i = order[k];
        const Transition& tr = buffer.transitions[i];
        const double adv = buffer.advantages[i];
        group_samples.push_back({&tr.state, &tr.group_mask, tr.group, tr.logp_group, adv});
        node_samples.at(tr.group).push_back({&tr.state, &tr.node_mask, tr.slot, tr.logp_node, adv});
        value_samples.push_back({&tr.state, buffer.returns[i]});
      }

      Vector grad = Vector::Zero(policies.group_actor.parameters().size());
      const ActorLoss group = actor_loss(policies.group_actor, group_samples, config.clip_epsilon,
                                         config.entropy_weight, &grad);
      apply_step(policies.group_actor, optimizers.group_actor, grad, config.max_grad_norm);
      ++report.group_actor_steps;
      group_loss_sum += group.loss;
      clip_sum += group.clip_fraction;

      for (std::size_t g = 0; g < groups; ++g) {
        if (node_samples[g].empty()) continue;
        Mlp& actor = policies.node_actors[g];
        grad = Vector::Zero(actor.parameters().size());
        const ActorLoss node = actor_loss(actor, node_samples[g], config.clip_epsilon,
                                          config.entropy_weight, &grad);
        apply_step(actor, optimizers.node_actors[g], grad, config.max_grad_norm);
        ++report.node_actor_steps[g];
        node_loss_sum += node.loss;
        ++node_loss_count;
      }

      grad = Vector::Zero(policies.critic.parameters().size());
      critic_loss_sum += critic_loss(policies.critic, value_samples, &grad);
      apply_step(policies.critic, optimizers.critic, grad, config.max_grad_norm);
      ++report.critic_steps;
    }
  }
  const double steps = static_cast<double>(report.group_actor_steps);
  report.group_actor_loss = group_loss_sum / steps;
  report.critic_loss = critic_loss_sum / steps;
  report.clip_fraction = clip_sum / steps;
  if (node_loss_count > 0) report.node_actor_loss = node_loss_sum / static_cast<double>(node_loss_count);
  return report;
}

}  // namespace spotsched
