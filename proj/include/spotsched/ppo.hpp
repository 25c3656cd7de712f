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

// PPO machinery for a two-level (group, node) policy with one shared critic.

#ifndef SPOTSCHED_PPO_HPP_
#define SPOTSCHED_PPO_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "spotsched/mlp.hpp"

namespace spotsched {

struct TrainConfig {
  double discount = 0.99;
  double clip_epsilon = 0.2;
  double group_actor_lr = 3e-4;
  double node_actor_lr = 3e-4;
  double critic_lr = 3e-4;
  std::size_t epochs = 4;
  std::size_t minibatch = 64;
  std::size_t episodes = 300;
  double entropy_weight = 0.01;
  double max_grad_norm = 0.5;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

// G_t = r_t + discount * G_{t+1}, zero after the last reward.
std::vector<double> discounted_returns(std::span<const double> rewards, double discount);

// G_t - V(s_t), standardized to zero mean / unit std unless the std is ~0.
std::vector<double> advantages(std::span<const double> returns, std::span<const double> values,
                               bool normalize = true);

double ppo_clip_objective(double ratio, double advantage, double epsilon);

struct Transition {
  Vector state;
  std::size_t group = 0;  // a1
  std::size_t slot = 0;   // a2, index within the group
  Mask group_mask;
  Mask node_mask;  // mask of the selected group
  double logp_group = 0.0;
  double logp_node = 0.0;
  double reward = 0.0;
  double value = 0.0;
  bool done = false;
};

struct RolloutBuffer {
  std::vector<Transition> transitions;
  std::vector<double> returns;
  std::vector<double> advantages;

  std::size_t size() const { return transitions.size(); }
  bool empty() const { return transitions.empty(); }
  void push(Transition transition) { transitions.push_back(std::move(transition)); }
  // Fills returns and normalized advantages from rewards and stored values.
  void finish(double discount);
  void clear();
};

// One group actor, one node actor per group, and the shared critic.
struct PolicySet {
  Mlp group_actor;
  std::vector<Mlp> node_actors;
  Mlp critic;
};

struct PolicySample {
  const Vector* state = nullptr;
  const Mask* mask = nullptr;
  std::size_t action = 0;
  double old_logp = 0.0;
  double advantage = 0.0;
};

struct ValueSample {
  const Vector* state = nullptr;
  double target = 0.0;
};

struct ActorLoss {
  double loss = 0.0;  // -(mean clipped surrogate) - entropy_weight * mean entropy
  double surrogate = 0.0;
  double entropy = 0.0;
  double clip_fraction = 0.0;
};

// Loss averaged over `samples`; adds its gradient to `grad` when non-null.
ActorLoss actor_loss(const Mlp& actor, std::span<const PolicySample> samples, double epsilon,
                     double entropy_weight, Vector* grad);

// Mean squared error (V(s) - target)^2; adds its gradient to `grad` when non-null.
double critic_loss(const Mlp& critic, std::span<const ValueSample> samples, Vector* grad);

// Adam state for every network of a PolicySet.
struct PolicyOptimizers {
  Adam group_actor;
  std::vector<Adam> node_actors;
  Adam critic;

  static PolicyOptimizers create(const PolicySet& policies, const TrainConfig& config);
};

struct UpdateReport {
  double group_actor_loss = 0.0;
  double node_actor_loss = 0.0;
  double critic_loss = 0.0;
  double clip_fraction = 0.0;
  std::size_t group_actor_steps = 0;
  std::vector<std::size_t> node_actor_steps;
  std::size_t critic_steps = 0;
};

// K epochs over shuffled minibatches of the finished buffer. Node actor g only
// sees transitions whose group is g. Throws InvalidState on an empty buffer.
UpdateReport update(PolicySet& policies, PolicyOptimizers& optimizers, const RolloutBuffer& buffer,
                    const TrainConfig& config, std::mt19937_64& rng);

}  // namespace spotsched

#endif  // SPOTSCHED_PPO_HPP_
