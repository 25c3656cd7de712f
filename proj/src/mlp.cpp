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

#include "spotsched/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spotsched/errors.hpp"

namespace spotsched {

Vector masked_softmax(const Vector& logits, const Mask* mask) {
  if (mask != nullptr && mask->size() != static_cast<std::size_t>(logits.size())) {
    throw InvalidArgument("mask length does not match the policy head");
  }
  double peak = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    if (mask == nullptr || (*mask)[i]) peak = std::max(peak, logits[i]);
  }
  if (peak == -std::numeric_limits<double>::infinity()) {
    throw NoFeasibleAction("every action is masked out");
  }
  if (!std::isfinite(peak)) throw NumericError("non-finite policy logits");
  Vector probs = Vector::Zero(logits.size());
  double total = 0.0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    if (mask == nullptr || (*mask)[i]) {
      probs[i] = std::exp(logits[i] - peak);
      total += probs[i];
    }
  }
  probs /= total;
  return probs;
}

Mlp::Mlp(std::vector<std::size_t> sizes, Head head) : sizes_(std::move(sizes)), head_(head) {
  if (sizes_.size() < 2) throw InvalidArgument("an MLP needs at least input and output sizes");
  std::size_t offset = 0;
  for (std::size_t i = 0; i + 1 < sizes_.size(); ++i) {
    Layer layer;
    layer.in = sizes_[i];
    layer.out = sizes_[i + 1];
    layer.weight_offset = offset;
    offset += layer.in * layer.out;
    layer.bias_offset = offset;
    offset += layer.out;
    layers_.push_back(layer);
  }
  params_ = Vector::Zero(static_cast<Eigen::Index>(offset));
}

namespace {

// Orthogonal (semi-orthogonal when rectangular) matrix scaled by `gain`.
Eigen::MatrixXd orthogonal_matrix(std::size_t rows, std::size_t cols, double gain, std::mt19937_64& rng) {
  if (rows == 0 || cols == 0) return Eigen::MatrixXd::Zero(rows, cols);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t tall = std::max(rows, cols);
  const std::size_t narrow = std::min(rows, cols);
  Eigen::MatrixXd sample(tall, narrow);
  for (Eigen::Index c = 0; c < sample.cols(); ++c) {
    for (Eigen::Index r = 0; r < sample.rows(); ++r) sample(r, c) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(sample);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(tall, narrow);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(narrow).triangularView<Eigen::Upper>();
  for (Eigen::Index c = 0; c < q.cols(); ++c) {
    if (r(c, c) < 0.0) q.col(c) *= -1.0;
  }
  Eigen::MatrixXd result = rows >= cols ? q : Eigen::MatrixXd(q.transpose());
  return gain * result;
}

}  // namespace

Mlp Mlp::orthogonal(std::vector<std::size_t> sizes, Head head, double hidden_gain, double output_gain,
                    std::mt19937_64& rng) {
  Mlp net(std::move(sizes), head);
  for (std::size_t i = 0; i < net.layers_.size(); ++i) {
    const Layer& layer = net.layers_[i];
    const double gain = i + 1 == net.layers_.size() ? output_gain : hidden_gain;
    const Eigen::MatrixXd w = orthogonal_matrix(layer.out, layer.in, gain, rng);
    Eigen::Map<Eigen::MatrixXd>(net.params_.data() + layer.weight_offset, layer.out, layer.in) = w;
  }
  return net;
}

Eigen::Map<const Eigen::MatrixXd> Mlp::weight(std::size_t i) const {
  const Layer& layer = layers_.at(i);
  return {params_.data() + layer.weight_offset, static_cast<Eigen::Index>(layer.out),
          static_cast<Eigen::Index>(layer.in)};
}

Eigen::Map<const Vector> Mlp::bias(std::size_t i) const {
  const Layer& layer = layers_.at(i);
  return {params_.data() + layer.bias_offset, static_cast<Eigen::Index>(layer.out)};
}

Vector Mlp::logits(const Vector& input, Cache* cache) const {
  if (static_cast<std::size_t>(input.size()) != input_size()) {
    throw InvalidArgument("network expects " + std::to_string(input_size()) + " inputs, got " +
                          std::to_string(input.size()));
  }
  if (cache != nullptr) {
    cache->activations.clear();
    cache->activations.push_back(input);
  }
  Vector x = input;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    Vector z = weight(i) * x + bias(i);
    if (i + 1 < layers_.size()) z = z.array().tanh().matrix();
    if (cache != nullptr) cache->activations.push_back(z);
    x = std::move(z);
  }
  return x;
}

void Mlp::backward(const Cache& cache, const Vector& grad_logits, Vector& grad) const {
  if (grad.size() != params_.size()) grad = Vector::Zero(params_.size());
  Vector delta = grad_logits;
  for (std::size_t i = layers_.size(); i-- > 0;) {
    const Layer& layer = layers_[i];
    const Vector& below = cache.activations[i];
    Eigen::Map<Eigen::MatrixXd>(grad.data() + layer.weight_offset, layer.out, layer.in) +=
        delta * below.transpose();
    Eigen::Map<Vector>(grad.data() + layer.bias_offset, layer.out) += delta;
    if (i == 0) break;
    Vector upstream = weight(i).transpose() * delta;
    // below = tanh(pre) so d tanh = 1 - below^2
    delta = upstream.array() * (1.0 - below.array().square());
  }
}

Vector Mlp::forward(const Vector& input, const Mask* mask) const {
  if (!params_.allFinite()) throw NumericError("network parameters contain NaN or Inf");
  Vector out = logits(input);
  if (head_ == Head::softmax) return masked_softmax(out, mask);
  return out;
}

double Mlp::value(const Vector& input) const {
  const Vector out = forward(input);
  if (out.size() != 1) throw InvalidArgument("value() needs a single-output network");
  return out[0];
}

double clip_grad_norm(Vector& grad, double max_norm) {
  const double norm = grad.norm();
  if (max_norm > 0.0 && norm > max_norm) grad *= max_norm / norm;
  return norm;
}

Adam::Adam(std::size_t size, double learning_rate, double beta1, double beta2, double epsilon)
    : lr_(learning_rate),
      beta1_(beta1),
      beta2_(beta2),
      eps_(epsilon),
      m_(Vector::Zero(static_cast<Eigen::Index>(size))),
      v_(Vector::Zero(static_cast<Eigen::Index>(size))) {}

void Adam::step(Vector& params, const Vector& grad) {
  if (grad.size() != params.size() || m_.size() != params.size()) {
    throw InvalidArgument("optimizer state does not match parameter count");
  }
  ++t_;
  m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
  v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
  const double correction1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double correction2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  params.array() -= lr_ * (m_.array() / correction1) / ((v_.array() / correction2).sqrt() + eps_);
}

}  // namespace spotsched
