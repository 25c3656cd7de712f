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

// Small feed-forward networks with tanh hidden layers, manual backprop and Adam.

#ifndef SPOTSCHED_MLP_HPP_
#define SPOTSCHED_MLP_HPP_

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <random>
#include <vector>

namespace spotsched {

using Vector = Eigen::VectorXd;
using Mask = std::vector<bool>;

// Probabilities from logits restricted to `mask`; exactly zero off the mask.
// Throws NoFeasibleAction when the mask has no true entry.
Vector masked_softmax(const Vector& logits, const Mask* mask = nullptr);

class Mlp {
 public:
  enum class Head { linear, softmax };

  // Per-layer storage offsets into the flat parameter vector.
  struct Layer {
    std::size_t in = 0;
    std::size_t out = 0;
    std::size_t weight_offset = 0;  // column-major out x in
    std::size_t bias_offset = 0;
  };

  // Activations kept by logits() for backward().
  struct Cache {
    std::vector<Vector> activations;  // input, hidden outputs, final logits
  };

  Mlp() = default;
  // Zero-initialized network.
  Mlp(std::vector<std::size_t> sizes, Head head);

  // Orthogonal weights with `hidden_gain` on hidden layers and `output_gain`
  // on the last layer; zero biases.
  static Mlp orthogonal(std::vector<std::size_t> sizes, Head head, double hidden_gain,
                        double output_gain, std::mt19937_64& rng);

  const std::vector<std::size_t>& sizes() const { return sizes_; }
  Head head() const { return head_; }
  std::size_t input_size() const { return sizes_.front(); }
  std::size_t output_size() const { return sizes_.back(); }
  std::size_t layer_count() const { return layers_.size(); }
  const Layer& layer(std::size_t i) const { return layers_[i]; }

  Vector& parameters() { return params_; }
  const Vector& parameters() const { return params_; }

  Eigen::Map<const Eigen::MatrixXd> weight(std::size_t layer) const;
  Eigen::Map<const Vector> bias(std::size_t layer) const;

  // Pre-head outputs. Throws InvalidArgument on a size mismatch.
  Vector logits(const Vector& input, Cache* cache = nullptr) const;

  // Adds d(loss)/d(params) to `grad` given d(loss)/d(logits).
  void backward(const Cache& cache, const Vector& grad_logits, Vector& grad) const;

  // Head applied: probabilities for softmax heads, raw outputs for linear heads.
  // Throws NumericError if parameters are not finite.
  Vector forward(const Vector& input, const Mask* mask = nullptr) const;

  double value(const Vector& input) const;

  bool finite() const { return params_.allFinite(); }

 private:
  std::vector<std::size_t> sizes_;
  Head head_ = Head::linear;
  std::vector<Layer> layers_;
  Vector params_;
};

// Scales `grad` in place so its L2 norm is at most `max_norm`; returns the original norm.
double clip_grad_norm(Vector& grad, double max_norm);

class Adam {
 public:
  Adam() = default;
  Adam(std::size_t size, double learning_rate, double beta1 = 0.9, double beta2 = 0.999,
       double epsilon = 1e-8);

  void step(Vector& params, const Vector& grad);  // descends along grad
  std::size_t steps() const { return t_; }
  double learning_rate() const { return lr_; }

 private:
  double lr_ = 1e-3;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  std::size_t t_ = 0;
  Vector m_;
  Vector v_;
};

}  // namespace spotsched

#endif  // SPOTSCHED_MLP_HPP_
