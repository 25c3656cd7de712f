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


#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "spotsched/errors.hpp"
#include "spotsched/mlp.hpp"

namespace spotsched {
namespace {

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

TEST(MaskedSoftmax, ZeroNetworkIsUniform) {
  const Mlp net({4, 3}, Mlp::Head::softmax);
  const Vector p = net.forward(Vector::Ones(4));
  for (Eigen::Index i = 0; i < 3; ++i) EXPECT_NEAR(p[i], 1.0 / 3.0, 1e-15);
}

TEST(MaskedSoftmax, MaskedUniform) {
  const Mlp net({4, 3}, Mlp::Head::softmax);
  const Mask mask{true, false, true};
  const Vector p = net.forward(Vector::Ones(4), &mask);
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_EQ(p[1], 0.0);
  EXPECT_DOUBLE_EQ(p[2], 0.5);
}

TEST(MaskedSoftmax, AllFalseMaskThrows) {
  const Mask none{false, false};
  EXPECT_THROW(masked_softmax(vec({1, 2}), &none), NoFeasibleAction);
}

TEST(MaskedSoftmax, MaskSizeMismatchThrows) {
  const Mask two{true, true};
  EXPECT_THROW(masked_softmax(vec({1, 2, 3}), &two), InvalidArgument);
}

TEST(MaskedSoftmax, IsDistributionForRandomInputs) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal(0.0, 30.0);
  std::bernoulli_distribution coin(0.6);
  for (int trial = 0; trial < 2000; ++trial) {
    const int n = 1 + trial % 12;
    Vector logits(n);
    Mask mask(n);
    bool any = false;
    for (int i = 0; i < n; ++i) {
      logits[i] = normal(rng);
      mask[i] = coin(rng);
      any = any || mask[i];
    }
    if (!any) mask[trial % n] = true;
    const Vector p = masked_softmax(logits, &mask);
    double sum = 0;
    for (int i = 0; i < n; ++i) {
      EXPECT_GE(p[i], 0.0);
      if (!mask[i]) EXPECT_EQ(p[i], 0.0);
      sum += p[i];
    }
    EXPECT_NEAR(sum, 1.0, 1e-9);
  }
}

TEST(MaskedSoftmax, StableForLargeLogits) {
  const Vector p = masked_softmax(vec({1000, 1000, -1000}));
  EXPECT_NEAR(p[0], 0.5, 1e-12);
  EXPECT_NEAR(p[2], 0.0, 1e-12);
}

TEST(Mlp, ZeroValueHead) {
  const Mlp critic({5, 8, 1}, Mlp::Head::linear);
  EXPECT_EQ(critic.value(Vector::Ones(5)), 0.0);
}

TEST(Mlp, InputSizeMismatchThrows) {
  const Mlp net({3, 2}, Mlp::Head::linear);
  EXPECT_THROW(net.logits(Vector::Ones(4)), InvalidArgument);
}

TEST(Mlp, NonFiniteParametersThrow) {
  Mlp net({2, 2}, Mlp::Head::softmax);
  net.parameters()[0] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(net.finite());
  EXPECT_THROW(net.forward(Vector::Ones(2)), NumericError);
}

TEST(Mlp, ParameterLayout) {
  const Mlp net({3, 4, 2}, Mlp::Head::linear);
  EXPECT_EQ(net.parameters().size(), 3 * 4 + 4 + 4 * 2 + 2);
  EXPECT_EQ(net.layer_count(), 2u);
  EXPECT_EQ(net.weight(1).rows(), 2);
  EXPECT_EQ(net.weight(1).cols(), 4);
}

TEST(Mlp, OrthogonalInitialization) {
  std::mt19937_64 rng(9);
  const Mlp net = Mlp::orthogonal({10, 64, 64, 3}, Mlp::Head::softmax, std::sqrt(2.0), 0.01, rng);
  const Eigen::MatrixXd w0 = net.weight(0);  // 64 x 10: orthonormal columns
  EXPECT_TRUE((w0.transpose() * w0).isApprox(2.0 * Eigen::MatrixXd::Identity(10, 10), 1e-9));
  const Eigen::MatrixXd w1 = net.weight(1);
  EXPECT_TRUE((w1.transpose() * w1).isApprox(2.0 * Eigen::MatrixXd::Identity(64, 64), 1e-9));
  const Eigen::MatrixXd w2 = net.weight(2);  // 3 x 64: orthonormal rows
  EXPECT_TRUE((w2 * w2.transpose()).isApprox(1e-4 * Eigen::MatrixXd::Identity(3, 3), 1e-9));
  EXPECT_EQ(net.bias(0).norm(), 0.0);
}

// Backprop against central differences of a scalar function of the logits.
TEST(Mlp, BackwardMatchesFiniteDifferences) {
  std::mt19937_64 rng(1);
  Mlp net = Mlp::orthogonal({4, 5, 3, 2}, Mlp::Head::linear, 1.3, 0.7, rng);
  std::normal_distribution<double> normal(0.0, 0.3);
  for (Eigen::Index i = 0; i < net.parameters().size(); ++i) net.parameters()[i] += normal(rng);
  const Vector x = vec({0.3, -0.7, 1.1, 0.05});
  const Vector weights = vec({0.8, -1.6});
  auto f = [&](const Mlp& m) { return weights.dot(m.logits(x)); };

  Mlp::Cache cache;
  net.logits(x, &cache);
  Vector grad = Vector::Zero(net.parameters().size());
  net.backward(cache, weights, grad);

  const double h = 1e-4;
  for (Eigen::Index i = 0; i < grad.size(); ++i) {
    Mlp plus = net;
    Mlp minus = net;
    plus.parameters()[i] += h;
    minus.parameters()[i] -= h;
    const double numeric = (f(plus) - f(minus)) / (2 * h);
    EXPECT_LE(std::abs(numeric - grad[i]), 1e-4 * std::max({std::abs(numeric), std::abs(grad[i]), 1e-6}))
        << "parameter " << i;
  }
}

TEST(Mlp, BackwardAccumulates) {
  std::mt19937_64 rng(2);
  const Mlp net = Mlp::orthogonal({3, 4, 2}, Mlp::Head::linear, 1.0, 1.0, rng);
  Mlp::Cache cache;
  net.logits(vec({1, 2, 3}), &cache);
  Vector once = Vector::Zero(net.parameters().size());
  net.backward(cache, vec({1, 1}), once);
  Vector twice = once;
  net.backward(cache, vec({1, 1}), twice);
  EXPECT_TRUE(twice.isApprox(2 * once));
}

TEST(ClipGradNorm, ScalesDownOnly) {
  Vector g = vec({3, 4});
  EXPECT_DOUBLE_EQ(clip_grad_norm(g, 1.0), 5.0);
  EXPECT_NEAR(g.norm(), 1.0, 1e-15);
  Vector small = vec({0.3, 0.4});
  clip_grad_norm(small, 1.0);
  EXPECT_DOUBLE_EQ(small[0], 0.3);
  Vector zero = Vector::Zero(3);
  clip_grad_norm(zero, 0.5);
  EXPECT_TRUE(zero.isZero());
}

TEST(Adam, FirstStepMovesByLearningRate) {
  Adam adam(2, 0.1);
  Vector p = vec({1.0, -1.0});
  adam.step(p, vec({2.0, -0.5}));
  EXPECT_NEAR(p[0], 0.9, 1e-6);
  EXPECT_NEAR(p[1], -0.9, 1e-6);
  EXPECT_EQ(adam.steps(), 1u);
}

TEST(Adam, ZeroGradientIsNoOp) {
  Adam adam(3, 0.1);
  Vector p = vec({1, 2, 3});
  const Vector before = p;
  adam.step(p, Vector::Zero(3));
  EXPECT_EQ(p, before);
}

TEST(Adam, MinimizesQuadratic) {
  Adam adam(1, 0.05);
  Vector p = vec({5.0});
  for (int i = 0; i < 2000; ++i) adam.step(p, 2.0 * (p.array() - 1.0).matrix());
  EXPECT_NEAR(p[0], 1.0, 1e-2);
}

}  // namespace
}  // namespace spotsched
