// Copyright 2026 The wolonet Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wolonet/adam.h"

#include <gtest/gtest.h>

#include <cmath>

#include "wolonet/ops.h"

namespace wolonet {
namespace {

TEST(Adam, MatchesScalarReference) {
  Tensor p({2}, {1.0, -2.0});
  p.set_requires_grad(true);
  AdamState st = AdamState::for_params({p});
  const double lr = 1e-2, b1 = 0.8, b2 = 0.99, eps = 1e-8;
  double x[2] = {1.0, -2.0}, m[2] = {0, 0}, v[2] = {0, 0};
  for (int t = 1; t <= 100; ++t) {
    std::vector<std::vector<double>> g{{2.0 * p.data()[0], std::cos(p.data()[1])}};
    double gr[2] = {2.0 * x[0], std::cos(x[1])};
    ASSERT_TRUE(adam_step({p}, g, st, lr));
    for (int i = 0; i < 2; ++i) {
      m[i] = b1 * m[i] + (1 - b1) * gr[i];
      v[i] = b2 * v[i] + (1 - b2) * gr[i] * gr[i];
      const double mh = m[i] / (1 - std::pow(b1, t)), vh = v[i] / (1 - std::pow(b2, t));
      x[i] -= lr * mh / (std::sqrt(vh) + eps);
    }
    EXPECT_NEAR(p.data()[0], x[0], 1e-14);
    EXPECT_NEAR(p.data()[1], x[1], 1e-14);
  }
  EXPECT_EQ(st.step, 100);
}

TEST(Adam, FirstStepMovesByLr) {
  Tensor p = Tensor::scalar(0.5);
  p.set_requires_grad(true);
  AdamState st = AdamState::for_params({p});
  adam_step({p}, {{3.0}}, st, 1e-3);
  EXPECT_NEAR(p.item(), 0.5 - 1e-3, 1e-10);
}

TEST(Adam, UsesAccumulatedGradsAndZeroGradIsNoop) {
  Tensor p = Tensor::scalar(1.0);
  p.set_requires_grad(true);
  AdamState st = AdamState::for_params({p});
  adam_step({p}, st, 0.1);
  EXPECT_DOUBLE_EQ(p.item(), 1.0);
  Tensor y = mul(p, p);
  y.backward();
  adam_step({p}, st, 0.1);
  EXPECT_LT(p.item(), 1.0);
}

TEST(Adam, NonFiniteGradientSkipsWholeStep) {
  Tensor a = Tensor::scalar(1.0), b = Tensor::scalar(2.0);
  a.set_requires_grad(true);
  b.set_requires_grad(true);
  AdamState st = AdamState::for_params({a, b});
  EXPECT_FALSE(adam_step({a, b}, {{1.0}, {NAN}}, st, 0.1));
  EXPECT_DOUBLE_EQ(a.item(), 1.0);
  EXPECT_DOUBLE_EQ(b.item(), 2.0);
  EXPECT_EQ(st.step, 0);
  EXPECT_EQ(st.skipped, 1);
  EXPECT_EQ(st.m[0][0], 0.0);
  EXPECT_FALSE(adam_step({a, b}, {{INFINITY}, {1.0}}, st, 0.1));
  EXPECT_EQ(st.skipped, 2);
}

TEST(Adam, ShapeMismatchThrows) {
  Tensor a({2}, 0.0);
  AdamState st = AdamState::for_params({a});
  EXPECT_THROW(adam_step({a}, {{1.0}}, st, 0.1), ShapeError);
}

TEST(LrSchedule, HalvesEveryPeriod) {
  EXPECT_DOUBLE_EQ(scheduled_lr(2e-4, 1, 1000), 2e-4);
  EXPECT_DOUBLE_EQ(scheduled_lr(2e-4, 999, 1000), 2e-4);
  EXPECT_DOUBLE_EQ(scheduled_lr(2e-4, 1000, 1000), 1e-4);
  EXPECT_DOUBLE_EQ(scheduled_lr(2e-4, 2000, 1000), 5e-5);
  EXPECT_DOUBLE_EQ(scheduled_lr(2e-4, 2999, 1000), 5e-5);
}

}  // namespace
}  // namespace wolonet
