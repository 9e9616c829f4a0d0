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

#include "wolonet/losses.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_util.h"
#include "wolonet/ops.h"

namespace wolonet {
namespace {

TEST(AdversarialLoss, HandComputed) {
  Tensor r1({2}, {1.0, 0.0}), r2({1}, {3.0});
  Tensor f1({2}, {0.5, -0.5}), f2({1}, {2.0});
  // real: mean(0, 1) + mean(4) = 4.5; fake: mean(.25, .25) + 4 = 4.25
  EXPECT_DOUBLE_EQ(adv_d_loss({r1, r2}, {f1, f2}).item(), 8.75);
  // mean(.25, 2.25) + 1 = 2.25
  EXPECT_DOUBLE_EQ(adv_g_loss({f1, f2}).item(), 2.25);
  EXPECT_DOUBLE_EQ(adv_g_loss({Tensor({3}, 1.0)}).item(), 0.0);
  EXPECT_THROW(adv_d_loss({r1}, {f1, f2}), ValueError);
}

TEST(FeatureMatching, HandComputed) {
  std::vector<std::vector<Tensor>> real{{Tensor({2}, {1, 2}), Tensor({1}, {0})}, {Tensor({2}, {5, 5})}};
  std::vector<std::vector<Tensor>> fake{{Tensor({2}, {0, 4}), Tensor({1}, {-3})}, {Tensor({2}, {5, 6})}};
  // 1.5 + 3 + 0.5
  EXPECT_DOUBLE_EQ(feature_matching_loss(real, fake).item(), 5.0);
  EXPECT_DOUBLE_EQ(feature_matching_loss(real, real).item(), 0.0);
}

TEST(MelLoss, MeanAbsoluteLogMelDifference) {
  MelConfig c;
  c.sample_rate = 8000;
  c.n_fft = 64;
  c.hop = 16;
  c.win_length = 64;
  c.n_mels = 8;
  c.fmax = 4000.0;
  std::mt19937_64 rng(1);
  Tensor x = testing::random_tensor({128}, rng), y = testing::random_tensor({128}, rng);
  auto a = testing::values(log_mel(x, c)), b = testing::values(log_mel(y, c));
  double expect = 0.0;
  for (size_t i = 0; i < a.size(); ++i) expect += std::fabs(a[i] - b[i]);
  expect /= a.size();
  EXPECT_NEAR(mel_loss(x, y, c).item(), expect, 1e-12);
  EXPECT_NEAR(mel_loss_to_target(log_mel(x, c), y, MelExtractor(c)).item(), expect, 1e-12);
  EXPECT_DOUBLE_EQ(mel_loss(x, x, c).item(), 0.0);
  EXPECT_THROW(mel_loss(x, testing::random_tensor({112}, rng), c), ShapeError);
}

TEST(TotalLoss, WeightedSum) {
  LossWeights w;
  Tensor t = total_g_loss(Tensor::scalar(1.0), Tensor::scalar(2.0), Tensor::scalar(0.5), w);
  EXPECT_DOUBLE_EQ(t.item(), 1.0 + 2.0 * 2.0 + 45.0 * 0.5);
  EXPECT_DOUBLE_EQ(total_d_loss(Tensor::scalar(3.0)).item(), 3.0);
  w.lambda_mel = -1.0;
  EXPECT_THROW(w.validate(), ValueError);
}

TEST(Splitters, ScoresAndFeatures) {
  DiscriminatorOutput a{Tensor({1}, 1.0), {Tensor({2}, 0.0), Tensor({1}, 1.0)}};
  DiscriminatorOutput b{Tensor({1}, 2.0), {Tensor({1}, 2.0)}};
  auto s = scores_of({a, b});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_DOUBLE_EQ(s[1].item(), 2.0);
  auto f = features_of({a, b});
  EXPECT_EQ(f[0].size(), 2u);
  EXPECT_EQ(f[1].size(), 1u);
}

}  // namespace
}  // namespace wolonet
