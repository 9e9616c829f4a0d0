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

#include "wolonet/wolo.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.h"
#include "test_util.h"
#include "wolonet/ops.h"

namespace wolonet {
namespace {

using testing::max_abs_diff;
using testing::attention_loops;
using testing::random_tensor;

WoloParams random_params(int64_t C, int64_t K, int64_t d, KernelActivation mode, std::mt19937_64& rng) {
  WoloParams p = WoloParams::init(C, K, d, mode, rng);
  p.U = random_tensor(p.U.shape(), rng, 0.5);
  p.V = random_tensor(p.V.shape(), rng, 0.5);
  p.post_w = random_tensor(p.post_w.shape(), rng, 0.5);
  p.post_b = random_tensor(p.post_b.shape(), rng, 0.5);
  return p;
}

class WoloModes : public ::testing::TestWithParam<KernelActivation> {};

TEST_P(WoloModes, MatchesLoopOracle) {
  std::mt19937_64 rng(1);
  for (int64_t K : {1, 3, 5})
    for (int64_t d : {1, 2, 3}) {
      WoloParams p = random_params(4, K, d, GetParam(), rng);
      Tensor x = random_tensor({4, 13}, rng);
      Tensor expect = attention_loops(x, p);
      EXPECT_LT(max_abs_diff(wolo_attention(x, p), expect), 1e-12) << "K " << K << " d " << d;
      EXPECT_LT(max_abs_diff(wolo_attention_reference(x, p), expect), 1e-12);
    }
}

TEST_P(WoloModes, BatchedMatchesPerItem) {
  std::mt19937_64 rng(2);
  WoloParams p = random_params(3, 3, 2, GetParam(), rng);
  Tensor x = random_tensor({2, 3, 9}, rng);
  Tensor y = wolo_block(x, p);
  ASSERT_EQ(y.shape(), x.shape());
  for (int64_t n = 0; n < 2; ++n) {
    Tensor xn = reshape(slice(x, 0, n, n + 1), {3, 9});
    Tensor yn = reshape(slice(y, 0, n, n + 1), {3, 9});
    EXPECT_LT(max_abs_diff(wolo_block(xn, p), yn), 1e-12);
  }
}

TEST_P(WoloModes, ImpulseResponseIsLocal) {
  std::mt19937_64 rng(3);
  for (int64_t K : {3, 5})
    for (int64_t d : {1, 3}) {
      WoloParams p = random_params(2, K, d, GetParam(), rng);
      const int64_t T = 41, centre = 20, radius = 2 * (K / 2) * d;
      Tensor base = random_tensor({2, T}, rng);
      Tensor bumped = base.clone();
      bumped.mutable_data()[centre] += 0.7;
      Tensor diff = sub(wolo_block(bumped, p), wolo_block(base, p));
      bool reached_edge = false;
      for (int64_t c = 0; c < 2; ++c)
        for (int64_t t = 0; t < T; ++t) {
          const double v = std::fabs(diff.at({c, t}));
          if (std::abs(t - centre) > radius) {
            EXPECT_LT(v, 1e-13) << "t " << t;
          }
          if (std::abs(t - centre) == radius && v > 1e-12) reached_edge = true;
        }
      EXPECT_TRUE(reached_edge) << "K " << K << " d " << d;
    }
}

INSTANTIATE_TEST_SUITE_P(Activations, WoloModes,
                         ::testing::Values(KernelActivation::kSine, KernelActivation::kTanh,
                                           KernelActivation::kSoftmax),
                         [](const auto& info) { return std::string(activation_name(info.param)); });

TEST(WoloKernels, RangesPerActivation) {
  std::mt19937_64 rng(4);
  Tensor x = random_tensor({3, 20}, rng, 4.0);
  for (auto mode : {KernelActivation::kSine, KernelActivation::kTanh, KernelActivation::kSoftmax}) {
    WoloParams p = random_params(3, 5, 1, mode, rng);
    DynamicKernels k = wolo_kernels(x, p);
    ASSERT_EQ(k.W.shape(), (Shape{20, 5, 5}));
    ASSERT_EQ(k.b.shape(), (Shape{20, 5}));
    auto w = k.W.data();
    for (size_t row = 0; row < w.size() / 5; ++row) {
      double s = 0.0;
      for (int q = 0; q < 5; ++q) {
        const double v = w[row * 5 + q];
        s += v;
        if (mode == KernelActivation::kSoftmax) {
          EXPECT_GE(v, 0.0);
        } else {
          EXPECT_LE(std::fabs(v), 1.0);
        }
      }
      if (mode == KernelActivation::kSoftmax) {
        EXPECT_NEAR(s, 1.0, 1e-12);
      }
    }
  }
}

TEST(WoloBlock, ResidualWithZeroPost) {
  std::mt19937_64 rng(5);
  WoloParams p = random_params(3, 3, 1, KernelActivation::kSine, rng);
  p.post_w = Tensor({3, 3}, 0.0);
  p.post_b = Tensor({3}, 0.0);
  Tensor x = random_tensor({3, 8}, rng);
  EXPECT_EQ(testing::values(wolo_block(x, p)), testing::values(x));
}

TEST(WoloBlock, ComposedFromParts) {
  std::mt19937_64 rng(6);
  WoloParams p = random_params(4, 5, 2, KernelActivation::kTanh, rng);
  Tensor x = random_tensor({4, 11}, rng);
  auto lrelu = [](Tensor t) {
    for (auto& v : t.mutable_data()) v = v > 0 ? v : 0.1 * v;
    return t;
  };
  Tensor h = lrelu(attention_loops(lrelu(x.clone()), p));
  std::vector<double> expect(44);
  for (int64_t c = 0; c < 4; ++c)
    for (int64_t t = 0; t < 11; ++t) {
      double v = x.at({c, t}) + p.post_b.data()[c];
      for (int64_t j = 0; j < 4; ++j) v += p.post_w.at({c, j}) * h.at({j, t});
      expect[c * 11 + t] = v;
    }
  EXPECT_LT(max_abs_diff(wolo_block(x, p), Tensor({4, 11}, expect)), 1e-12);
}

TEST(WoloParams, CountAndInit) {
  EXPECT_EQ(wolo_param_count(64, 5), 30 * 65 + 64 * 64 + 64);
  std::mt19937_64 rng(7);
  WoloParams p = WoloParams::init(8, 3, 1, KernelActivation::kSine, rng);
  int64_t n = 0;
  for (const auto& t : p.tensors()) {
    n += t.numel();
    EXPECT_TRUE(t.requires_grad());
  }
  EXPECT_EQ(n, wolo_param_count(8, 3));
  for (double v : p.V.data()) EXPECT_EQ(v, 0.0);
}

TEST(WoloParams, Errors) {
  EXPECT_THROW(parse_activation("relu"), ValueError);
  EXPECT_EQ(parse_activation("softmax"), KernelActivation::kSoftmax);
  std::mt19937_64 rng(8);
  WoloParams p = WoloParams::init(4, 3, 1, KernelActivation::kSine, rng);
  EXPECT_THROW(wolo_attention(Tensor({5, 10}, 0.0), p), ShapeError);
  p.kernel = 4;
  EXPECT_THROW(p.validate(), ValueError);
}

}  // namespace
}  // namespace wolonet
