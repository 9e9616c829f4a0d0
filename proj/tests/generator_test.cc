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

#include "wolonet/generator.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.h"
#include "test_util.h"
#include "wolonet/config.h"
#include "wolonet/ops.h"

namespace wolonet {
namespace {

using testing::max_abs_diff;

GeneratorConfig small_config() {
  GeneratorConfig c;
  c.upsample_strides = {2, 3};
  c.upsample_kernels = {4, 5};
  c.hop = 6;
  c.base_channels = 8;
  c.wolo_per_stage = 2;
  c.wolo_dilations = {1, 2};
  c.wolo_kernel = 3;
  c.mel_bins = 3;
  c.pre_kernel = 3;
  c.post_kernel = 5;
  return c;
}

// (Cin, T) input, "same" padding, stride 1.
Tensor conv_loops(const Tensor& x, const Tensor& w, const Tensor& b) {
  const int64_t Cin = x.dim(0), T = x.dim(1), Cout = w.dim(0), K = w.dim(2), h = K / 2;
  std::vector<double> out(Cout * T);
  for (int64_t o = 0; o < Cout; ++o)
    for (int64_t t = 0; t < T; ++t) {
      double acc = b.data()[o];
      for (int64_t i = 0; i < Cin; ++i)
        for (int64_t k = 0; k < K; ++k) {
          const int64_t s = t + k - h;
          if (s >= 0 && s < T) acc += w.at({o, i, k}) * x.at({i, s});
        }
      out[o * T + t] = acc;
    }
  return Tensor({Cout, T}, out);
}

// Output length T * stride: position t * s + k - p receives x[t] * w[k].
Tensor upsample_loops(const Tensor& x, const UpsampleStage& st) {
  const int64_t Cin = x.dim(0), T = x.dim(1), Cout = st.weight.dim(1), K = st.weight.dim(2);
  const int64_t L = T * st.stride;
  std::vector<double> out(Cout * L);
  for (int64_t o = 0; o < Cout; ++o) {
    for (int64_t s = 0; s < L; ++s) out[o * L + s] = st.bias.data()[o];
    for (int64_t i = 0; i < Cin; ++i)
      for (int64_t t = 0; t < T; ++t)
        for (int64_t k = 0; k < K; ++k) {
          const int64_t s = t * st.stride + k - st.padding;
          if (s >= 0 && s < L) out[o * L + s] += x.at({i, t}) * st.weight.at({i, o, k});
        }
  }
  return Tensor({Cout, L}, out);
}

Tensor lrelu(Tensor t) {
  t = t.clone();
  for (auto& v : t.mutable_data()) v = v > 0 ? v : 0.1 * v;
  return t;
}

Tensor block_loops(const Tensor& x, const WoloParams& p) {
  const int64_t C = x.dim(0), T = x.dim(1);
  Tensor h = lrelu(testing::attention_loops(lrelu(x), p));
  std::vector<double> out(C * T);
  for (int64_t c = 0; c < C; ++c)
    for (int64_t t = 0; t < T; ++t) {
      double v = x.at({c, t}) + p.post_b.data()[c];
      for (int64_t j = 0; j < C; ++j) v += p.post_w.at({c, j}) * h.at({j, t});
      out[c * T + t] = v;
    }
  return Tensor({C, T}, out);
}

Generator randomized(const GeneratorConfig& cfg, uint64_t seed) {
  Generator g = Generator::build(cfg, seed);
  std::mt19937_64 rng(seed + 1);
  std::normal_distribution<double> n(0.0, 0.3);
  for (auto& p : g.named_parameters()) {
    Tensor t = p.value;
    for (auto& v : t.mutable_data()) v = n(rng);
  }
  return g;
}

TEST(Generator, ComposedFromLayerOracles) {
  const GeneratorConfig cfg = small_config();
  Generator g = randomized(cfg, 3);
  auto named = g.named_parameters();
  std::mt19937_64 rng(4);
  Tensor mel = testing::random_tensor({3, 5}, rng);
  Tensor x = conv_loops(mel, named[0].value, named[1].value);
  for (const auto& st : g.stages()) {
    x = upsample_loops(lrelu(x), st);
    Tensor acc(x.shape(), 0.0);
    for (const auto& b : st.blocks) {
      Tensor z = block_loops(x, b);
      for (int64_t i = 0; i < acc.numel(); ++i) acc.mutable_data()[i] += z.data()[i] / st.blocks.size();
    }
    x = acc;
  }
  x = conv_loops(lrelu(x), named[named.size() - 2].value, named.back().value);
  std::vector<double> expect;
  for (double v : x.data()) expect.push_back(std::tanh(v));
  Tensor y = g.forward(mel);
  ASSERT_EQ(y.shape(), (Shape{30}));
  EXPECT_LT(max_abs_diff(y, Tensor({30}, expect)), 1e-12);
}

TEST(Generator, DefaultMapsFramesToHopSamples) {
  Generator g = Generator::build(GeneratorConfig{}, 1);
  NoGradGuard no_grad;
  for (int64_t F : {1, 8}) {
    Tensor y = g.forward(Tensor({80, F}, 0.1));
    EXPECT_EQ(y.shape(), (Shape{256 * F}));
    for (double v : y.data()) ASSERT_TRUE(std::isfinite(v));
  }
}

TEST(Generator, TinyConfigShapesAndBatch) {
  Generator g = Generator::build(tiny_generator_config(), 2);
  NoGradGuard no_grad;
  std::mt19937_64 rng(5);
  Tensor mel = testing::random_tensor({2, 80, 4}, rng);
  Tensor y = g.forward(mel);
  ASSERT_EQ(y.shape(), (Shape{2, 1024}));
  for (double v : y.data()) EXPECT_LT(std::fabs(v), 1.0);
  for (int64_t F : {32, 64}) EXPECT_EQ(g.forward(Tensor({80, F}, 0.0)).dim(0), 256 * F);
  Tensor first = g.forward(reshape(slice(mel, 0, 0, 1), {80, 4}));
  EXPECT_LT(max_abs_diff(first, reshape(slice(y, 0, 0, 1), {1024})), 1e-12);
}

TEST(Generator, ParamCountByHand) {
  const GeneratorConfig cfg = small_config();
  // pre 8*3*3+8; stage1 8->4 (k4) + 2 blocks at C=4; stage2 4->2 (k5) + 2 blocks at C=2; post 2*5+1.
  auto block = [](int64_t C) { return 12 * (C + 1) + C * C + C; };
  const int64_t expect = (8 * 3 * 3 + 8) + (8 * 4 * 4 + 4) + 2 * block(4) + (4 * 2 * 5 + 2) +
                         2 * block(2) + (2 * 5 + 1);
  EXPECT_EQ(Generator::build(cfg, 1).param_count(), expect);
}

TEST(Generator, DefaultParamCountByHand) {
  GeneratorConfig cfg;
  int64_t expect = 512 * 80 * 7 + 512;
  int64_t c = 512;
  const int64_t kernels[] = {16, 16, 4, 4};
  for (int i = 0; i < 4; ++i) {
    const int64_t o = c / 2;
    expect += c * o * kernels[i] + o + 3 * ((25 + 5) * (o + 1) + o * o + o);
    c = o;
  }
  expect += 32 * 7 + 1;
  EXPECT_EQ(Generator::build(cfg, 1).param_count(), expect);
}

TEST(Generator, NamesAreUniqueAndStable) {
  Generator a = Generator::build(small_config(), 7), b = Generator::build(small_config(), 7);
  auto na = a.named_parameters(), nb = b.named_parameters();
  std::set<std::string> seen;
  for (size_t i = 0; i < na.size(); ++i) {
    EXPECT_TRUE(seen.insert(na[i].name).second) << na[i].name;
    EXPECT_EQ(na[i].name, nb[i].name);
    EXPECT_EQ(testing::values(na[i].value), testing::values(nb[i].value));
  }
  EXPECT_EQ(na[2].name, "stage1.up.weight");
}

TEST(Generator, ConfigValidation) {
  GeneratorConfig c = small_config();
  c.hop = 8;
  EXPECT_THROW(Generator::build(c, 1), ValueError);
  c = small_config();
  c.wolo_dilations = {1};
  EXPECT_THROW(Generator::build(c, 1), ValueError);
  c = small_config();
  c.wolo_kernel = 4;
  EXPECT_THROW(Generator::build(c, 1), ValueError);
  c = small_config();
  c.upsample_kernels = {4};
  EXPECT_THROW(Generator::build(c, 1), ValueError);
  Generator g = Generator::build(small_config(), 1);
  EXPECT_THROW(g.forward(Tensor({4, 5}, 0.0)), ShapeError);
}

TEST(Generator, SynthesizeReturnsWaveform) {
  Generator g = Generator::build(small_config(), 1);
  Waveform w = synthesize(g, Tensor({3, 7}, 0.5), 16000);
  EXPECT_EQ(w.samples.size(), 42u);
  EXPECT_EQ(w.sample_rate, 16000);
}

}  // namespace
}  // namespace wolonet
