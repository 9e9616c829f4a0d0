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

#include <random>

#include "wolonet/ops.h"

namespace wolonet {

int64_t count_parameters(const std::vector<NamedTensor>& params) {
  int64_t n = 0;
  for (const auto& p : params) n += p.value.numel();
  return n;
}

void GeneratorConfig::validate() const {
  if (upsample_strides.empty()) throw ValueError("GeneratorConfig: no upsampling stages");
  if (upsample_kernels.size() != upsample_strides.size())
    throw ValueError("GeneratorConfig: upsample_kernels and upsample_strides differ in length");
  for (size_t i = 0; i < upsample_strides.size(); ++i) {
    if (upsample_strides[i] < 1) throw ValueError("GeneratorConfig: strides must be >= 1");
    if (upsample_kernels[i] < upsample_strides[i])
      throw ValueError("GeneratorConfig: upsample kernel shorter than its stride");
  }
  if (upsample_factor() != hop)
    throw ValueError("GeneratorConfig: product of upsample strides (" +
                     std::to_string(upsample_factor()) + ") must equal hop (" +
                     std::to_string(hop) + ")");
  if (wolo_per_stage < 1) throw ValueError("GeneratorConfig: wolo_per_stage must be >= 1");
  if (static_cast<int64_t>(wolo_dilations.size()) != wolo_per_stage)
    throw ValueError("GeneratorConfig: need one dilation per WOLO block");
  for (int64_t d : wolo_dilations)
    if (d < 1) throw ValueError("GeneratorConfig: dilations must be >= 1");
  for (int64_t k : {wolo_kernel, pre_kernel, post_kernel})
    if (k < 1 || k % 2 == 0) throw ValueError("GeneratorConfig: kernel sizes must be odd");
  if (mel_bins < 1) throw ValueError("GeneratorConfig: mel_bins must be >= 1");
  if (stage_channels(upsample_strides.size() - 1) < 1)
    throw ValueError("GeneratorConfig: base_channels too small for the number of stages");
}

int64_t GeneratorConfig::upsample_factor() const {
  int64_t f = 1;
  for (int64_t s : upsample_strides) f *= s;
  return f;
}

int64_t GeneratorConfig::stage_channels(size_t stage) const {
  return base_channels >> (stage + 1);
}

namespace {

Tensor normal_tensor(Shape shape, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  std::vector<double> v(shape_numel(shape));
  for (auto& x : v) x = dist(rng);
  Tensor t(std::move(shape), std::move(v));
  t.set_requires_grad(true);
  return t;
}

Tensor zero_param(Shape shape) {
  Tensor t(std::move(shape), 0.0);
  t.set_requires_grad(true);
  return t;
}

}  // namespace

Generator Generator::build(const GeneratorConfig& cfg, uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  Generator g;
  g.cfg_ = cfg;
  const double init_std = 0.01;
  g.pre_weight_ = normal_tensor({cfg.base_channels, cfg.mel_bins, cfg.pre_kernel}, init_std, rng);
  g.pre_bias_ = zero_param({cfg.base_channels});
  int64_t channels = cfg.base_channels;
  for (size_t i = 0; i < cfg.upsample_strides.size(); ++i) {
    UpsampleStage st;
    const int64_t out = cfg.stage_channels(i);
    const int64_t k = cfg.upsample_kernels[i], s = cfg.upsample_strides[i];
    st.stride = s;
    st.padding = (k - s + 1) / 2;
    st.output_padding = 2 * st.padding - (k - s);
    st.weight = normal_tensor({channels, out, k}, init_std, rng);
    st.bias = zero_param({out});
    for (int64_t j = 0; j < cfg.wolo_per_stage; ++j)
      st.blocks.push_back(
          WoloParams::init(out, cfg.wolo_kernel, cfg.wolo_dilations[j], cfg.activation, rng));
    g.stages_.push_back(std::move(st));
    channels = out;
  }
  g.post_weight_ = normal_tensor({1, channels, cfg.post_kernel}, init_std, rng);
  g.post_bias_ = zero_param({1});
  return g;
}

Tensor Generator::forward(const Tensor& mel, std::vector<DynamicKernels>* kernels) const {
  if (mel.rank() != 2 && mel.rank() != 3)
    throw ShapeError("Generator", {mel.shape()}, "expected (mel_bins, F) or (N, mel_bins, F)");
  if (mel.dim(-2) != cfg_.mel_bins)
    throw ShapeError("Generator", {mel.shape()},
                     "expected " + std::to_string(cfg_.mel_bins) + " mel bins");
  if (mel.dim(-1) < 1) throw ShapeError("Generator", {mel.shape()}, "need at least one frame");
  const bool batched = mel.rank() == 3;
  Tensor x = batched ? mel : reshape(mel, {1, mel.dim(0), mel.dim(1)});
  x = conv1d(x, pre_weight_, pre_bias_, {.padding = same_padding(cfg_.pre_kernel)});
  for (const auto& st : stages_) {
    x = leaky_relu(x, kLeakySlope);
    x = conv_transpose1d(x, st.weight, st.bias,
                         {.stride = st.stride, .padding = st.padding,
                          .output_padding = st.output_padding});
    Tensor acc;
    for (const auto& block : st.blocks) {
      DynamicKernels k;
      Tensor z = wolo_block(x, block, kernels ? &k : nullptr);
      if (kernels) kernels->push_back(std::move(k));
      acc = acc.defined() ? add(acc, z) : z;
    }
    x = mul_scalar(acc, 1.0 / static_cast<double>(st.blocks.size()));
  }
  x = leaky_relu(x, kLeakySlope);
  x = conv1d(x, post_weight_, post_bias_, {.padding = same_padding(cfg_.post_kernel)});
  x = tanh(x);
  const int64_t len = x.dim(-1);
  return batched ? reshape(x, {x.dim(0), len}) : reshape(x, {len});
}

std::vector<NamedTensor> Generator::named_parameters() const {
  std::vector<NamedTensor> out{{"pre.weight", pre_weight_}, {"pre.bias", pre_bias_}};
  for (size_t i = 0; i < stages_.size(); ++i) {
    const std::string stage = "stage" + std::to_string(i + 1);
    out.push_back({stage + ".up.weight", stages_[i].weight});
    out.push_back({stage + ".up.bias", stages_[i].bias});
    for (size_t j = 0; j < stages_[i].blocks.size(); ++j) {
      const std::string block = stage + ".block" + std::to_string(j + 1);
      const auto& b = stages_[i].blocks[j];
      out.push_back({block + ".U", b.U});
      out.push_back({block + ".V", b.V});
      out.push_back({block + ".post_w", b.post_w});
      out.push_back({block + ".post_b", b.post_b});
    }
  }
  out.push_back({"post.weight", post_weight_});
  out.push_back({"post.bias", post_bias_});
  return out;
}

Waveform synthesize(const Generator& g, const Tensor& mel, int sample_rate) {
  if (mel.rank() != 2) throw ShapeError("synthesize", {mel.shape()}, "expected (mel_bins, F)");
  NoGradGuard no_grad;
  Tensor wave = g.forward(mel);
  auto d = wave.data();
  return {std::vector<double>(d.begin(), d.end()), sample_rate};
}

}  // namespace wolonet
