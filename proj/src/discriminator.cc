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

#include "wolonet/discriminator.h"

#include <cmath>
#include <numeric>
#include <random>

#include "wolonet/ops.h"
#include "wolonet/wolo.h"

namespace wolonet {

void DiscriminatorConfig::validate() const {
  for (int64_t p : periods)
    if (p < 1) throw ValueError("DiscriminatorConfig: periods must be >= 1");
  if (scales < 0) throw ValueError("DiscriminatorConfig: scales must be >= 0");
  if (count() == 0) throw ValueError("DiscriminatorConfig: no sub-discriminators");
  if (channel_divisor < 1) throw ValueError("DiscriminatorConfig: channel_divisor must be >= 1");
}

namespace {

std::vector<ConvLayerSpec> shrink(std::vector<ConvLayerSpec> table, int64_t divisor) {
  const size_t last = table.size() - 1;
  for (size_t i = 0; i < table.size(); ++i) {
    auto& l = table[i];
    if (i > 0) l.in_channels = std::max<int64_t>(1, l.in_channels / divisor);
    if (i < last) l.out_channels = std::max<int64_t>(1, l.out_channels / divisor);
    l.groups = std::gcd(l.groups, std::gcd(l.in_channels, l.out_channels));
  }
  return table;
}

std::vector<ConvLayer> build_stack(const std::vector<ConvLayerSpec>& table, std::mt19937_64& rng) {
  std::vector<ConvLayer> stack;
  for (const auto& spec : table) {
    const int64_t fan_in = spec.in_channels / spec.groups * spec.kernel;
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    std::vector<double> w(spec.out_channels * fan_in), b(spec.out_channels);
    for (auto& v : w) v = dist(rng);
    for (auto& v : b) v = dist(rng);
    ConvLayer layer{spec,
                    Tensor({spec.out_channels, spec.in_channels / spec.groups, spec.kernel},
                           std::move(w)),
                    Tensor({spec.out_channels}, std::move(b))};
    layer.weight.set_requires_grad(true);
    layer.bias.set_requires_grad(true);
    stack.push_back(std::move(layer));
  }
  return stack;
}

}  // namespace

std::vector<ConvLayerSpec> period_layer_table(int64_t channel_divisor) {
  return shrink({{1, 32, 5, 3, 1, 2},
                 {32, 128, 5, 3, 1, 2},
                 {128, 512, 5, 3, 1, 2},
                 {512, 1024, 5, 3, 1, 2},
                 {1024, 1024, 5, 1, 1, 2},
                 {1024, 1, 3, 1, 1, 1}},
                channel_divisor);
}

std::vector<ConvLayerSpec> scale_layer_table(int64_t channel_divisor) {
  return shrink({{1, 128, 15, 1, 1, 7},
                 {128, 128, 41, 2, 4, 20},
                 {128, 256, 41, 2, 16, 20},
                 {256, 512, 41, 4, 16, 20},
                 {512, 1024, 41, 4, 16, 20},
                 {1024, 1024, 41, 1, 16, 20},
                 {1024, 1024, 5, 1, 1, 2},
                 {1024, 1, 3, 1, 1, 1}},
                channel_divisor);
}

DiscriminatorBank DiscriminatorBank::build(const DiscriminatorConfig& cfg, uint64_t seed) {
  cfg.validate();
  std::mt19937_64 rng(seed);
  DiscriminatorBank bank;
  bank.cfg_ = cfg;
  const auto period_table = period_layer_table(cfg.channel_divisor);
  const auto scale_table = scale_layer_table(cfg.channel_divisor);
  for (size_t i = 0; i < cfg.periods.size(); ++i)
    bank.period_stacks_.push_back(build_stack(period_table, rng));
  for (int64_t i = 0; i < cfg.scales; ++i) bank.scale_stacks_.push_back(build_stack(scale_table, rng));
  return bank;
}

DiscriminatorOutput run_conv_stack(const std::vector<ConvLayer>& stack, const Tensor& x) {
  DiscriminatorOutput out;
  Tensor h = x;
  for (size_t i = 0; i < stack.size(); ++i) {
    const auto& l = stack[i];
    h = conv1d(h, l.weight, l.bias,
               {.stride = l.spec.stride, .padding = l.spec.padding, .groups = l.spec.groups});
    if (i + 1 < stack.size()) h = leaky_relu(h, kLeakySlope);
    out.features.push_back(h);
  }
  out.score = h;
  return out;
}

std::vector<DiscriminatorOutput> DiscriminatorBank::discriminate(const Tensor& wave) const {
  if (wave.rank() != 1 && wave.rank() != 2)
    throw ShapeError("discriminate", {wave.shape()}, "expected (L) or (N, L)");
  const int64_t len = wave.dim(-1);
  if (len == 0) throw ValueError("discriminate: empty waveform");
  int64_t min_len = 4;
  for (int64_t p : cfg_.periods) min_len = std::max(min_len, p);
  if (len < min_len)
    throw ValueError("discriminate: waveform of " + std::to_string(len) +
                     " samples is shorter than " + std::to_string(min_len));
  const int64_t batch = wave.rank() == 2 ? wave.dim(0) : 1;
  Tensor x = reshape(wave, {batch, len});

  std::vector<DiscriminatorOutput> outputs;
  for (size_t i = 0; i < cfg_.periods.size(); ++i) {
    const int64_t p = cfg_.periods[i];
    Tensor h = x;
    if (len % p != 0) h = pad(h, 0, p - len % p, PadMode::kReflect);
    const int64_t rows = h.dim(1) / p;
    // (N, rows, p) -> (N, p, rows) -> (N * p, 1, rows): one 1-D signal per column.
    h = reshape(permute(reshape(h, {batch, rows, p}), {0, 2, 1}), {batch * p, 1, rows});
    outputs.push_back(run_conv_stack(period_stacks_[i], h));
  }
  Tensor s = reshape(x, {batch, 1, len});
  for (size_t i = 0; i < scale_stacks_.size(); ++i) {
    if (i > 0) s = avg_pool1d(s, 4, 2, 2);
    outputs.push_back(run_conv_stack(scale_stacks_[i], s));
  }
  return outputs;
}

std::vector<NamedTensor> DiscriminatorBank::named_parameters() const {
  std::vector<NamedTensor> out;
  auto add_stack = [&](const std::string& prefix, const std::vector<ConvLayer>& stack) {
    for (size_t j = 0; j < stack.size(); ++j) {
      const std::string layer = prefix + ".conv" + std::to_string(j + 1);
      out.push_back({layer + ".weight", stack[j].weight});
      out.push_back({layer + ".bias", stack[j].bias});
    }
  };
  for (size_t i = 0; i < period_stacks_.size(); ++i)
    add_stack("disc.mpd.p" + std::to_string(cfg_.periods[i]), period_stacks_[i]);
  for (size_t i = 0; i < scale_stacks_.size(); ++i)
    add_stack("disc.msd.s" + std::to_string(i + 1), scale_stacks_[i]);
  return out;
}

}  // namespace wolonet
