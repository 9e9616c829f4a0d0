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

// Multi-period and multi-scale waveform discriminators.
//
// Layer tables (channel_divisor = 1), leaky-relu 0.1 after every conv except
// the last:
//
//   multi-period, one per period p; the waveform is reflect padded to a
//   multiple of p and folded to (p columns x len/p rows); every conv runs
//   along the rows with a (k x 1) kernel, i.e. independently per column:
//     in    out   kernel stride pad
//     1     32    5      3      2
//     32    128   5      3      2
//     128   512   5      3      2
//     512   1024  5      3      2
//     1024  1024  5      1      2
//     1024  1     3      1      1     (score)
//
//   multi-scale, on the raw waveform and after one and two
//   avg_pool1d(kernel 4, stride 2, pad 2):
//     in    out   kernel stride groups pad
//     1     128   15     1      1      7
//     128   128   41     2      4      20
//     128   256   41     2      16     20
//     256   512   41     4      16     20
//     512   1024  41     4      16     20
//     1024  1024  41     1      16     20
//     1024  1024  5      1      1      2
//     1024  1     3      1      1      1     (score)
//
// A channel divisor > 1 shrinks every hidden width (min 1); groups shrink to
// the largest count that still divides both widths.

#pragma once

#include <cstdint>
#include <vector>

#include "wolonet/generator.h"
#include "wolonet/tensor.h"

namespace wolonet {

struct ConvLayerSpec {
  int64_t in_channels;
  int64_t out_channels;
  int64_t kernel;
  int64_t stride;
  int64_t groups;
  int64_t padding;
};

struct DiscriminatorConfig {
  std::vector<int64_t> periods{2, 3, 5, 7, 11};
  int64_t scales = 3;
  int64_t channel_divisor = 1;

  void validate() const;
  size_t count() const { return periods.size() + static_cast<size_t>(scales); }
};

std::vector<ConvLayerSpec> period_layer_table(int64_t channel_divisor = 1);
std::vector<ConvLayerSpec> scale_layer_table(int64_t channel_divisor = 1);

struct ConvLayer {
  ConvLayerSpec spec;
  Tensor weight;  // (out, in / groups, kernel)
  Tensor bias;    // (out)
};

struct DiscriminatorOutput {
  Tensor score;                  // raw output of the last layer
  std::vector<Tensor> features;  // every layer's output, first to last (incl. score)
};

class DiscriminatorBank {
 public:
  static DiscriminatorBank build(const DiscriminatorConfig& cfg, uint64_t seed);

  const DiscriminatorConfig& config() const { return cfg_; }

  // wave: (L) or (N, L). Returns period discriminators first (in period
  // order), then scales from raw to most pooled. Throws on empty input or
  // L < max(11, 4).
  std::vector<DiscriminatorOutput> discriminate(const Tensor& wave) const;

  // Names are prefixed "disc.".
  std::vector<NamedTensor> named_parameters() const;
  int64_t param_count() const { return count_parameters(named_parameters()); }

 private:
  DiscriminatorConfig cfg_;
  std::vector<std::vector<ConvLayer>> period_stacks_;
  std::vector<std::vector<ConvLayer>> scale_stacks_;
};

// Runs one conv stack on (N, C, T); exposed for tests.
DiscriminatorOutput run_conv_stack(const std::vector<ConvLayer>& stack, const Tensor& x);

}  // namespace wolonet
