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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wolonet/dsp.h"
#include "wolonet/tensor.h"
#include "wolonet/wolo.h"

namespace wolonet {

struct NamedTensor {
  std::string name;
  Tensor value;
};

int64_t count_parameters(const std::vector<NamedTensor>& params);

struct GeneratorConfig {
  std::vector<int64_t> upsample_strides{8, 8, 2, 2};
  std::vector<int64_t> upsample_kernels{16, 16, 4, 4};
  int64_t base_channels = 512;  // halved by every upsampling stage
  int64_t wolo_per_stage = 3;
  std::vector<int64_t> wolo_dilations{1, 3, 5};
  int64_t wolo_kernel = 5;
  int64_t mel_bins = 80;
  int64_t pre_kernel = 7;
  int64_t post_kernel = 7;
  int64_t hop = 256;  // product of the strides must equal this
  KernelActivation activation = KernelActivation::kSine;

  void validate() const;
  int64_t upsample_factor() const;
  // Channels after upsampling stage i (0-based).
  int64_t stage_channels(size_t stage) const;
};

struct UpsampleStage {
  Tensor weight;  // (C_in, C_out, kernel)
  Tensor bias;    // (C_out)
  int64_t stride = 1;
  int64_t padding = 0;
  int64_t output_padding = 0;
  std::vector<WoloParams> blocks;
};

// Mel-conditioned upsampler: pre conv, then per stage leaky-relu, transposed
// conv and the average of its WOLO blocks, then leaky-relu, post conv, tanh.
class Generator {
 public:
  // Throws ValueError for invalid configs, including a stride product that
  // differs from the hop size.
  static Generator build(const GeneratorConfig& cfg, uint64_t seed);

  const GeneratorConfig& config() const { return cfg_; }
  const std::vector<UpsampleStage>& stages() const { return stages_; }

  // (mel_bins, F) -> (F * upsample) or (N, mel_bins, F) -> (N, F * upsample).
  // When `kernels` is given, the dynamic kernels of every block are appended.
  Tensor forward(const Tensor& mel, std::vector<DynamicKernels>* kernels = nullptr) const;

  // Stable hierarchical names, e.g. "stage1.block2.U".
  std::vector<NamedTensor> named_parameters() const;
  int64_t param_count() const { return count_parameters(named_parameters()); }

 private:
  GeneratorConfig cfg_;
  Tensor pre_weight_, pre_bias_;
  std::vector<UpsampleStage> stages_;
  Tensor post_weight_, post_bias_;
};

Waveform synthesize(const Generator& g, const Tensor& mel, int sample_rate = 22050);
inline int64_t param_count(const Generator& g) { return g.param_count(); }

}  // namespace wolonet
