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

// Multiply-add accounting and mel cepstral distortion.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wolonet/dsp.h"
#include "wolonet/tensor.h"

namespace wolonet {

// Per time step of one WOLO attention plus its pointwise conv:
// 2(K^2 + K)C + C^2 + C.
int64_t madds_wolo(int64_t channels, int64_t kernel);
// One dense conv of width K over C channels: K C^2.
int64_t madds_resblock(int64_t channels, int64_t kernel);
// K C^2 + C, the same conv with its bias adds.
int64_t madds_resblock_with_bias(int64_t channels, int64_t kernel);
double madds_ratio(int64_t channels, int64_t kernel);

// Multiply-adds actually executed by wolo_attention followed by the
// pointwise conv on a (C, 1) input, counted by the tensor ops.
int64_t empirical_madds(int64_t channels, int64_t kernel);
// Allowed disagreement between empirical and closed-form counts.
int64_t madds_slack(int64_t channels, int64_t kernel);

struct MAddsReport {
  int64_t channels = 0;
  int64_t kernel = 0;
  int64_t wolo_madds = 0;
  int64_t resblock_madds = 0;
  int64_t resblock_with_bias = 0;
  double ratio = 0.0;
  int64_t empirical = 0;
};

MAddsReport madds_report(int64_t channels, int64_t kernel, bool with_empirical = true);
std::string madds_table_markdown(const std::vector<MAddsReport>& rows);
std::string madds_table_csv(const std::vector<MAddsReport>& rows);

inline constexpr int kCepstralOrder = 13;

// c_1..c_order of the orthonormal DCT-II of every log-mel frame.
// log_mel: (n_mels, F) -> (F, order).
std::vector<std::vector<double>> mel_cepstra(const Tensor& log_mel, int order = kCepstralOrder);

// Mean over frames of (10 / ln 10) sqrt(2 sum_i (c_i - c'_i)^2).
double mcd_from_cepstra(const std::vector<std::vector<double>>& a,
                        const std::vector<std::vector<double>>& b);

// Throws ValueError when the sample counts differ.
double mcd(const Waveform& ref, const Waveform& syn, const MelConfig& cfg = {});

}  // namespace wolonet
