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

// Least-squares adversarial, feature matching and mel losses. Expectations
// are means over every element of a map (batch included).

#pragma once

#include <vector>

#include "wolonet/discriminator.h"
#include "wolonet/dsp.h"
#include "wolonet/tensor.h"

namespace wolonet {

struct LossWeights {
  double lambda_fm = 2.0;
  double lambda_mel = 45.0;

  void validate() const;
};

// sum_k mean((real_k - 1)^2) + mean(fake_k^2)
Tensor adv_d_loss(const std::vector<Tensor>& real_scores, const std::vector<Tensor>& fake_scores);
// sum_k mean((1 - fake_k)^2)
Tensor adv_g_loss(const std::vector<Tensor>& fake_scores);
// sum_k sum_i mean(|real_ki - fake_ki|)
Tensor feature_matching_loss(const std::vector<std::vector<Tensor>>& real_features,
                             const std::vector<std::vector<Tensor>>& fake_features);
// mean(|log_mel(x) - log_mel(x_hat)|); x and x_hat must have equal lengths.
Tensor mel_loss(const Tensor& x, const Tensor& x_hat, const MelExtractor& mel);
Tensor mel_loss(const Tensor& x, const Tensor& x_hat, const MelConfig& cfg);
// Same, against a precomputed target log-mel.
Tensor mel_loss_to_target(const Tensor& target_log_mel, const Tensor& x_hat, const MelExtractor& mel);

Tensor total_g_loss(const Tensor& adv_g, const Tensor& fm, const Tensor& mel, const LossWeights& w);
inline Tensor total_d_loss(const Tensor& adv_d) { return adv_d; }

// Convenience splitters over discriminator outputs.
std::vector<Tensor> scores_of(const std::vector<DiscriminatorOutput>& outs);
std::vector<std::vector<Tensor>> features_of(const std::vector<DiscriminatorOutput>& outs);

}  // namespace wolonet
