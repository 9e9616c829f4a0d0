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

#include "wolonet/ops.h"

namespace wolonet {

void LossWeights::validate() const {
  if (!(lambda_fm >= 0.0) || !(lambda_mel >= 0.0))
    throw ValueError("LossWeights: weights must be non-negative");
}

Tensor adv_d_loss(const std::vector<Tensor>& real_scores, const std::vector<Tensor>& fake_scores) {
  if (real_scores.empty() || fake_scores.empty()) throw ValueError("adv_d_loss: empty score list");
  if (real_scores.size() != fake_scores.size())
    throw ValueError("adv_d_loss: real and fake score lists differ in length");
  Tensor total;
  for (size_t k = 0; k < real_scores.size(); ++k) {
    Tensor r = add_scalar(real_scores[k], -1.0);
    Tensor term = add(mean(mul(r, r)), mean(mul(fake_scores[k], fake_scores[k])));
    total = total.defined() ? add(total, term) : term;
  }
  return total;
}

Tensor adv_g_loss(const std::vector<Tensor>& fake_scores) {
  if (fake_scores.empty()) throw ValueError("adv_g_loss: empty score list");
  Tensor total;
  for (const auto& f : fake_scores) {
    Tensor d = add_scalar(f, -1.0);
    Tensor term = mean(mul(d, d));
    total = total.defined() ? add(total, term) : term;
  }
  return total;
}

Tensor feature_matching_loss(const std::vector<std::vector<Tensor>>& real_features,
                             const std::vector<std::vector<Tensor>>& fake_features) {
  if (real_features.size() != fake_features.size() || real_features.empty())
    throw ValueError("feature_matching_loss: discriminator counts differ or are zero");
  Tensor total;
  for (size_t k = 0; k < real_features.size(); ++k) {
    if (real_features[k].size() != fake_features[k].size())
      throw ValueError("feature_matching_loss: feature map counts differ");
    for (size_t i = 0; i < real_features[k].size(); ++i) {
      const Tensor& r = real_features[k][i];
      const Tensor& f = fake_features[k][i];
      if (r.shape() != f.shape()) throw ShapeError("feature_matching_loss", {r.shape(), f.shape()});
      Tensor term = mean(abs(sub(r, f)));
      total = total.defined() ? add(total, term) : term;
    }
  }
  return total;
}

Tensor mel_loss(const Tensor& x, const Tensor& x_hat, const MelExtractor& mel) {
  if (x.shape() != x_hat.shape()) throw ShapeError("mel_loss", {x.shape(), x_hat.shape()});
  return mean(abs(sub(mel(x), mel(x_hat))));
}

Tensor mel_loss(const Tensor& x, const Tensor& x_hat, const MelConfig& cfg) {
  return mel_loss(x, x_hat, MelExtractor(cfg));
}

Tensor mel_loss_to_target(const Tensor& target_log_mel, const Tensor& x_hat, const MelExtractor& mel) {
  Tensor pred = mel(x_hat);
  if (pred.shape() != target_log_mel.shape())
    throw ShapeError("mel_loss", {target_log_mel.shape(), pred.shape()});
  return mean(abs(sub(target_log_mel, pred)));
}

Tensor total_g_loss(const Tensor& adv_g, const Tensor& fm, const Tensor& mel, const LossWeights& w) {
  w.validate();
  return add(add(adv_g, mul_scalar(fm, w.lambda_fm)), mul_scalar(mel, w.lambda_mel));
}

std::vector<Tensor> scores_of(const std::vector<DiscriminatorOutput>& outs) {
  std::vector<Tensor> s;
  for (const auto& o : outs) s.push_back(o.score);
  return s;
}

std::vector<std::vector<Tensor>> features_of(const std::vector<DiscriminatorOutput>& outs) {
  std::vector<std::vector<Tensor>> f;
  for (const auto& o : outs) f.push_back(o.features);
  return f;
}

}  // namespace wolonet
