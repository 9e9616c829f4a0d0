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
#include <vector>

#include "wolonet/tensor.h"

namespace wolonet {

struct AdamOptions {
  double beta1 = 0.8;
  double beta2 = 0.99;
  double eps = 1e-8;
};

struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  int64_t step = 0;     // applied updates
  int64_t skipped = 0;  // updates dropped for non-finite gradients

  // Zero moments congruent with `params`.
  static AdamState for_params(const std::vector<Tensor>& params);
};

// One bias-corrected Adam update using each parameter's accumulated grad
// (parameters without a grad count as zero). If any gradient entry is not
// finite, nothing changes except `skipped`. Returns whether the step applied.
bool adam_step(const std::vector<Tensor>& params, AdamState& state, double lr,
               const AdamOptions& opt = {});

// Same, with explicit gradients instead of the parameters' grad buffers.
bool adam_step(const std::vector<Tensor>& params, const std::vector<std::vector<double>>& grads,
               AdamState& state, double lr, const AdamOptions& opt = {});

// lr0 * 2^-floor(step / halve_every).
double scheduled_lr(double lr0, int64_t step, int64_t halve_every);

}  // namespace wolonet
