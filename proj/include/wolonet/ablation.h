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

// Short training runs that swap the kernel activation, followed by checks of
// the kernels the trained generator produces.

#pragma once

#include <filesystem>
#include <optional>

#include "wolonet/config.h"
#include "wolonet/wolo.h"

namespace wolonet {

struct KernelStats {
  double min_value = 0.0;
  double max_value = 0.0;
  double max_row_sum_error = 0.0;  // max |sum_p W[q][p] - 1| over all rows
  bool finite = true;
};

KernelStats kernel_stats(const std::vector<DynamicKernels>& kernels);

// Sine kernels must lie in [-1, 1], tanh kernels in (-1, 1) and softmax rows
// must sum to 1 within 1e-12.
bool kernels_valid(const KernelStats& stats, KernelActivation mode);

struct AblationResult {
  KernelActivation mode = KernelActivation::kSine;
  int64_t steps = 0;
  bool finite = true;  // every logged loss was finite
  StepLog last;
  KernelStats kernels;
  bool passed = false;
};

// Trains `base` with its activation replaced by `mode` for base.train.total_steps
// steps on a synthetic dataset of `clips` clips.
AblationResult run_ablation(const RunConfig& base, KernelActivation mode, int64_t clips,
                            const std::optional<std::filesystem::path>& out_dir = std::nullopt);

}  // namespace wolonet
