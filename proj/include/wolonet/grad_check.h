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

#include <functional>
#include <string>
#include <vector>

#include "wolonet/tensor.h"

namespace wolonet {

struct GradCheckResult {
  double max_rel_error = 0.0;
  size_t worst_param = 0;
  int64_t worst_index = -1;
  double analytic = 0.0;
  double numeric = 0.0;
  int64_t entries_checked = 0;
};

struct GradCheckOptions {
  double step = 1e-5;
  // Scale the step to step * max(1, |theta|) per entry.
  bool relative_step = true;
  // Check at most this many entries per parameter (evenly strided); 0 = all.
  int64_t max_entries_per_param = 0;
};

// Compares the reverse-mode gradient of a scalar function against central
// differences. `f` must rebuild its graph from `params` on every call; the
// params are perturbed in place and restored. Error per entry is
// |analytic - numeric| / max(|analytic|, |numeric|, 1e-8).
// Throws ValueError if f is non-finite at the probe point.
GradCheckResult grad_check(const std::function<Tensor()>& f, std::vector<Tensor> params,
                           const GradCheckOptions& opt = {});

}  // namespace wolonet
