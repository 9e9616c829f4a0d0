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

// Self-checks shared by the command line tool and the test suite.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace wolonet {

struct GradSuiteEntry {
  std::string name;
  double max_rel_error = 0.0;
  int64_t entries_checked = 0;
};

inline constexpr double kGradTolerance = 1e-4;

// Finite-difference checks of one family: "ops" (every tensor primitive),
// "wolo" (block w.r.t. input and each parameter, all activations), "losses"
// or "dsp" (log-mel). "all" runs every family. Each check uses a random
// instance drawn from `seed`.
std::vector<GradSuiteEntry> gradient_suite(const std::string& module, uint64_t seed);
std::vector<std::string> gradient_suite_modules();

struct OracleReport {
  int trials = 0;
  double max_abs_error = 0.0;
  int breaches = 0;
  std::string worst;  // description of the worst instance
};

// wolo_attention against wolo_attention_reference on random instances with
// C <= 8, T <= 32, K in {1, 3, 5}, dilation in {1, 2, 3}; every trial runs all
// three activations.
OracleReport oracle_check(int trials, uint64_t seed, double tolerance = 1e-9);

struct AdjointReport {
  int trials = 0;
  double max_rel_error = 0.0;
};

// <fold1d(A), X> against <A, unfold1d(X)> on random shapes.
AdjointReport adjoint_check(int trials, uint64_t seed);

}  // namespace wolonet
