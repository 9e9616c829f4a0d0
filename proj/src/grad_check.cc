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

#include "wolonet/grad_check.h"

#include <algorithm>
#include <cmath>

namespace wolonet {

namespace {

double evaluate(const std::function<Tensor()>& f) {
  Tensor y = f();
  if (y.numel() != 1) throw ShapeError("grad_check", {y.shape()}, "function must be scalar");
  double v = y.item();
  if (!std::isfinite(v)) throw ValueError("grad_check: non-finite function value at probe");
  return v;
}

}  // namespace

GradCheckResult grad_check(const std::function<Tensor()>& f, std::vector<Tensor> params,
                           const GradCheckOptions& opt) {
  if (opt.step <= 0) throw ValueError("grad_check: step must be positive");
  for (auto& p : params) {
    if (!p.requires_grad()) throw ValueError("grad_check: parameter does not require grad");
    p.zero_grad();
  }
  Tensor y = f();
  if (y.numel() != 1) throw ShapeError("grad_check", {y.shape()}, "function must be scalar");
  if (!std::isfinite(y.item())) throw ValueError("grad_check: non-finite function value at probe");
  y.backward();

  std::vector<std::vector<double>> analytic;
  for (auto& p : params) {
    auto g = p.grad();
    analytic.emplace_back(g.begin(), g.end());
    analytic.back().resize(p.numel(), 0.0);
  }

  GradCheckResult result;
  for (size_t pi = 0; pi < params.size(); ++pi) {
    auto values = params[pi].mutable_data();
    const int64_t n = static_cast<int64_t>(values.size());
    int64_t stride = 1;
    if (opt.max_entries_per_param > 0 && n > opt.max_entries_per_param)
      stride = (n + opt.max_entries_per_param - 1) / opt.max_entries_per_param;
    for (int64_t i = 0; i < n; i += stride) {
      const double theta = values[i];
      const double h = opt.relative_step ? opt.step * std::max(1.0, std::fabs(theta)) : opt.step;
      values[i] = theta + h;
      const double up = evaluate(f);
      values[i] = theta - h;
      const double down = evaluate(f);
      values[i] = theta;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[pi][i];
      const double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-8});
      const double err = std::fabs(a - numeric) / denom;
      ++result.entries_checked;
      if (err > result.max_rel_error || result.worst_index < 0) {
        result.max_rel_error = std::max(err, result.max_rel_error);
        result.worst_param = pi;
        result.worst_index = i;
        result.analytic = a;
        result.numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace wolonet
