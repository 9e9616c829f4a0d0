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

#include "wolonet/adam.h"

#include <cmath>

namespace wolonet {

AdamState AdamState::for_params(const std::vector<Tensor>& params) {
  AdamState s;
  for (const auto& p : params) {
    s.m.emplace_back(p.numel(), 0.0);
    s.v.emplace_back(p.numel(), 0.0);
  }
  return s;
}

bool adam_step(const std::vector<Tensor>& params, const std::vector<std::vector<double>>& grads,
               AdamState& state, double lr, const AdamOptions& opt) {
  if (grads.size() != params.size() || state.m.size() != params.size() ||
      state.v.size() != params.size())
    throw ValueError("adam_step: parameter, gradient and moment counts differ");
  for (size_t i = 0; i < params.size(); ++i) {
    const size_t n = params[i].numel();
    if (grads[i].size() != n || state.m[i].size() != n || state.v[i].size() != n)
      throw ShapeError("adam_step", {params[i].shape()}, "gradient or moment size mismatch");
  }
  for (const auto& g : grads)
    for (double x : g)
      if (!std::isfinite(x)) {
        ++state.skipped;
        return false;
      }

  const int64_t t = state.step + 1;
  const double c1 = 1.0 - std::pow(opt.beta1, static_cast<double>(t));
  const double c2 = 1.0 - std::pow(opt.beta2, static_cast<double>(t));
  for (size_t i = 0; i < params.size(); ++i) {
    Tensor p = params[i];
    auto w = p.mutable_data();
    auto& m = state.m[i];
    auto& v = state.v[i];
    const auto& g = grads[i];
    for (size_t j = 0; j < w.size(); ++j) {
      m[j] = opt.beta1 * m[j] + (1.0 - opt.beta1) * g[j];
      v[j] = opt.beta2 * v[j] + (1.0 - opt.beta2) * g[j] * g[j];
      const double mh = m[j] / c1;
      const double vh = v[j] / c2;
      w[j] -= lr * mh / (std::sqrt(vh) + opt.eps);
    }
  }
  state.step = t;
  return true;
}

bool adam_step(const std::vector<Tensor>& params, AdamState& state, double lr,
               const AdamOptions& opt) {
  std::vector<std::vector<double>> grads;
  grads.reserve(params.size());
  for (const auto& p : params) {
    if (p.has_grad()) {
      auto g = p.grad();
      grads.emplace_back(g.begin(), g.end());
    } else {
      grads.emplace_back(p.numel(), 0.0);
    }
  }
  return adam_step(params, grads, state, lr, opt);
}

double scheduled_lr(double lr0, int64_t step, int64_t halve_every) {
  if (halve_every <= 0) throw ValueError("scheduled_lr: halve_every must be positive");
  if (step < 0) throw ValueError("scheduled_lr: negative step");
  return std::ldexp(lr0, -static_cast<int>(step / halve_every));
}

}  // namespace wolonet
