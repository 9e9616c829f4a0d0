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

// Random inputs and small helpers shared by the unit tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "wolonet/tensor.h"

namespace wolonet::testing {

inline Tensor random_tensor(Shape shape, std::mt19937_64& rng, double scale = 1.0,
                            bool requires_grad = false) {
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> v(shape_numel(shape));
  for (auto& x : v) x = d(rng);
  Tensor t(std::move(shape), std::move(v));
  if (requires_grad) t.set_requires_grad(true);
  return t;
}

inline std::vector<double> values(const Tensor& t) {
  auto d = t.data();
  return {d.begin(), d.end()};
}

inline double max_abs_diff(const Tensor& a, const Tensor& b) {
  auto x = a.data(), y = b.data();
  double m = 0.0;
  for (size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

// FNV-1a over the raw bytes of every tensor.
inline uint64_t hash_tensors(const std::vector<Tensor>& ts) {
  uint64_t h = 1469598103934665603ULL;
  for (const auto& t : ts)
    for (double v : t.data()) {
      const auto* p = reinterpret_cast<const unsigned char*>(&v);
      for (size_t i = 0; i < sizeof v; ++i) h = (h ^ p[i]) * 1099511628211ULL;
    }
  return h;
}

}  // namespace wolonet::testing
