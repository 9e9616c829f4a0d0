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

// Internal helpers for building graph nodes. Not installed.

#pragma once

#include <functional>
#include <vector>

#include "wolonet/tensor.h"

namespace wolonet::detail {

using BackwardFn = std::function<void(Node& self)>;

// Wraps a freshly computed value in a node. When any input requires grad the
// node keeps the inputs as parents (same order) and the backward rule.
Tensor make_result(const char* op, Shape shape, std::vector<double> data,
                   const std::vector<Tensor>& inputs, BackwardFn backward);

// Result sharing storage with `source` (reshape, detach-free views).
Tensor make_view(const char* op, const Tensor& source, Shape shape, BackwardFn backward);

// Gradient buffer of parent i, or nullptr if it does not take gradients.
inline double* parent_grad(Node& self, size_t i) {
  Node* p = self.parents[i].get();
  return (p && p->requires_grad) ? p->grad_buffer() : nullptr;
}

inline const std::vector<double>& parent_data(const Node& self, size_t i) {
  return *self.parents[i]->data;
}

}  // namespace wolonet::detail
