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

// Wave outlooker attention: every time step predicts its own K x K mixing
// matrix and K-vector bias from its feature vector. The matrix is applied to
// the step's K-neighbourhood identically on every channel, and the results
// are overlap-added back onto the timeline.
//
//   pred[t]  = U x[:, t] + V                 (K*K + K values)
//   W[t]     = act(pred[t][0 : K*K]) as K x K (row q = output tap, col p = input tap)
//   b[t]     = pred[t][K*K : K*K + K]        (never activated)
//   Y[t][p]  = x[:, t + (p - K/2) * d]       (zero outside the sequence)
//   Yh[t]    = W[t] Y[t] + b[t]              (b[t][q] added to every channel)
//   out[:,s] = sum of Yh[t][p] over all (t, p) with t + (p - K/2) * d == s
//
// The block wraps it as z = x + post(leaky(attn(leaky(x)))) where post is a
// pointwise C x C convolution.

#pragma once

#include <random>
#include <string_view>
#include <vector>

#include "wolonet/tensor.h"

namespace wolonet {

enum class KernelActivation { kSine, kTanh, kSoftmax };

KernelActivation parse_activation(std::string_view name);
std::string_view activation_name(KernelActivation mode);

inline constexpr double kLeakySlope = 0.1;

struct WoloParams {
  Tensor U;       // (K*K + K, C)
  Tensor V;       // (K*K + K)
  Tensor post_w;  // (C, C)
  Tensor post_b;  // (C)
  int64_t kernel = 5;
  int64_t dilation = 1;
  KernelActivation activation = KernelActivation::kSine;

  // U, post_w ~ Normal(0, 0.01); V, post_b = 0. All require grad.
  static WoloParams init(int64_t channels, int64_t kernel, int64_t dilation,
                         KernelActivation activation, std::mt19937_64& rng);

  int64_t channels() const { return post_w.dim(0); }
  void validate() const;
  std::vector<Tensor> tensors() const { return {U, V, post_w, post_b}; }
};

struct RawKernels {
  Tensor w_raw;  // (T, K, K) or (N, T, K, K)
  Tensor b;      // (T, K) or (N, T, K)
};

struct DynamicKernels {
  Tensor W;  // activated, (T, K, K) or (N, T, K, K)
  Tensor b;  // (T, K) or (N, T, K)
};

RawKernels predict_kernels(const Tensor& x, const Tensor& U, const Tensor& V, int64_t kernel);

// Sine/tanh elementwise; softmax over the input-tap axis of each K x K matrix.
Tensor activate_kernel(const Tensor& w_raw, KernelActivation mode);

// Y: (T, K, C) or (N, T, K, C). Yhat[t] = W[t] Y[t] + b[t] broadcast over C.
Tensor apply_dynamic_kernel(const Tensor& W, const Tensor& b, const Tensor& Y);

DynamicKernels wolo_kernels(const Tensor& x, const WoloParams& params);

// x: (C, T) or (N, C, T); same shape out. Optionally returns the kernels used.
Tensor wolo_attention(const Tensor& x, const WoloParams& params, DynamicKernels* kernels = nullptr);

// Plain index loops over the same definition; forward only. Used as a test
// oracle for wolo_attention.
Tensor wolo_attention_reference(const Tensor& x, const WoloParams& params);

Tensor wolo_block(const Tensor& x, const WoloParams& params, DynamicKernels* kernels = nullptr);

// Learnable scalars of one block: (K*K + K)(C + 1) + C*C + C.
int64_t wolo_param_count(int64_t channels, int64_t kernel);

}  // namespace wolonet
