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

// Differentiable primitives. Every op records itself for backward when any
// input requires grad; otherwise it is a plain forward computation.

#pragma once

#include <vector>

#include "wolonet/tensor.h"

namespace wolonet {

// Elementwise binary ops. The shorter operand broadcasts over the leading
// axes of the longer one, i.e. its shape must be a suffix of the other's.
// A one-element tensor broadcasts everywhere.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

Tensor add_scalar(const Tensor& a, double s);
Tensor mul_scalar(const Tensor& a, double s);
Tensor neg(const Tensor& a);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator*(const Tensor& a, double s) { return mul_scalar(a, s); }
inline Tensor operator*(double s, const Tensor& a) { return mul_scalar(a, s); }
inline Tensor operator+(const Tensor& a, double s) { return add_scalar(a, s); }
inline Tensor operator-(const Tensor& a, double s) { return add_scalar(a, -s); }
inline Tensor operator-(const Tensor& a) { return neg(a); }

// (m,k)x(k,n); (B,m,k)x(B,k,n); (B,m,k)x(k,n); (m,k)x(B,k,n).
Tensor matmul(const Tensor& a, const Tensor& b);

Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
Tensor sum(const Tensor& a, int64_t axis);

Tensor abs(const Tensor& a);
// Throws ValueError on non-finite input.
Tensor log(const Tensor& a);
Tensor clamp_min(const Tensor& a, double floor);
Tensor sin(const Tensor& a);
Tensor tanh(const Tensor& a);
// sqrt(a^2 + b^2); the gradient at the origin is taken as zero.
Tensor hypot(const Tensor& a, const Tensor& b);
Tensor softmax(const Tensor& a, int64_t axis = -1);
Tensor leaky_relu(const Tensor& a, double slope);

struct Conv1dOptions {
  int64_t stride = 1;
  int64_t padding = 0;  // zeros on both ends
  int64_t dilation = 1;
  int64_t groups = 1;
};

// Padding that keeps the length unchanged for stride 1 and odd kernels.
inline int64_t same_padding(int64_t kernel, int64_t dilation = 1) {
  return dilation * (kernel - 1) / 2;
}

// x: (C_in, T) or (N, C_in, T); weight: (C_out, C_in / groups, K);
// bias: undefined or (C_out).
Tensor conv1d(const Tensor& x, const Tensor& weight, const Tensor& bias,
              const Conv1dOptions& opt = {});

struct ConvTranspose1dOptions {
  int64_t stride = 1;
  int64_t padding = 0;
  int64_t output_padding = 0;
  int64_t dilation = 1;
};

// x: (C_in, T) or (N, C_in, T); weight: (C_in, C_out, K); bias: undefined or
// (C_out). Output length (T-1)*stride - 2*padding + dilation*(K-1) +
// output_padding + 1.
Tensor conv_transpose1d(const Tensor& x, const Tensor& weight, const Tensor& bias,
                        const ConvTranspose1dOptions& opt = {});

// Averages over the last axis; zero padding is included in the divisor.
Tensor avg_pool1d(const Tensor& x, int64_t kernel, int64_t stride, int64_t padding = 0);

Tensor reshape(const Tensor& a, Shape shape);
Tensor permute(const Tensor& a, const std::vector<int64_t>& dims);
Tensor transpose(const Tensor& a, int64_t axis0, int64_t axis1);
Tensor slice(const Tensor& a, int64_t axis, int64_t start, int64_t end);

enum class PadMode { kZero, kReflect };
// Pads the last axis. Reflect mode mirrors without repeating the edge sample
// and needs left, right < length.
Tensor pad(const Tensor& a, int64_t left, int64_t right, PadMode mode = PadMode::kZero);
Tensor concat(const std::vector<Tensor>& parts, int64_t axis);

// K-neighbourhood extraction with zero "same" padding.
// x: (C, T) -> (T, K, C) or (N, C, T) -> (N, T, K, C), with
// out[t][p][c] = x[c][t + (p - K/2) * dilation]. K must be odd.
Tensor unfold1d(const Tensor& x, int64_t kernel, int64_t dilation);

// Overlap-add scatter, the exact adjoint of unfold1d:
// (T, K, C) -> (C, T) or (N, T, K, C) -> (N, C, T).
Tensor fold1d(const Tensor& a, int64_t kernel, int64_t dilation);

}  // namespace wolonet
