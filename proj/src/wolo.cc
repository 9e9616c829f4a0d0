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

#include "wolonet/wolo.h"

#include <cmath>
#include <string>

#include "autograd.h"
#include "wolonet/ops.h"

namespace wolonet {

using detail::make_result;
using detail::Node;
using detail::parent_data;
using detail::parent_grad;

KernelActivation parse_activation(std::string_view name) {
  if (name == "sine") return KernelActivation::kSine;
  if (name == "tanh") return KernelActivation::kTanh;
  if (name == "softmax") return KernelActivation::kSoftmax;
  throw ValueError("unknown kernel activation '" + std::string(name) +
                   "' (expected sine, tanh or softmax)");
}

std::string_view activation_name(KernelActivation mode) {
  switch (mode) {
    case KernelActivation::kSine: return "sine";
    case KernelActivation::kTanh: return "tanh";
    case KernelActivation::kSoftmax: return "softmax";
  }
  throw ValueError("unknown kernel activation");
}

WoloParams WoloParams::init(int64_t channels, int64_t kernel, int64_t dilation,
                            KernelActivation activation, std::mt19937_64& rng) {
  if (channels < 1) throw ValueError("WoloParams: channels must be >= 1");
  const int64_t m = kernel * kernel + kernel;
  std::normal_distribution<double> normal(0.0, 0.01);
  std::vector<double> u(m * channels), pw(channels * channels);
  for (auto& v : u) v = normal(rng);
  for (auto& v : pw) v = normal(rng);
  WoloParams p;
  p.U = Tensor({m, channels}, std::move(u));
  p.V = Tensor({m}, 0.0);
  p.post_w = Tensor({channels, channels}, std::move(pw));
  p.post_b = Tensor({channels}, 0.0);
  for (Tensor* t : {&p.U, &p.V, &p.post_w, &p.post_b}) t->set_requires_grad(true);
  p.kernel = kernel;
  p.dilation = dilation;
  p.activation = activation;
  p.validate();
  return p;
}

void WoloParams::validate() const {
  if (kernel < 1 || kernel % 2 == 0)
    throw ValueError("WoloParams: kernel size must be odd, got " + std::to_string(kernel));
  if (dilation < 1) throw ValueError("WoloParams: dilation must be >= 1");
  const int64_t m = kernel * kernel + kernel;
  if (post_w.rank() != 2 || post_w.dim(0) != post_w.dim(1))
    throw ShapeError("WoloParams", {post_w.shape()}, "post_w must be C x C");
  const int64_t c = post_w.dim(0);
  if (U.rank() != 2 || U.dim(0) != m || U.dim(1) != c)
    throw ShapeError("WoloParams", {U.shape(), post_w.shape()}, "U must be (K*K + K) x C");
  if (V.rank() != 1 || V.dim(0) != m)
    throw ShapeError("WoloParams", {V.shape(), U.shape()}, "V must have K*K + K entries");
  if (post_b.rank() != 1 || post_b.dim(0) != c)
    throw ShapeError("WoloParams", {post_b.shape(), post_w.shape()}, "post_b must have C entries");
}

int64_t wolo_param_count(int64_t channels, int64_t kernel) {
  return (kernel * kernel + kernel) * (channels + 1) + channels * channels + channels;
}

RawKernels predict_kernels(const Tensor& x, const Tensor& U, const Tensor& V, int64_t kernel) {
  if (x.rank() != 2 && x.rank() != 3)
    throw ShapeError("predict_kernels", {x.shape()}, "expected (C, T) or (N, C, T)");
  const int64_t m = kernel * kernel + kernel;
  const int64_t c = x.dim(-2), t = x.dim(-1);
  if (U.rank() != 2 || U.dim(0) != m || U.dim(1) != c || V.rank() != 1 || V.dim(0) != m)
    throw ShapeError("predict_kernels", {x.shape(), U.shape(), V.shape()},
                     "U must be (K*K + K) x C and V (K*K + K)");
  Tensor pred = add(matmul(transpose(x, -1, -2), transpose(U, 0, 1)), V);
  const int64_t kk = kernel * kernel;
  Shape w_shape{t, kernel, kernel}, b_shape{t, kernel};
  if (x.rank() == 3) {
    w_shape.insert(w_shape.begin(), x.dim(0));
    b_shape.insert(b_shape.begin(), x.dim(0));
  }
  return {reshape(slice(pred, -1, 0, kk), w_shape), reshape(slice(pred, -1, kk, m), b_shape)};
}

Tensor activate_kernel(const Tensor& w_raw, KernelActivation mode) {
  switch (mode) {
    case KernelActivation::kSine: return sin(w_raw);
    case KernelActivation::kTanh: return tanh(w_raw);
    case KernelActivation::kSoftmax: return softmax(w_raw, -1);
  }
  throw ValueError("activate_kernel: unknown activation mode");
}

Tensor apply_dynamic_kernel(const Tensor& W, const Tensor& b, const Tensor& Y) {
  if (Y.rank() != 3 && Y.rank() != 4)
    throw ShapeError("apply_dynamic_kernel", {W.shape(), b.shape(), Y.shape()},
                     "Y must be (T, K, C) or (N, T, K, C)");
  const int64_t kernel = Y.dim(-2), channels = Y.dim(-1);
  Shape lead(Y.shape().begin(), Y.shape().end() - 2);
  Shape w_expect = lead, b_expect = lead;
  w_expect.insert(w_expect.end(), {kernel, kernel});
  b_expect.push_back(kernel);
  if (W.shape() != w_expect || b.shape() != b_expect)
    throw ShapeError("apply_dynamic_kernel", {W.shape(), b.shape(), Y.shape()});
  const int64_t steps = shape_numel(lead);
  const int64_t kk = kernel * kernel, kc = kernel * channels;
  std::vector<double> out(steps * kc);
  const double* pw = W.data().data();
  const double* pb = b.data().data();
  const double* py = Y.data().data();
  for (int64_t s = 0; s < steps; ++s) {
    const double* w = pw + s * kk;
    const double* y = py + s * kc;
    double* o = out.data() + s * kc;
    for (int64_t q = 0; q < kernel; ++q) {
      double* row = o + q * channels;
      const double bias = pb[s * kernel + q];
      for (int64_t c = 0; c < channels; ++c) row[c] = bias;
      for (int64_t p = 0; p < kernel; ++p) {
        const double wqp = w[q * kernel + p];
        const double* yrow = y + p * channels;
        for (int64_t c = 0; c < channels; ++c) row[c] += wqp * yrow[c];
      }
    }
  }
  count_ops(steps * (kk * channels + kc));
  return make_result(
      "apply_dynamic_kernel", Y.shape(), std::move(out), {W, b, Y}, [=](Node& self) {
        const double* g = self.grad.data();
        const double* w = parent_data(self, 0).data();
        const double* y = parent_data(self, 2).data();
        double* gw = parent_grad(self, 0);
        double* gb = parent_grad(self, 1);
        double* gy = parent_grad(self, 2);
        for (int64_t s = 0; s < steps; ++s) {
          const double* gs = g + s * kc;
          for (int64_t q = 0; q < kernel; ++q) {
            const double* grow = gs + q * channels;
            if (gb) {
              double acc = 0.0;
              for (int64_t c = 0; c < channels; ++c) acc += grow[c];
              gb[s * kernel + q] += acc;
            }
            for (int64_t p = 0; p < kernel; ++p) {
              const double* yrow = y + s * kc + p * channels;
              if (gw) {
                double acc = 0.0;
                for (int64_t c = 0; c < channels; ++c) acc += grow[c] * yrow[c];
                gw[s * kk + q * kernel + p] += acc;
              }
              if (gy) {
                const double wqp = w[s * kk + q * kernel + p];
                double* gyrow = gy + s * kc + p * channels;
                for (int64_t c = 0; c < channels; ++c) gyrow[c] += wqp * grow[c];
              }
            }
          }
        }
      });
}

DynamicKernels wolo_kernels(const Tensor& x, const WoloParams& params) {
  params.validate();
  RawKernels raw = predict_kernels(x, params.U, params.V, params.kernel);
  return {activate_kernel(raw.w_raw, params.activation), raw.b};
}

Tensor wolo_attention(const Tensor& x, const WoloParams& params, DynamicKernels* kernels) {
  DynamicKernels k = wolo_kernels(x, params);
  Tensor neighbourhood = unfold1d(x, params.kernel, params.dilation);
  Tensor mixed = apply_dynamic_kernel(k.W, k.b, neighbourhood);
  Tensor out = fold1d(mixed, params.kernel, params.dilation);
  if (kernels) *kernels = std::move(k);
  return out;
}

Tensor wolo_attention_reference(const Tensor& x, const WoloParams& params) {
  params.validate();
  if (x.rank() != 2 && x.rank() != 3)
    throw ShapeError("wolo_attention_reference", {x.shape()}, "expected (C, T) or (N, C, T)");
  const int64_t batch = x.rank() == 3 ? x.dim(0) : 1;
  const int64_t C = x.dim(-2), T = x.dim(-1), K = params.kernel, d = params.dilation;
  if (params.U.dim(1) != C)
    throw ShapeError("wolo_attention_reference", {x.shape(), params.U.shape()});
  const int64_t M = K * K + K, half = K / 2;
  auto X = x.data();
  auto U = params.U.data();
  auto V = params.V.data();
  std::vector<double> out(batch * C * T, 0.0);
  std::vector<double> pred(M), W(K * K), Yhat(K * C);
  for (int64_t n = 0; n < batch; ++n) {
    auto xv = [&](int64_t c, int64_t t) { return X[(n * C + c) * T + t]; };
    for (int64_t t = 0; t < T; ++t) {
      for (int64_t i = 0; i < M; ++i) {
        double acc = V[i];
        for (int64_t c = 0; c < C; ++c) acc += U[i * C + c] * xv(c, t);
        pred[i] = acc;
      }
      for (int64_t q = 0; q < K; ++q) {
        double row_max = -INFINITY, row_sum = 0.0;
        for (int64_t p = 0; p < K; ++p) row_max = std::max(row_max, pred[q * K + p]);
        for (int64_t p = 0; p < K; ++p) row_sum += std::exp(pred[q * K + p] - row_max);
        for (int64_t p = 0; p < K; ++p) {
          double w = pred[q * K + p];
          switch (params.activation) {
            case KernelActivation::kSine: W[q * K + p] = std::sin(w); break;
            case KernelActivation::kTanh: W[q * K + p] = std::tanh(w); break;
            case KernelActivation::kSoftmax: W[q * K + p] = std::exp(w - row_max) / row_sum; break;
          }
        }
      }
      for (int64_t q = 0; q < K; ++q) {
        for (int64_t c = 0; c < C; ++c) {
          double acc = pred[K * K + q];
          for (int64_t p = 0; p < K; ++p) {
            int64_t s = t + (p - half) * d;
            double y = (s >= 0 && s < T) ? xv(c, s) : 0.0;
            acc += W[q * K + p] * y;
          }
          Yhat[q * C + c] = acc;
        }
      }
      // Window tap q of step t lands on position t + (q - K/2) * d.
      for (int64_t q = 0; q < K; ++q) {
        int64_t s = t + (q - half) * d;
        if (s < 0 || s >= T) continue;
        for (int64_t c = 0; c < C; ++c) out[(n * C + c) * T + s] += Yhat[q * C + c];
      }
    }
  }
  return Tensor(x.shape(), std::move(out));
}

Tensor wolo_block(const Tensor& x, const WoloParams& params, DynamicKernels* kernels) {
  const int64_t c = params.channels();
  Tensor h = wolo_attention(leaky_relu(x, kLeakySlope), params, kernels);
  h = leaky_relu(h, kLeakySlope);
  h = conv1d(h, reshape(params.post_w, {c, c, 1}), params.post_b);
  return add(x, h);
}

}  // namespace wolonet
