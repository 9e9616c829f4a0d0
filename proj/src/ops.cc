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

#include "wolonet/ops.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "autograd.h"
#include "gemm.h"

namespace wolonet {

using detail::make_result;
using detail::make_view;
using detail::Node;
using detail::parent_data;
using detail::parent_grad;

namespace {

int64_t normalize_axis(const char* op, const Shape& shape, int64_t axis) {
  int64_t r = static_cast<int64_t>(shape.size());
  if (axis < 0) axis += r;
  if (axis < 0 || axis >= r) throw ShapeError(op, {shape}, "axis out of range");
  return axis;
}

// ---------------------------------------------------------------------------
// Broadcasting binary ops

struct Broadcast {
  Shape out;
  int64_t size_a;
  int64_t size_b;
};

bool is_suffix(const Shape& shorter, const Shape& longer) {
  if (shorter.size() > longer.size()) return false;
  return std::equal(shorter.rbegin(), shorter.rend(), longer.rbegin());
}

Broadcast broadcast_shapes(const char* op, const Tensor& a, const Tensor& b) {
  const Shape& sa = a.shape();
  const Shape& sb = b.shape();
  if (sa == sb) return {sa, a.numel(), b.numel()};
  if (b.numel() == 1 || is_suffix(sb, sa)) return {sa, a.numel(), b.numel()};
  if (a.numel() == 1 || is_suffix(sa, sb)) return {sb, a.numel(), b.numel()};
  throw ShapeError(op, {sa, sb}, "trailing dimensions must match");
}

template <typename Fwd, typename DA, typename DB>
Tensor binary_op(const char* op, const Tensor& a, const Tensor& b, Fwd fwd, DA da, DB db,
                 bool counted) {
  Broadcast bc = broadcast_shapes(op, a, b);
  const int64_t n = shape_numel(bc.out);
  const int64_t na = bc.size_a, nb = bc.size_b;
  std::vector<double> out(n);
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  for (int64_t i = 0; i < n; ++i) out[i] = fwd(pa[i % na], pb[i % nb]);
  if (counted) count_ops(n);
  return make_result(op, bc.out, std::move(out), {a, b}, [n, na, nb, da, db](Node& self) {
    const double* g = self.grad.data();
    const double* xa = parent_data(self, 0).data();
    const double* xb = parent_data(self, 1).data();
    if (double* ga = parent_grad(self, 0))
      for (int64_t i = 0; i < n; ++i) ga[i % na] += g[i] * da(xa[i % na], xb[i % nb]);
    if (double* gb = parent_grad(self, 1))
      for (int64_t i = 0; i < n; ++i) gb[i % nb] += g[i] * db(xa[i % na], xb[i % nb]);
  });
}

template <typename Fwd, typename Deriv>
Tensor unary_op(const char* op, const Tensor& a, Fwd fwd, Deriv deriv) {
  const int64_t n = a.numel();
  std::vector<double> out(n);
  const double* pa = a.data().data();
  for (int64_t i = 0; i < n; ++i) out[i] = fwd(pa[i]);
  return make_result(op, a.shape(), std::move(out), {a}, [n, deriv](Node& self) {
    const double* g = self.grad.data();
    const double* x = parent_data(self, 0).data();
    const double* y = self.data->data();
    if (double* ga = parent_grad(self, 0))
      for (int64_t i = 0; i < n; ++i) ga[i] += g[i] * deriv(x[i], y[i]);
  });
}

// ---------------------------------------------------------------------------
// 1-D convolution geometry shared by conv1d, conv_transpose1d, unfold/fold.

struct ConvGeom {
  int64_t channels;
  int64_t length;  // signal length
  int64_t kernel;
  int64_t stride;
  int64_t pad;
  int64_t dilation;
  int64_t cols;  // number of output positions

  // Column range [lo, hi) for which tap k lands inside the signal.
  std::pair<int64_t, int64_t> valid(int64_t k) const {
    int64_t off = k * dilation - pad;
    int64_t lo = off >= 0 ? 0 : std::min(cols, (-off + stride - 1) / stride);
    int64_t last = length - 1 - off;
    int64_t hi = last < 0 ? 0 : last / stride + 1;
    hi = std::min(hi, cols);
    return {lo, std::max(lo, hi)};
  }

  int64_t in_range_taps() const {
    int64_t taps = 0;
    for (int64_t k = 0; k < kernel; ++k) {
      auto [lo, hi] = valid(k);
      taps += hi - lo;
    }
    return taps;
  }
};

// cols[(c*K + k) * cols + t] = sig[c * length + t*stride + k*dilation - pad]
void im2col(const double* sig, const ConvGeom& g, double* cols) {
  for (int64_t c = 0; c < g.channels; ++c) {
    const double* s = sig + c * g.length;
    for (int64_t k = 0; k < g.kernel; ++k) {
      double* row = cols + (c * g.kernel + k) * g.cols;
      auto [lo, hi] = g.valid(k);
      int64_t off = k * g.dilation - g.pad;
      std::fill(row, row + lo, 0.0);
      if (g.stride == 1) {
        std::copy(s + lo + off, s + hi + off, row + lo);
      } else {
        for (int64_t t = lo; t < hi; ++t) row[t] = s[t * g.stride + off];
      }
      std::fill(row + hi, row + g.cols, 0.0);
    }
  }
}

void col2im_add(const double* cols, const ConvGeom& g, double* sig) {
  for (int64_t c = 0; c < g.channels; ++c) {
    double* s = sig + c * g.length;
    for (int64_t k = 0; k < g.kernel; ++k) {
      const double* row = cols + (c * g.kernel + k) * g.cols;
      auto [lo, hi] = g.valid(k);
      int64_t off = k * g.dilation - g.pad;
      if (g.stride == 1) {
        for (int64_t t = lo; t < hi; ++t) s[t + off] += row[t];
      } else {
        for (int64_t t = lo; t < hi; ++t) s[t * g.stride + off] += row[t];
      }
    }
  }
}

struct Batched {
  int64_t batch;
  int64_t channels;
  int64_t length;
  bool had_batch;
};

Batched as_batched(const char* op, const Tensor& x) {
  if (x.rank() == 2) return {1, x.dim(0), x.dim(1), false};
  if (x.rank() == 3) return {x.dim(0), x.dim(1), x.dim(2), true};
  throw ShapeError(op, {x.shape()}, "expected (C, T) or (N, C, T)");
}

Shape batched_shape(const Batched& b, int64_t channels, int64_t length) {
  if (b.had_batch) return {b.batch, channels, length};
  return {channels, length};
}

void check_finite(const char* op, const Tensor& a) {
  for (double v : a.data())
    if (!std::isfinite(v)) throw ValueError(std::string(op) + ": non-finite input");
}

void check_odd_kernel(const char* op, int64_t kernel, int64_t dilation) {
  if (kernel < 1 || kernel % 2 == 0)
    throw ValueError(std::string(op) + ": kernel size must be odd and positive, got " +
                     std::to_string(kernel));
  if (dilation < 1) throw ValueError(std::string(op) + ": dilation must be >= 1");
}

// src (N, C, T) -> dst (N, T, K, C); dst is overwritten.
void unfold_kernel(const double* src, double* dst, int64_t batch, int64_t channels,
                   int64_t length, int64_t kernel, int64_t dilation) {
  const int64_t half = kernel / 2;
  for (int64_t n = 0; n < batch; ++n) {
    const double* x = src + n * channels * length;
    double* y = dst + n * length * kernel * channels;
    for (int64_t t = 0; t < length; ++t) {
      for (int64_t p = 0; p < kernel; ++p) {
        double* row = y + (t * kernel + p) * channels;
        int64_t s = t + (p - half) * dilation;
        if (s < 0 || s >= length) {
          std::fill(row, row + channels, 0.0);
        } else {
          for (int64_t c = 0; c < channels; ++c) row[c] = x[c * length + s];
        }
      }
    }
  }
}

// src (N, T, K, C) scattered and accumulated into dst (N, C, T). Returns the
// number of in-range contributions.
int64_t fold_kernel(const double* src, double* dst, int64_t batch, int64_t channels,
                    int64_t length, int64_t kernel, int64_t dilation) {
  const int64_t half = kernel / 2;
  int64_t contributions = 0;
  for (int64_t n = 0; n < batch; ++n) {
    const double* a = src + n * length * kernel * channels;
    double* y = dst + n * channels * length;
    for (int64_t t = 0; t < length; ++t) {
      for (int64_t p = 0; p < kernel; ++p) {
        int64_t s = t + (p - half) * dilation;
        if (s < 0 || s >= length) continue;
        const double* row = a + (t * kernel + p) * channels;
        for (int64_t c = 0; c < channels; ++c) y[c * length + s] += row[c];
        contributions += channels;
      }
    }
  }
  return contributions;
}

}  // namespace

// ---------------------------------------------------------------------------
// Elementwise

Tensor add(const Tensor& a, const Tensor& b) {
  return binary_op(
      "add", a, b, [](double x, double y) { return x + y; },
      [](double, double) { return 1.0; }, [](double, double) { return 1.0; }, true);
}

Tensor sub(const Tensor& a, const Tensor& b) {
  return binary_op(
      "sub", a, b, [](double x, double y) { return x - y; },
      [](double, double) { return 1.0; }, [](double, double) { return -1.0; }, true);
}

Tensor mul(const Tensor& a, const Tensor& b) {
  return binary_op(
      "mul", a, b, [](double x, double y) { return x * y; },
      [](double, double y) { return y; }, [](double x, double) { return x; }, false);
}

Tensor add_scalar(const Tensor& a, double s) {
  return unary_op(
      "add_scalar", a, [s](double x) { return x + s; }, [](double, double) { return 1.0; });
}

Tensor mul_scalar(const Tensor& a, double s) {
  return unary_op(
      "mul_scalar", a, [s](double x) { return x * s; }, [s](double, double) { return s; });
}

Tensor neg(const Tensor& a) { return mul_scalar(a, -1.0); }

Tensor abs(const Tensor& a) {
  return unary_op(
      "abs", a, [](double x) { return std::fabs(x); },
      [](double x, double) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); });
}

Tensor log(const Tensor& a) {
  check_finite("log", a);
  return unary_op(
      "log", a, [](double x) { return std::log(x); }, [](double x, double) { return 1.0 / x; });
}

Tensor clamp_min(const Tensor& a, double floor) {
  return unary_op(
      "clamp_min", a, [floor](double x) { return x > floor ? x : floor; },
      [floor](double x, double) { return x > floor ? 1.0 : 0.0; });
}

Tensor sin(const Tensor& a) {
  return unary_op(
      "sin", a, [](double x) { return std::sin(x); }, [](double x, double) { return std::cos(x); });
}

Tensor tanh(const Tensor& a) {
  return unary_op(
      "tanh", a, [](double x) { return std::tanh(x); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor leaky_relu(const Tensor& a, double slope) {
  return unary_op(
      "leaky_relu", a, [slope](double x) { return x > 0 ? x : slope * x; },
      [slope](double x, double) { return x > 0 ? 1.0 : slope; });
}

Tensor hypot(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) throw ShapeError("hypot", {a.shape(), b.shape()});
  const int64_t n = a.numel();
  std::vector<double> out(n);
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  for (int64_t i = 0; i < n; ++i) out[i] = std::sqrt(pa[i] * pa[i] + pb[i] * pb[i]);
  return make_result("hypot", a.shape(), std::move(out), {a, b}, [n](Node& self) {
    const double* g = self.grad.data();
    const double* y = self.data->data();
    const double* xa = parent_data(self, 0).data();
    const double* xb = parent_data(self, 1).data();
    double* ga = parent_grad(self, 0);
    double* gb = parent_grad(self, 1);
    for (int64_t i = 0; i < n; ++i) {
      if (y[i] == 0.0) continue;
      double s = g[i] / y[i];
      if (ga) ga[i] += s * xa[i];
      if (gb) gb[i] += s * xb[i];
    }
  });
}

Tensor softmax(const Tensor& a, int64_t axis) {
  axis = normalize_axis("softmax", a.shape(), axis);
  const Shape& s = a.shape();
  int64_t len = s[axis];
  int64_t inner = 1;
  for (size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  int64_t outer = a.numel() / std::max<int64_t>(1, len * inner);
  std::vector<double> out(a.numel());
  const double* x = a.data().data();
  for (int64_t o = 0; o < outer; ++o) {
    for (int64_t i = 0; i < inner; ++i) {
      const int64_t base = o * len * inner + i;
      double mx = -INFINITY;
      for (int64_t j = 0; j < len; ++j) mx = std::max(mx, x[base + j * inner]);
      double z = 0.0;
      for (int64_t j = 0; j < len; ++j) {
        double e = std::exp(x[base + j * inner] - mx);
        out[base + j * inner] = e;
        z += e;
      }
      for (int64_t j = 0; j < len; ++j) out[base + j * inner] /= z;
    }
  }
  return make_result("softmax", s, std::move(out), {a}, [outer, inner, len](Node& self) {
    double* ga = parent_grad(self, 0);
    if (!ga) return;
    const double* g = self.grad.data();
    const double* y = self.data->data();
    for (int64_t o = 0; o < outer; ++o) {
      for (int64_t i = 0; i < inner; ++i) {
        const int64_t base = o * len * inner + i;
        double dot = 0.0;
        for (int64_t j = 0; j < len; ++j) dot += g[base + j * inner] * y[base + j * inner];
        for (int64_t j = 0; j < len; ++j)
          ga[base + j * inner] += y[base + j * inner] * (g[base + j * inner] - dot);
      }
    }
  });
}

// ---------------------------------------------------------------------------
// Reductions

Tensor sum(const Tensor& a) {
  double acc = 0.0;
  for (double v : a.data()) acc += v;
  const int64_t n = a.numel();
  return make_result("sum", Shape{}, {acc}, {a}, [n](Node& self) {
    double* ga = parent_grad(self, 0);
    if (!ga) return;
    const double g = self.grad[0];
    for (int64_t i = 0; i < n; ++i) ga[i] += g;
  });
}

Tensor mean(const Tensor& a) {
  if (a.numel() == 0) throw ShapeError("mean", {a.shape()}, "empty tensor");
  return mul_scalar(sum(a), 1.0 / static_cast<double>(a.numel()));
}

Tensor sum(const Tensor& a, int64_t axis) {
  axis = normalize_axis("sum", a.shape(), axis);
  const Shape& s = a.shape();
  int64_t len = s[axis];
  int64_t inner = 1;
  for (size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  int64_t outer = 1;
  for (int64_t i = 0; i < axis; ++i) outer *= s[i];
  Shape out_shape = s;
  out_shape.erase(out_shape.begin() + axis);
  std::vector<double> out(outer * inner, 0.0);
  const double* x = a.data().data();
  for (int64_t o = 0; o < outer; ++o)
    for (int64_t j = 0; j < len; ++j)
      for (int64_t i = 0; i < inner; ++i) out[o * inner + i] += x[(o * len + j) * inner + i];
  return make_result("sum_axis", out_shape, std::move(out), {a}, [outer, inner, len](Node& self) {
    double* ga = parent_grad(self, 0);
    if (!ga) return;
    const double* g = self.grad.data();
    for (int64_t o = 0; o < outer; ++o)
      for (int64_t j = 0; j < len; ++j)
        for (int64_t i = 0; i < inner; ++i) ga[(o * len + j) * inner + i] += g[o * inner + i];
  });
}

// ---------------------------------------------------------------------------
// Matmul

Tensor matmul(const Tensor& a, const Tensor& b) {
  const int64_t ra = a.rank(), rb = b.rank();
  if (ra < 2 || ra > 3 || rb < 2 || rb > 3)
    throw ShapeError("matmul", {a.shape(), b.shape()}, "expected rank 2 or 3 operands");
  const int64_t m = a.dim(-2), k = a.dim(-1), k2 = b.dim(-2), n = b.dim(-1);
  if (k != k2) throw ShapeError("matmul", {a.shape(), b.shape()}, "inner dimensions differ");
  const int64_t ba = ra == 3 ? a.dim(0) : 1;
  const int64_t bb = rb == 3 ? b.dim(0) : 1;
  if (ra == 3 && rb == 3 && ba != bb)
    throw ShapeError("matmul", {a.shape(), b.shape()}, "batch sizes differ");
  const int64_t batch = std::max(ba, bb);
  const int64_t stride_a = ra == 3 ? m * k : 0;
  const int64_t stride_b = rb == 3 ? k * n : 0;
  Shape out_shape = (ra == 3 || rb == 3) ? Shape{batch, m, n} : Shape{m, n};
  std::vector<double> out(batch * m * n, 0.0);
  const double* pa = a.data().data();
  const double* pb = b.data().data();
  for (int64_t i = 0; i < batch; ++i)
    detail::gemm_nn(m, n, k, pa + i * stride_a, pb + i * stride_b, out.data() + i * m * n, 0.0);
  count_ops(batch * m * n * k);
  return make_result("matmul", out_shape, std::move(out), {a, b},
                     [=](Node& self) {
                       const double* g = self.grad.data();
                       const double* xa = parent_data(self, 0).data();
                       const double* xb = parent_data(self, 1).data();
                       if (double* ga = parent_grad(self, 0))
                         for (int64_t i = 0; i < batch; ++i)
                           detail::gemm_nt(m, k, n, g + i * m * n, xb + i * stride_b,
                                           ga + i * stride_a);
                       if (double* gb = parent_grad(self, 1))
                         for (int64_t i = 0; i < batch; ++i)
                           detail::gemm_tn(k, n, m, xa + i * stride_a, g + i * m * n,
                                           gb + i * stride_b);
                     });
}

// ---------------------------------------------------------------------------
// Convolutions

Tensor conv1d(const Tensor& x, const Tensor& weight, const Tensor& bias,
              const Conv1dOptions& opt) {
  Batched in = as_batched("conv1d", x);
  if (weight.rank() != 3) throw ShapeError("conv1d", {x.shape(), weight.shape()}, "weight rank");
  const int64_t groups = opt.groups;
  const int64_t c_out = weight.dim(0), cg = weight.dim(1), kernel = weight.dim(2);
  if (groups < 1 || in.channels % groups != 0 || c_out % groups != 0 ||
      cg * groups != in.channels)
    throw ShapeError("conv1d", {x.shape(), weight.shape()}, "channel/group mismatch");
  if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != c_out))
    throw ShapeError("conv1d", {weight.shape(), bias.shape()}, "bias shape");
  if (opt.stride < 1 || opt.dilation < 1 || opt.padding < 0)
    throw ValueError("conv1d: stride and dilation must be >= 1, padding >= 0");
  const int64_t span = opt.dilation * (kernel - 1) + 1;
  const int64_t padded = in.length + 2 * opt.padding;
  if (padded < span)
    throw ShapeError("conv1d", {x.shape(), weight.shape()}, "input shorter than kernel span");
  const int64_t t_out = (padded - span) / opt.stride + 1;
  const int64_t cog = c_out / groups;
  const ConvGeom geom{cg, in.length, kernel, opt.stride, opt.padding, opt.dilation, t_out};
  const bool direct = kernel == 1 && opt.stride == 1 && opt.padding == 0;
  const int64_t ck = cg * kernel;

  std::vector<double> out(in.batch * c_out * t_out, 0.0);
  std::vector<double> cols(direct ? 0 : ck * t_out);
  const double* px = x.data().data();
  const double* pw = weight.data().data();
  for (int64_t n = 0; n < in.batch; ++n) {
    for (int64_t g = 0; g < groups; ++g) {
      const double* xg = px + (n * in.channels + g * cg) * in.length;
      double* og = out.data() + (n * c_out + g * cog) * t_out;
      const double* src = xg;
      if (!direct) {
        im2col(xg, geom, cols.data());
        src = cols.data();
      }
      detail::gemm_nn(cog, t_out, ck, pw + g * cog * ck, src, og, 0.0);
    }
  }
  if (bias.defined()) {
    const double* pb = bias.data().data();
    for (int64_t n = 0; n < in.batch; ++n)
      for (int64_t c = 0; c < c_out; ++c) {
        double* row = out.data() + (n * c_out + c) * t_out;
        for (int64_t t = 0; t < t_out; ++t) row[t] += pb[c];
      }
  }
  if (op_counting_active()) {
    count_ops(in.batch * groups * cog * geom.in_range_taps() * cg);
    if (bias.defined()) count_ops(in.batch * c_out * t_out);
  }

  std::vector<Tensor> inputs{x, weight};
  if (bias.defined()) inputs.push_back(bias);
  return make_result(
      "conv1d", batched_shape(in, c_out, t_out), std::move(out), inputs,
      [=](Node& self) {
        const double* gout = self.grad.data();
        const double* xd = parent_data(self, 0).data();
        const double* wd = parent_data(self, 1).data();
        double* gx = parent_grad(self, 0);
        double* gw = parent_grad(self, 1);
        double* gb = self.parents.size() > 2 ? parent_grad(self, 2) : nullptr;
        std::vector<double> buf(direct ? 0 : ck * t_out);
        for (int64_t n = 0; n < in.batch; ++n) {
          for (int64_t g = 0; g < groups; ++g) {
            const double* xg = xd + (n * in.channels + g * cg) * in.length;
            const double* go = gout + (n * c_out + g * cog) * t_out;
            if (gw) {
              const double* src = xg;
              if (!direct) {
                im2col(xg, geom, buf.data());
                src = buf.data();
              }
              detail::gemm_nt(cog, ck, t_out, go, src, gw + g * cog * ck);
            }
            if (gx) {
              double* gxg = gx + (n * in.channels + g * cg) * in.length;
              if (direct) {
                detail::gemm_tn(ck, t_out, cog, wd + g * cog * ck, go, gxg);
              } else {
                detail::gemm_tn(ck, t_out, cog, wd + g * cog * ck, go, buf.data(), 0.0);
                col2im_add(buf.data(), geom, gxg);
              }
            }
          }
        }
        if (gb)
          for (int64_t n = 0; n < in.batch; ++n)
            for (int64_t c = 0; c < c_out; ++c) {
              const double* row = gout + (n * c_out + c) * t_out;
              double acc = 0.0;
              for (int64_t t = 0; t < t_out; ++t) acc += row[t];
              gb[c] += acc;
            }
      });
}

Tensor conv_transpose1d(const Tensor& x, const Tensor& weight, const Tensor& bias,
                        const ConvTranspose1dOptions& opt) {
  Batched in = as_batched("conv_transpose1d", x);
  if (weight.rank() != 3 || weight.dim(0) != in.channels)
    throw ShapeError("conv_transpose1d", {x.shape(), weight.shape()}, "weight shape");
  const int64_t c_out = weight.dim(1), kernel = weight.dim(2);
  if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != c_out))
    throw ShapeError("conv_transpose1d", {weight.shape(), bias.shape()}, "bias shape");
  if (opt.stride < 1 || opt.dilation < 1 || opt.padding < 0 || opt.output_padding < 0)
    throw ValueError("conv_transpose1d: invalid stride/dilation/padding");
  const int64_t t_out = (in.length - 1) * opt.stride - 2 * opt.padding +
                        opt.dilation * (kernel - 1) + opt.output_padding + 1;
  if (t_out < 1) throw ShapeError("conv_transpose1d", {x.shape(), weight.shape()}, "empty output");
  const ConvGeom geom{c_out, t_out, kernel, opt.stride, opt.padding, opt.dilation, in.length};
  const int64_t ck = c_out * kernel;

  std::vector<double> out(in.batch * c_out * t_out, 0.0);
  std::vector<double> cols(ck * in.length);
  const double* px = x.data().data();
  const double* pw = weight.data().data();
  for (int64_t n = 0; n < in.batch; ++n) {
    detail::gemm_tn(ck, in.length, in.channels, pw, px + n * in.channels * in.length,
                    cols.data(), 0.0);
    col2im_add(cols.data(), geom, out.data() + n * c_out * t_out);
  }
  if (bias.defined()) {
    const double* pb = bias.data().data();
    for (int64_t n = 0; n < in.batch; ++n)
      for (int64_t c = 0; c < c_out; ++c) {
        double* row = out.data() + (n * c_out + c) * t_out;
        for (int64_t t = 0; t < t_out; ++t) row[t] += pb[c];
      }
  }
  if (op_counting_active()) {
    count_ops(in.batch * in.channels * c_out * geom.in_range_taps());
    if (bias.defined()) count_ops(in.batch * c_out * t_out);
  }

  std::vector<Tensor> inputs{x, weight};
  if (bias.defined()) inputs.push_back(bias);
  return make_result(
      "conv_transpose1d", batched_shape(in, c_out, t_out), std::move(out), inputs,
      [=](Node& self) {
        const double* gout = self.grad.data();
        const double* xd = parent_data(self, 0).data();
        const double* wd = parent_data(self, 1).data();
        double* gx = parent_grad(self, 0);
        double* gw = parent_grad(self, 1);
        double* gb = self.parents.size() > 2 ? parent_grad(self, 2) : nullptr;
        std::vector<double> buf(ck * in.length);
        if (gx || gw) {
          for (int64_t n = 0; n < in.batch; ++n) {
            im2col(gout + n * c_out * t_out, geom, buf.data());
            if (gx)
              detail::gemm_nn(in.channels, in.length, ck, wd, buf.data(),
                              gx + n * in.channels * in.length);
            if (gw)
              detail::gemm_nt(in.channels, ck, in.length, xd + n * in.channels * in.length,
                              buf.data(), gw);
          }
        }
        if (gb)
          for (int64_t n = 0; n < in.batch; ++n)
            for (int64_t c = 0; c < c_out; ++c) {
              const double* row = gout + (n * c_out + c) * t_out;
              double acc = 0.0;
              for (int64_t t = 0; t < t_out; ++t) acc += row[t];
              gb[c] += acc;
            }
      });
}

Tensor avg_pool1d(const Tensor& x, int64_t kernel, int64_t stride, int64_t padding) {
  if (x.rank() < 1) throw ShapeError("avg_pool1d", {x.shape()}, "needs at least one axis");
  if (kernel < 1 || stride < 1 || padding < 0 || padding > kernel / 2)
    throw ValueError("avg_pool1d: invalid kernel/stride/padding");
  const int64_t len = x.dim(-1);
  const int64_t rows = x.numel() / std::max<int64_t>(1, len);
  if (len + 2 * padding < kernel)
    throw ShapeError("avg_pool1d", {x.shape()}, "input shorter than pooling window");
  const int64_t t_out = (len + 2 * padding - kernel) / stride + 1;
  Shape out_shape = x.shape();
  out_shape.back() = t_out;
  const double inv = 1.0 / static_cast<double>(kernel);
  std::vector<double> out(rows * t_out, 0.0);
  const double* px = x.data().data();
  for (int64_t r = 0; r < rows; ++r)
    for (int64_t t = 0; t < t_out; ++t) {
      double acc = 0.0;
      for (int64_t k = 0; k < kernel; ++k) {
        int64_t s = t * stride + k - padding;
        if (s >= 0 && s < len) acc += px[r * len + s];
      }
      out[r * t_out + t] = acc * inv;
    }
  return make_result("avg_pool1d", out_shape, std::move(out), {x}, [=](Node& self) {
    double* gx = parent_grad(self, 0);
    if (!gx) return;
    const double* g = self.grad.data();
    for (int64_t r = 0; r < rows; ++r)
      for (int64_t t = 0; t < t_out; ++t) {
        double v = g[r * t_out + t] * inv;
        for (int64_t k = 0; k < kernel; ++k) {
          int64_t s = t * stride + k - padding;
          if (s >= 0 && s < len) gx[r * len + s] += v;
        }
      }
  });
}

// ---------------------------------------------------------------------------
// Layout

Tensor reshape(const Tensor& a, Shape shape) {
  int64_t infer = -1;
  int64_t known = 1;
  for (size_t i = 0; i < shape.size(); ++i) {
    if (shape[i] == -1) {
      if (infer >= 0) throw ShapeError("reshape", {a.shape(), shape}, "two inferred axes");
      infer = static_cast<int64_t>(i);
    } else {
      known *= shape[i];
    }
  }
  if (infer >= 0 && known > 0) shape[infer] = a.numel() / known;
  if (shape_numel(shape) != a.numel()) throw ShapeError("reshape", {a.shape(), shape});
  const int64_t n = a.numel();
  return make_view("reshape", a, std::move(shape), [n](Node& self) {
    double* ga = parent_grad(self, 0);
    if (!ga) return;
    const double* g = self.grad.data();
    for (int64_t i = 0; i < n; ++i) ga[i] += g[i];
  });
}

Tensor permute(const Tensor& a, const std::vector<int64_t>& dims) {
  const Shape& s = a.shape();
  const size_t r = s.size();
  if (dims.size() != r) throw ShapeError("permute", {s}, "dims length != rank");
  std::vector<bool> used(r, false);
  for (int64_t d : dims) {
    if (d < 0 || d >= static_cast<int64_t>(r) || used[d])
      throw ShapeError("permute", {s}, "invalid permutation");
    used[d] = true;
  }
  Shape out_shape(r);
  std::vector<int64_t> in_strides(r, 1);
  for (int64_t i = static_cast<int64_t>(r) - 2; i >= 0; --i)
    in_strides[i] = in_strides[i + 1] * s[i + 1];
  std::vector<int64_t> strides(r);  // input stride for each output axis
  for (size_t i = 0; i < r; ++i) {
    out_shape[i] = s[dims[i]];
    strides[i] = in_strides[dims[i]];
  }
  const int64_t n = a.numel();
  // Map each output flat index to its source flat index once.
  auto index_map = std::make_shared<std::vector<int64_t>>(n);
  {
    std::vector<int64_t> counter(r, 0);
    int64_t src = 0;
    for (int64_t i = 0; i < n; ++i) {
      (*index_map)[i] = src;
      for (int64_t ax = static_cast<int64_t>(r) - 1; ax >= 0; --ax) {
        if (++counter[ax] < out_shape[ax]) {
          src += strides[ax];
          break;
        }
        src -= strides[ax] * (out_shape[ax] - 1);
        counter[ax] = 0;
      }
    }
  }
  std::vector<double> out(n);
  const double* px = a.data().data();
  for (int64_t i = 0; i < n; ++i) out[i] = px[(*index_map)[i]];
  return make_result("permute", out_shape, std::move(out), {a}, [n, index_map](Node& self) {
    double* ga = parent_grad(self, 0);
    if (!ga) return;
    const double* g = self.grad.data();
    for (int64_t i = 0; i < n; ++i) ga[(*index_map)[i]] += g[i];
  });
}

Tensor transpose(const Tensor& a, int64_t axis0, int64_t axis1) {
  axis0 = normalize_axis("transpose", a.shape(), axis0);
  axis1 = normalize_axis("transpose", a.shape(), axis1);
  std::vector<int64_t> dims(a.rank());
  std::iota(dims.begin(), dims.end(), 0);
  std::swap(dims[axis0], dims[axis1]);
  return permute(a, dims);
}

Tensor slice(const Tensor& a, int64_t axis, int64_t start, int64_t end) {
  axis = normalize_axis("slice", a.shape(), axis);
  const Shape& s = a.shape();
  const int64_t len = s[axis];
  if (start < 0 || end > len || start > end)
    throw ShapeError("slice", {s}, "range [" + std::to_string(start) + ", " +
                                       std::to_string(end) + ") out of bounds");
  int64_t inner = 1;
  for (size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
  int64_t outer = 1;
  for (int64_t i = 0; i < axis; ++i) outer *= s[i];
  const int64_t width = end - start;
  Shape out_shape = s;
  out_shape[axis] = width;
  std::vector<double> out(outer * width * inner);
  const double* px = a.data().data();
  for (int64_t o = 0; o < outer; ++o)
    std::copy(px + (o * len + start) * inner, px + (o * len + end) * inner,
              out.data() + o * width * inner);
  return make_result("slice", out_shape, std::move(out), {a}, [=](Node& self) {
    double* ga = parent_grad(self, 0);
    if (!ga) return;
    const double* g = self.grad.data();
    for (int64_t o = 0; o < outer; ++o) {
      double* dst = ga + (o * len + start) * inner;
      const double* src = g + o * width * inner;
      for (int64_t i = 0; i < width * inner; ++i) dst[i] += src[i];
    }
  });
}

Tensor pad(const Tensor& a, int64_t left, int64_t right, PadMode mode) {
  if (a.rank() < 1) throw ShapeError("pad", {a.shape()}, "needs at least one axis");
  if (left < 0 || right < 0) throw ValueError("pad: negative padding");
  const int64_t len = a.dim(-1);
  if (mode == PadMode::kReflect && (left >= len || right >= len))
    throw ShapeError("pad", {a.shape()}, "reflect padding must be shorter than the signal");
  const int64_t rows = a.numel() / std::max<int64_t>(1, len);
  const int64_t out_len = len + left + right;
  Shape out_shape = a.shape();
  out_shape.back() = out_len;
  // Source index for each padded position, -1 for zeros.
  auto src = std::make_shared<std::vector<int64_t>>(out_len);
  for (int64_t t = 0; t < out_len; ++t) {
    int64_t i = t - left;
    if (i >= 0 && i < len) {
      (*src)[t] = i;
    } else if (mode == PadMode::kZero) {
      (*src)[t] = -1;
    } else {
      (*src)[t] = i < 0 ? -i : 2 * (len - 1) - i;
    }
  }
  std::vector<double> out(rows * out_len);
  const double* px = a.data().data();
  for (int64_t r = 0; r < rows; ++r)
    for (int64_t t = 0; t < out_len; ++t) {
      int64_t i = (*src)[t];
      out[r * out_len + t] = i < 0 ? 0.0 : px[r * len + i];
    }
  return make_result("pad", out_shape, std::move(out), {a}, [=](Node& self) {
    double* ga = parent_grad(self, 0);
    if (!ga) return;
    const double* g = self.grad.data();
    for (int64_t r = 0; r < rows; ++r)
      for (int64_t t = 0; t < out_len; ++t) {
        int64_t i = (*src)[t];
        if (i >= 0) ga[r * len + i] += g[r * out_len + t];
      }
  });
}

Tensor concat(const std::vector<Tensor>& parts, int64_t axis) {
  if (parts.empty()) throw ShapeError("concat", {}, "no inputs");
  const Shape& s0 = parts[0].shape();
  axis = normalize_axis("concat", s0, axis);
  std::vector<int64_t> widths;
  int64_t total = 0;
  for (const auto& p : parts) {
    const Shape& s = p.shape();
    if (s.size() != s0.size()) throw ShapeError("concat", {s0, s}, "rank mismatch");
    for (size_t i = 0; i < s.size(); ++i)
      if (static_cast<int64_t>(i) != axis && s[i] != s0[i])
        throw ShapeError("concat", {s0, s}, "non-concat axes differ");
    widths.push_back(s[axis]);
    total += s[axis];
  }
  int64_t inner = 1;
  for (size_t i = axis + 1; i < s0.size(); ++i) inner *= s0[i];
  int64_t outer = 1;
  for (int64_t i = 0; i < axis; ++i) outer *= s0[i];
  Shape out_shape = s0;
  out_shape[axis] = total;
  std::vector<double> out(outer * total * inner);
  int64_t offset = 0;
  for (size_t k = 0; k < parts.size(); ++k) {
    const double* px = parts[k].data().data();
    const int64_t w = widths[k] * inner;
    for (int64_t o = 0; o < outer; ++o)
      std::copy(px + o * w, px + (o + 1) * w, out.data() + o * total * inner + offset);
    offset += w;
  }
  return make_result("concat", out_shape, std::move(out), parts, [=](Node& self) {
    const double* g = self.grad.data();
    int64_t off = 0;
    for (size_t k = 0; k < widths.size(); ++k) {
      const int64_t w = widths[k] * inner;
      if (double* gp = parent_grad(self, k))
        for (int64_t o = 0; o < outer; ++o)
          for (int64_t i = 0; i < w; ++i) gp[o * w + i] += g[o * total * inner + off + i];
      off += w;
    }
  });
}

// ---------------------------------------------------------------------------
// Neighbourhood extraction / aggregation

Tensor unfold1d(const Tensor& x, int64_t kernel, int64_t dilation) {
  check_odd_kernel("unfold1d", kernel, dilation);
  Batched in = as_batched("unfold1d", x);
  const int64_t batch = in.batch, channels = in.channels, length = in.length;
  std::vector<double> out(batch * length * kernel * channels);
  unfold_kernel(x.data().data(), out.data(), batch, channels, length, kernel, dilation);
  Shape out_shape = in.had_batch ? Shape{batch, length, kernel, channels}
                                 : Shape{length, kernel, channels};
  return make_result("unfold1d", out_shape, std::move(out), {x}, [=](Node& self) {
    if (double* gx = parent_grad(self, 0))
      fold_kernel(self.grad.data(), gx, batch, channels, length, kernel, dilation);
  });
}

Tensor fold1d(const Tensor& a, int64_t kernel, int64_t dilation) {
  check_odd_kernel("fold1d", kernel, dilation);
  if ((a.rank() != 3 && a.rank() != 4) || a.dim(-2) != kernel)
    throw ShapeError("fold1d", {a.shape()}, "expected (T, K, C) or (N, T, K, C)");
  const bool had_batch = a.rank() == 4;
  const int64_t batch = had_batch ? a.dim(0) : 1;
  const int64_t length = a.dim(-3), channels = a.dim(-1);
  std::vector<double> out(batch * channels * length, 0.0);
  int64_t adds = fold_kernel(a.data().data(), out.data(), batch, channels, length, kernel,
                             dilation);
  count_ops(adds);
  Shape out_shape = had_batch ? Shape{batch, channels, length} : Shape{channels, length};
  return make_result("fold1d", out_shape, std::move(out), {a}, [=](Node& self) {
    double* ga = parent_grad(self, 0);
    if (!ga) return;
    std::vector<double> tmp(batch * length * kernel * channels);
    unfold_kernel(self.grad.data(), tmp.data(), batch, channels, length, kernel, dilation);
    for (size_t i = 0; i < tmp.size(); ++i) ga[i] += tmp[i];
  });
}

}  // namespace wolonet
