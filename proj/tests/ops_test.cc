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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "test_util.h"
#include "wolonet/checks.h"

namespace wolonet {
namespace {

using testing::max_abs_diff;
using testing::random_tensor;

Tensor matmul_loops(const Tensor& a, const Tensor& b) {
  const int64_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  std::vector<double> out(m * n, 0.0);
  for (int64_t i = 0; i < m; ++i)
    for (int64_t j = 0; j < n; ++j)
      for (int64_t p = 0; p < k; ++p) out[i * n + j] += a.at({i, p}) * b.at({p, j});
  return Tensor({m, n}, out);
}

// Direct definition of a strided, dilated, grouped 1-D convolution.
Tensor conv1d_loops(const Tensor& x, const Tensor& w, const Tensor& b, const Conv1dOptions& o) {
  const int64_t N = x.dim(0), Cin = x.dim(1), T = x.dim(2);
  const int64_t Cout = w.dim(0), cig = w.dim(1), K = w.dim(2);
  const int64_t cog = Cout / o.groups;
  const int64_t Tout = (T + 2 * o.padding - o.dilation * (K - 1) - 1) / o.stride + 1;
  std::vector<double> out(N * Cout * Tout, 0.0);
  for (int64_t n = 0; n < N; ++n)
    for (int64_t co = 0; co < Cout; ++co)
      for (int64_t t = 0; t < Tout; ++t) {
        double acc = b.defined() ? b.data()[co] : 0.0;
        const int64_t g = co / cog;
        for (int64_t ci = 0; ci < cig; ++ci)
          for (int64_t k = 0; k < K; ++k) {
            const int64_t s = t * o.stride + k * o.dilation - o.padding;
            if (s < 0 || s >= T) continue;
            acc += w.at({co, ci, k}) * x.at({n, g * cig + ci, s});
          }
        out[(n * Cout + co) * Tout + t] = acc;
      }
  (void)Cin;
  return Tensor({N, Cout, Tout}, out);
}

Tensor conv_transpose_loops(const Tensor& x, const Tensor& w, const Tensor& b,
                            const ConvTranspose1dOptions& o) {
  const int64_t N = x.dim(0), Cin = x.dim(1), T = x.dim(2);
  const int64_t Cout = w.dim(1), K = w.dim(2);
  const int64_t Tout = (T - 1) * o.stride - 2 * o.padding + o.dilation * (K - 1) + o.output_padding + 1;
  std::vector<double> out(N * Cout * Tout, 0.0);
  for (int64_t n = 0; n < N; ++n)
    for (int64_t co = 0; co < Cout; ++co) {
      for (int64_t t = 0; t < Tout; ++t) out[(n * Cout + co) * Tout + t] = b.data()[co];
      for (int64_t ci = 0; ci < Cin; ++ci)
        for (int64_t t = 0; t < T; ++t)
          for (int64_t k = 0; k < K; ++k) {
            const int64_t s = t * o.stride + k * o.dilation - o.padding;
            if (s < 0 || s >= Tout) continue;
            out[(n * Cout + co) * Tout + s] += x.at({n, ci, t}) * w.at({ci, co, k});
          }
    }
  return Tensor({N, Cout, Tout}, out);
}

TEST(Matmul, MatchesTripleLoop) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const int64_t m = 1 + trial % 5, k = 1 + trial % 7, n = 1 + trial % 4;
    Tensor a = random_tensor({m, k}, rng), b = random_tensor({k, n}, rng);
    EXPECT_LT(max_abs_diff(matmul(a, b), matmul_loops(a, b)), 1e-12);
  }
}

TEST(Matmul, BatchedBroadcastsEitherSide) {
  std::mt19937_64 rng(2);
  Tensor a = random_tensor({3, 2, 4}, rng), b = random_tensor({4, 5}, rng);
  Tensor out = matmul(a, b);
  ASSERT_EQ(out.shape(), (Shape{3, 2, 5}));
  for (int64_t i = 0; i < 3; ++i) {
    Tensor ai = reshape(slice(a, 0, i, i + 1), {2, 4});
    Tensor oi = reshape(slice(out, 0, i, i + 1), {2, 5});
    EXPECT_LT(max_abs_diff(oi, matmul_loops(ai, b)), 1e-12);
  }
  EXPECT_THROW(matmul(random_tensor({2, 3}, rng), random_tensor({4, 2}, rng)), ShapeError);
}

TEST(Elementwise, SuffixBroadcasting) {
  Tensor a({2, 3}, {1, 2, 3, 4, 5, 6});
  Tensor b({3}, {10, 20, 30});
  EXPECT_EQ(testing::values(add(a, b)), (std::vector<double>{11, 22, 33, 14, 25, 36}));
  EXPECT_EQ(testing::values(mul(b, a)), (std::vector<double>{10, 40, 90, 40, 100, 180}));
  EXPECT_THROW(add(a, Tensor({2}, 0.0)), ShapeError);
}

TEST(Elementwise, LogRejectsNonFinite) {
  EXPECT_THROW(log(Tensor({2}, {1.0, NAN})), ValueError);
}

TEST(Softmax, RowsSumToOne) {
  std::mt19937_64 rng(3);
  Tensor s = softmax(random_tensor({4, 7}, rng, 5.0), -1);
  for (int64_t i = 0; i < 4; ++i) {
    double total = 0.0;
    for (int64_t j = 0; j < 7; ++j) total += s.at({i, j});
    EXPECT_NEAR(total, 1.0, 1e-14);
  }
}

TEST(Conv1d, MatchesLoopOracle) {
  std::mt19937_64 rng(4);
  const Conv1dOptions cases[] = {{1, 0, 1, 1}, {2, 1, 1, 1}, {1, 3, 3, 1}, {3, 2, 2, 2}, {2, 4, 1, 4}};
  for (const auto& o : cases) {
    Tensor x = random_tensor({2, 8, 23}, rng);
    Tensor w = random_tensor({8, 8 / o.groups, 5}, rng);
    Tensor b = random_tensor({8}, rng);
    EXPECT_LT(max_abs_diff(conv1d(x, w, b, o), conv1d_loops(x, w, b, o)), 1e-12)
        << "stride " << o.stride << " pad " << o.padding << " dil " << o.dilation;
  }
}

TEST(Conv1d, PaddingWiderThanSignal) {
  std::mt19937_64 rng(14);
  for (int64_t stride : {1, 2, 4}) {
    const Conv1dOptions o{stride, 20, 1, 1};
    Tensor x = random_tensor({1, 2, 3}, rng);
    Tensor w = random_tensor({3, 2, 41}, rng);
    Tensor b = random_tensor({3}, rng);
    EXPECT_LT(max_abs_diff(conv1d(x, w, b, o), conv1d_loops(x, w, b, o)), 1e-12) << "stride " << stride;
  }
}

TEST(Conv1d, UnbatchedInputAndErrors) {
  std::mt19937_64 rng(5);
  Tensor x = random_tensor({3, 10}, rng), w = random_tensor({2, 3, 3}, rng);
  Tensor out = conv1d(x, w, Tensor(), {.padding = 1});
  EXPECT_EQ(out.shape(), (Shape{2, 10}));
  EXPECT_THROW(conv1d(x, random_tensor({2, 4, 3}, rng), Tensor()), ShapeError);
}

TEST(ConvTranspose1d, MatchesLoopOracle) {
  std::mt19937_64 rng(6);
  const ConvTranspose1dOptions cases[] = {{8, 4, 0, 1}, {2, 1, 0, 1}, {3, 0, 2, 1}, {2, 2, 1, 2}};
  for (const auto& o : cases) {
    Tensor x = random_tensor({2, 3, 7}, rng);
    Tensor w = random_tensor({3, 4, 16}, rng);
    Tensor b = random_tensor({4}, rng);
    EXPECT_LT(max_abs_diff(conv_transpose1d(x, w, b, o), conv_transpose_loops(x, w, b, o)), 1e-12);
  }
}

TEST(ConvTranspose1d, UpsamplesByStride) {
  // kernel 2s, padding s/2 (as used by the generator) gives exactly T * s.
  std::mt19937_64 rng(7);
  Tensor x = random_tensor({1, 2, 5}, rng);
  Tensor out = conv_transpose1d(x, random_tensor({2, 2, 16}, rng), Tensor(), {.stride = 8, .padding = 4});
  EXPECT_EQ(out.dim(-1), 40);
}

TEST(AvgPool1d, CountsPaddingInDivisor) {
  Tensor x({1, 1, 6}, {1, 2, 3, 4, 5, 6});
  Tensor y = avg_pool1d(x, 4, 2, 2);
  // windows over [0 0 1 2 3 4 5 6 0 0]
  EXPECT_EQ(testing::values(y), (std::vector<double>{0.75, 2.5, 4.5, 2.75}));
}

TEST(Pad, ReflectMirrorsWithoutEdge) {
  Tensor x({4}, {1, 2, 3, 4});
  EXPECT_EQ(testing::values(pad(x, 2, 3, PadMode::kReflect)),
            (std::vector<double>{3, 2, 1, 2, 3, 4, 3, 2, 1}));
  EXPECT_EQ(testing::values(pad(x, 1, 1)), (std::vector<double>{0, 1, 2, 3, 4, 0}));
  EXPECT_THROW(pad(x, 4, 0, PadMode::kReflect), ShapeError);
}

TEST(Views, PermuteReshapeSliceConcat) {
  Tensor x({2, 3}, {0, 1, 2, 3, 4, 5});
  EXPECT_EQ(testing::values(transpose(x, 0, 1)), (std::vector<double>{0, 3, 1, 4, 2, 5}));
  EXPECT_EQ(reshape(x, {3, -1}).shape(), (Shape{3, 2}));
  EXPECT_EQ(testing::values(slice(x, 1, 1, 3)), (std::vector<double>{1, 2, 4, 5}));
  EXPECT_EQ(testing::values(concat({x, x}, 0)).size(), 12u);
  EXPECT_THROW(reshape(x, {4, -1}), ShapeError);
}

TEST(Unfold1d, MatchesIndexDefinition) {
  std::mt19937_64 rng(8);
  for (int64_t K : {1, 3, 5})
    for (int64_t d : {1, 2, 3}) {
      const int64_t C = 3, T = 11;
      Tensor x = random_tensor({C, T}, rng);
      Tensor u = unfold1d(x, K, d);
      ASSERT_EQ(u.shape(), (Shape{T, K, C}));
      for (int64_t t = 0; t < T; ++t)
        for (int64_t p = 0; p < K; ++p)
          for (int64_t c = 0; c < C; ++c) {
            const int64_t s = t + (p - K / 2) * d;
            const double expect = (s >= 0 && s < T) ? x.at({c, s}) : 0.0;
            EXPECT_EQ(u.at({t, p, c}), expect);
          }
    }
}

TEST(Fold1d, OverlapCountsOfOnes) {
  Tensor ones({5, 3, 1}, 1.0);
  EXPECT_EQ(testing::values(fold1d(ones, 3, 1)), (std::vector<double>{2, 3, 3, 3, 2}));
}

TEST(Fold1d, RejectsEvenKernel) {
  EXPECT_THROW(fold1d(Tensor({4, 2, 1}, 1.0), 2, 1), ValueError);
  EXPECT_THROW(unfold1d(Tensor({1, 4}, 1.0), 4, 1), ValueError);
}

TEST(Fold1d, AdjointOfUnfold) {
  const AdjointReport r = adjoint_check(100, 11);
  EXPECT_LT(r.max_rel_error, 1e-9);
}

}  // namespace
}  // namespace wolonet
