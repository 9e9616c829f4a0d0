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

// Thin row-major wrappers over CBLAS dgemm. C (m x n) = beta*C + op(A) op(B).

#pragma once

#include <cblas.h>

#include <cstdint>

namespace wolonet::detail {

// C += A B, A: m x k, B: k x n.
inline void gemm_nn(int64_t m, int64_t n, int64_t k, const double* a, const double* b, double* c,
                    double beta = 1.0) {
  if (m == 0 || n == 0) return;
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasNoTrans, static_cast<int>(m),
              static_cast<int>(n), static_cast<int>(k), 1.0, a, static_cast<int>(k), b,
              static_cast<int>(n), beta, c, static_cast<int>(n));
}

// C += A B^T, A: m x k, B: n x k.
inline void gemm_nt(int64_t m, int64_t n, int64_t k, const double* a, const double* b, double* c,
                    double beta = 1.0) {
  if (m == 0 || n == 0) return;
  cblas_dgemm(CblasRowMajor, CblasNoTrans, CblasTrans, static_cast<int>(m), static_cast<int>(n),
              static_cast<int>(k), 1.0, a, static_cast<int>(k), b, static_cast<int>(k), beta, c,
              static_cast<int>(n));
}

// C += A^T B, A: k x m, B: k x n.
inline void gemm_tn(int64_t m, int64_t n, int64_t k, const double* a, const double* b, double* c,
                    double beta = 1.0) {
  if (m == 0 || n == 0) return;
  cblas_dgemm(CblasRowMajor, CblasTrans, CblasNoTrans, static_cast<int>(m), static_cast<int>(n),
              static_cast<int>(k), 1.0, a, static_cast<int>(m), b, static_cast<int>(n), beta, c,
              static_cast<int>(n));
}

}  // namespace wolonet::detail
