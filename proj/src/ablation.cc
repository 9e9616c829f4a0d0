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

#include "wolonet/ablation.h"

#include <cmath>
#include <limits>

#include "wolonet/checkpoint.h"
#include "wolonet/data.h"

namespace wolonet {

KernelStats kernel_stats(const std::vector<DynamicKernels>& kernels) {
  KernelStats st;
  st.min_value = std::numeric_limits<double>::infinity();
  st.max_value = -std::numeric_limits<double>::infinity();
  for (const auto& k : kernels) {
    const int64_t K = k.W.dim(-1);
    auto w = k.W.data();
    for (size_t row = 0; row * K < w.size(); ++row) {
      double s = 0.0;
      for (int64_t p = 0; p < K; ++p) {
        const double v = w[row * K + p];
        if (!std::isfinite(v)) st.finite = false;
        st.min_value = std::min(st.min_value, v);
        st.max_value = std::max(st.max_value, v);
        s += v;
      }
      st.max_row_sum_error = std::max(st.max_row_sum_error, std::fabs(s - 1.0));
    }
  }
  return st;
}

bool kernels_valid(const KernelStats& st, KernelActivation mode) {
  if (!st.finite) return false;
  switch (mode) {
    case KernelActivation::kSine:
      return st.min_value >= -1.0 && st.max_value <= 1.0;
    case KernelActivation::kTanh:
      return st.min_value > -1.0 && st.max_value < 1.0;
    case KernelActivation::kSoftmax:
      return st.min_value >= 0.0 && st.max_row_sum_error <= 1e-12;
  }
  return false;
}

AblationResult run_ablation(const RunConfig& base, KernelActivation mode, int64_t clips,
                            const std::optional<std::filesystem::path>& out_dir) {
  RunConfig cfg = base;
  cfg.generator.activation = mode;
  AblationResult res;
  res.mode = mode;
  const int64_t val_clips = std::max<int64_t>(1, cfg.train.validation_clips);
  Dataset train_set = synthetic_dataset(clips, cfg.train.seed, cfg.mel.sample_rate);
  Dataset val_set = synthetic_dataset(val_clips, cfg.train.seed ^ 0x5bd1e995ULL, cfg.mel.sample_rate);

  Trainer trainer(cfg.train, cfg.generator, cfg.mel, std::move(train_set), val_set);
  if (out_dir) trainer.set_dump_dir(*out_dir / "nonfinite_batch");
  try {
    while (trainer.current_step() < cfg.train.total_steps) {
      res.last = trainer.step();
      ++res.steps;
    }
  } catch (const NonFiniteLossError&) {
    res.finite = false;
  }
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    save_generator(*out_dir / "generator.ckpt", trainer.generator(), cfg.mel);
  }

  // Kernels on a held-out clip.
  const int64_t hop = cfg.mel.hop;
  const auto& clip = val_set.clips.front();
  const int64_t len = std::min<int64_t>(static_cast<int64_t>(clip.size()) / hop * hop,
                                        cfg.train.segment_samples);
  NoGradGuard no_grad;
  Tensor mel = log_mel(Tensor({len}, std::vector<double>(clip.begin(), clip.begin() + len)), cfg.mel);
  std::vector<DynamicKernels> kernels;
  trainer.generator().forward(mel, &kernels);
  res.kernels = kernel_stats(kernels);
  res.passed = res.finite && kernels_valid(res.kernels, mode);
  return res;
}

}  // namespace wolonet
