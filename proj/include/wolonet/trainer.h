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

// Alternating least-squares GAN training of the generator against the
// discriminator bank.
//
// Each step draws a batch, synthesises it once, updates the discriminators on
// the detached fake, then updates the generator through the freshly updated
// (frozen) discriminators. The random stream of step s is seeded from
// (seed, s) alone, so a run resumed from a checkpoint replays exactly.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wolonet/adam.h"
#include "wolonet/data.h"
#include "wolonet/discriminator.h"
#include "wolonet/dsp.h"
#include "wolonet/generator.h"
#include "wolonet/losses.h"

namespace wolonet {

struct TrainConfig {
  double lr = 2e-4;
  int64_t lr_halve_every = 1000;
  double beta1 = 0.8;
  double beta2 = 0.99;
  int64_t batch_size = 4;
  int64_t segment_samples = 8192;
  int64_t total_steps = 2000;
  uint64_t seed = 1234;
  int64_t checkpoint_every = 500;  // 0 disables intermediate checkpoints
  int64_t validate_every = 50;     // 0 disables validation
  int64_t validation_clips = 4;
  LossWeights weights;
  DiscriminatorConfig disc;

  // Throws ValueError; `hop` is the mel hop size.
  void validate(int64_t hop) const;
};

struct StepLog {
  int64_t step = 0;
  double loss_d = 0.0;
  double loss_g = 0.0;
  double loss_mel = 0.0;
  double loss_fm = 0.0;
  double lr = 0.0;
};

struct ValidationLog {
  int64_t step = 0;
  double mel_l1 = 0.0;
};

class NonFiniteLossError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class TrainPhase { kDiscriminatorUpdated, kGeneratorUpdated };

class Trainer {
 public:
  // `validation` may be empty, in which case validate() throws.
  Trainer(TrainConfig cfg, GeneratorConfig gen_cfg, MelConfig mel_cfg, Dataset train,
          Dataset validation);
  Trainer(const Trainer&) = delete;
  Trainer& operator=(const Trainer&) = delete;

  // Runs step current_step() + 1. On a non-finite loss the batch is written
  // to `dump_dir` (when set) and NonFiniteLossError is thrown.
  StepLog step();
  // Mean |log_mel(x) - log_mel(G(log_mel(x)))| over the validation clips,
  // each trimmed to a whole number of hops.
  double validate() const;

  int64_t current_step() const { return step_; }
  bool has_validation() const { return !validation_.empty(); }
  double lr_for_step(int64_t step) const;

  const TrainConfig& config() const { return cfg_; }
  const Generator& generator() const { return gen_; }
  const DiscriminatorBank& discriminators() const { return disc_; }
  const AdamState& gen_optimizer() const { return opt_g_; }
  const AdamState& disc_optimizer() const { return opt_d_; }
  const MelConfig& mel_config() const { return mel_.config(); }

  void set_dump_dir(std::filesystem::path dir) { dump_dir_ = std::move(dir); }
  // Called after each half-step's optimiser update.
  void set_phase_observer(std::function<void(TrainPhase)> fn) { observer_ = std::move(fn); }

  // Full state: both networks, both optimisers, step and seed, in float64.
  void save(const std::filesystem::path& path) const;
  // Restores a state written by save(). Network shapes must match.
  void load(const std::filesystem::path& path);

 private:
  void dump_batch(const Batch& batch, const std::string& what) const;

  TrainConfig cfg_;
  MelExtractor mel_;
  Dataset train_;
  Dataset validation_;
  SegmentSampler sampler_;
  Generator gen_;
  DiscriminatorBank disc_;
  std::vector<Tensor> gen_params_;
  std::vector<Tensor> disc_params_;
  AdamState opt_g_;
  AdamState opt_d_;
  int64_t step_ = 0;
  std::optional<std::filesystem::path> dump_dir_;
  std::function<void(TrainPhase)> observer_;
};

struct TrainResult {
  std::vector<StepLog> steps;
  std::vector<ValidationLog> validations;
};

struct TrainCallbacks {
  std::function<void(const StepLog&)> on_step;
  std::function<void(const ValidationLog&)> on_validation;
};

// Runs until cfg.total_steps. With an output directory, writes metrics.csv,
// validation.csv, checkpoint_<step>.ckpt every checkpoint_every steps,
// state.ckpt (resumable) and generator.ckpt (float32 export) at the end.
// `resume` continues from a state written by Trainer::save.
TrainResult train(const TrainConfig& cfg, const GeneratorConfig& gen_cfg, const MelConfig& mel_cfg,
                  Dataset train_set, Dataset validation_set,
                  const std::optional<std::filesystem::path>& out_dir = std::nullopt,
                  const std::optional<std::filesystem::path>& resume = std::nullopt,
                  const TrainCallbacks& callbacks = {});

std::string metrics_csv_header();
std::string metrics_csv_row(const StepLog& log);

}  // namespace wolonet
