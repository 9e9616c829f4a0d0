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

#include "wolonet/trainer.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "wolonet/checkpoint.h"
#include "wolonet/ops.h"

namespace wolonet {

void TrainConfig::validate(int64_t hop) const {
  if (!(lr > 0.0)) throw ValueError("TrainConfig: lr must be positive");
  if (lr_halve_every < 1) throw ValueError("TrainConfig: lr_halve_every must be >= 1");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0))
    throw ValueError("TrainConfig: betas must lie in [0, 1)");
  if (batch_size < 1) throw ValueError("TrainConfig: batch_size must be >= 1");
  if (segment_samples < hop || segment_samples % hop != 0)
    throw ValueError("TrainConfig: segment_samples (" + std::to_string(segment_samples) +
                     ") must be a positive multiple of the hop (" + std::to_string(hop) + ")");
  if (total_steps < 0) throw ValueError("TrainConfig: total_steps must be >= 0");
  if (checkpoint_every < 0 || validate_every < 0)
    throw ValueError("TrainConfig: checkpoint_every and validate_every must be >= 0");
  if (validation_clips < 0) throw ValueError("TrainConfig: validation_clips must be >= 0");
  weights.validate();
  disc.validate();
}

namespace {

std::vector<Tensor> values_of(const std::vector<NamedTensor>& named) {
  std::vector<Tensor> out;
  for (const auto& n : named) out.push_back(n.value);
  return out;
}

// Freezes a parameter set for the lifetime of the guard.
class FreezeGuard {
 public:
  explicit FreezeGuard(const std::vector<Tensor>& params) : params_(params) {
    for (auto& p : params_) p.set_requires_grad(false);
  }
  ~FreezeGuard() {
    for (auto& p : params_) p.set_requires_grad(true);
  }

 private:
  std::vector<Tensor> params_;
};

void zero_grads(std::vector<Tensor>& params) {
  for (auto& p : params) p.zero_grad();
}

bool finite(const Tensor& scalar) { return std::isfinite(scalar.item()); }

void add_adam_state(std::vector<NamedTensor>& out, const std::string& prefix,
                    const std::vector<NamedTensor>& params, const AdamState& s) {
  for (size_t i = 0; i < params.size(); ++i) {
    out.push_back({prefix + ".m." + params[i].name, Tensor(params[i].value.shape(), s.m[i])});
    out.push_back({prefix + ".v." + params[i].name, Tensor(params[i].value.shape(), s.v[i])});
  }
  out.push_back({prefix + ".step", Tensor::scalar(static_cast<double>(s.step))});
  out.push_back({prefix + ".skipped", Tensor::scalar(static_cast<double>(s.skipped))});
}

void read_adam_state(const std::vector<NamedTensor>& file, const std::string& prefix,
                     const std::vector<NamedTensor>& params, AdamState& s) {
  for (size_t i = 0; i < params.size(); ++i) {
    for (auto [kind, dst] : {std::pair{".m.", &s.m[i]}, std::pair{".v.", &s.v[i]}}) {
      const Tensor& t = find_tensor(file, prefix + kind + params[i].name);
      if (t.shape() != params[i].value.shape())
        throw FormatError("optimizer moment shape mismatch for " + params[i].name);
      auto d = t.data();
      dst->assign(d.begin(), d.end());
    }
  }
  s.step = std::llround(find_tensor(file, prefix + ".step").item());
  s.skipped = std::llround(find_tensor(file, prefix + ".skipped").item());
}

}  // namespace

Trainer::Trainer(TrainConfig cfg, GeneratorConfig gen_cfg, MelConfig mel_cfg, Dataset train,
                 Dataset validation)
    : cfg_(std::move(cfg)),
      mel_(std::move(mel_cfg)),
      train_(std::move(train)),
      validation_(std::move(validation)),
      sampler_(train_, cfg_.segment_samples, mel_) {
  cfg_.validate(mel_.config().hop);
  if (gen_cfg.hop != mel_.config().hop)
    throw ValueError("generator hop (" + std::to_string(gen_cfg.hop) + ") differs from mel hop (" +
                     std::to_string(mel_.config().hop) + ")");
  if (gen_cfg.mel_bins != mel_.config().n_mels)
    throw ValueError("generator mel_bins differs from the mel configuration");
  gen_ = Generator::build(gen_cfg, cfg_.seed);
  disc_ = DiscriminatorBank::build(cfg_.disc, cfg_.seed ^ 0x9e3779b97f4a7c15ULL);
  gen_params_ = values_of(gen_.named_parameters());
  disc_params_ = values_of(disc_.named_parameters());
  opt_g_ = AdamState::for_params(gen_params_);
  opt_d_ = AdamState::for_params(disc_params_);
}

double Trainer::lr_for_step(int64_t step) const {
  return scheduled_lr(cfg_.lr, step, cfg_.lr_halve_every);
}

StepLog Trainer::step() {
  const int64_t s = step_ + 1;
  std::seed_seq seq{static_cast<uint32_t>(cfg_.seed), static_cast<uint32_t>(cfg_.seed >> 32),
                    static_cast<uint32_t>(s), static_cast<uint32_t>(s >> 32)};
  std::mt19937_64 rng(seq);
  const Batch batch = sampler_.sample_batch(cfg_.batch_size, rng);
  const double lr = lr_for_step(s);
  const AdamOptions adam{cfg_.beta1, cfg_.beta2, 1e-8};

  zero_grads(gen_params_);
  zero_grads(disc_params_);
  Tensor fake = gen_.forward(batch.mel);

  Tensor loss_d;
  {
    auto real_out = disc_.discriminate(batch.wave);
    auto fake_out = disc_.discriminate(fake.detach());
    loss_d = total_d_loss(adv_d_loss(scores_of(real_out), scores_of(fake_out)));
  }
  if (!finite(loss_d)) {
    dump_batch(batch, "discriminator loss");
    throw NonFiniteLossError("step " + std::to_string(s) + ": discriminator loss is not finite");
  }
  loss_d.backward();
  adam_step(disc_params_, opt_d_, lr, adam);
  if (observer_) observer_(TrainPhase::kDiscriminatorUpdated);

  Tensor adv, fm, mel, loss_g;
  {
    FreezeGuard frozen(disc_params_);
    std::vector<DiscriminatorOutput> real_out;
    {
      NoGradGuard no_grad;
      real_out = disc_.discriminate(batch.wave);
    }
    auto fake_out = disc_.discriminate(fake);
    adv = adv_g_loss(scores_of(fake_out));
    fm = feature_matching_loss(features_of(real_out), features_of(fake_out));
    mel = mel_loss_to_target(batch.mel, fake, mel_);
    loss_g = total_g_loss(adv, fm, mel, cfg_.weights);
    if (!finite(loss_g)) {
      dump_batch(batch, "generator loss");
      throw NonFiniteLossError("step " + std::to_string(s) + ": generator loss is not finite");
    }
    loss_g.backward();
  }
  adam_step(gen_params_, opt_g_, lr, adam);
  if (observer_) observer_(TrainPhase::kGeneratorUpdated);

  step_ = s;
  return {s, loss_d.item(), loss_g.item(), mel.item(), fm.item(), lr};
}

double Trainer::validate() const {
  if (validation_.empty()) throw ValueError("no validation clips");
  NoGradGuard no_grad;
  const int64_t hop = mel_.config().hop;
  double total = 0.0;
  for (const auto& clip : validation_.clips) {
    const int64_t len = static_cast<int64_t>(clip.size()) / hop * hop;
    if (len == 0) throw ValueError("validation clip shorter than one hop");
    Tensor wave({len}, std::vector<double>(clip.begin(), clip.begin() + len));
    Tensor target = mel_(wave);
    total += mean(abs(sub(target, mel_(gen_.forward(target))))).item();
  }
  return total / static_cast<double>(validation_.size());
}

void Trainer::dump_batch(const Batch& batch, const std::string& what) const {
  if (!dump_dir_) return;
  std::filesystem::create_directories(*dump_dir_);
  const int64_t n = batch.wave.dim(0);
  for (int64_t i = 0; i < n; ++i) {
    Tensor mel = reshape(slice(batch.mel, 0, i, i + 1), {batch.mel.dim(1), batch.mel.dim(2)});
    save_mel(*dump_dir_ / ("batch_" + std::to_string(i) + ".mel"), mel);
    Tensor row = slice(batch.wave, 0, i, i + 1);
    auto w = row.data();
    save_wav(*dump_dir_ / ("batch_" + std::to_string(i) + ".wav"),
             {std::vector<double>(w.begin(), w.end()), mel_.config().sample_rate});
  }
  std::ofstream report(*dump_dir_ / "report.txt");
  report << "step " << step_ + 1 << ": non-finite " << what << "\n"
         << "batch " << n << " x " << batch.wave.dim(1) << " samples\n";
  std::cerr << "non-finite " << what << " at step " << step_ + 1 << "; batch written to "
            << dump_dir_->string() << "\n";
}

void Trainer::save(const std::filesystem::path& path) const {
  const auto gen_named = gen_.named_parameters();
  const auto disc_named = disc_.named_parameters();
  std::vector<NamedTensor> t = gen_named;
  t.insert(t.end(), disc_named.begin(), disc_named.end());
  add_adam_state(t, "adam.gen", gen_named, opt_g_);
  add_adam_state(t, "adam.disc", disc_named, opt_d_);
  t.push_back({"train.step", Tensor::scalar(static_cast<double>(step_))});
  t.push_back({"train.seed", Tensor({2}, {static_cast<double>(cfg_.seed & 0xffffffffULL),
                                          static_cast<double>(cfg_.seed >> 32)})});
  for (auto& c : config_tensors(gen_.config())) t.push_back(std::move(c));
  for (auto& c : config_tensors(cfg_.disc)) t.push_back(std::move(c));
  for (auto& c : config_tensors(mel_.config())) t.push_back(std::move(c));
  write_checkpoint(path, t, CheckpointPrecision::kFloat64);
}

void Trainer::load(const std::filesystem::path& path) {
  const auto file = read_checkpoint(path);
  const auto gen_named = gen_.named_parameters();
  const auto disc_named = disc_.named_parameters();
  assign_tensors(gen_named, file);
  assign_tensors(disc_named, file);
  read_adam_state(file, "adam.gen", gen_named, opt_g_);
  read_adam_state(file, "adam.disc", disc_named, opt_d_);
  step_ = std::llround(find_tensor(file, "train.step").item());
  auto seed = find_tensor(file, "train.seed").data();
  if (seed.size() != 2) throw FormatError("train.seed must hold two words");
  cfg_.seed = static_cast<uint64_t>(seed[0]) | (static_cast<uint64_t>(seed[1]) << 32);
}

std::string metrics_csv_header() { return "step,loss_d,loss_g,loss_mel,loss_fm,lr"; }

std::string metrics_csv_row(const StepLog& l) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%lld,%.10g,%.10g,%.10g,%.10g,%.10g",
                static_cast<long long>(l.step), l.loss_d, l.loss_g, l.loss_mel, l.loss_fm, l.lr);
  return buf;
}

TrainResult train(const TrainConfig& cfg, const GeneratorConfig& gen_cfg, const MelConfig& mel_cfg,
                  Dataset train_set, Dataset validation_set,
                  const std::optional<std::filesystem::path>& out_dir,
                  const std::optional<std::filesystem::path>& resume,
                  const TrainCallbacks& callbacks) {
  Trainer trainer(cfg, gen_cfg, mel_cfg, std::move(train_set), std::move(validation_set));
  if (resume) trainer.load(*resume);

  std::ofstream metrics, validation;
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    trainer.set_dump_dir(*out_dir / "nonfinite_batch");
    const bool append = resume.has_value() && std::filesystem::exists(*out_dir / "metrics.csv");
    const auto mode = append ? std::ios::app : std::ios::trunc;
    metrics.open(*out_dir / "metrics.csv", std::ios::out | mode);
    validation.open(*out_dir / "validation.csv", std::ios::out | mode);
    if (!metrics || !validation) throw std::runtime_error("cannot write logs in " + out_dir->string());
    if (!append) {
      metrics << metrics_csv_header() << "\n";
      validation << "step,mel_l1\n";
    }
  }

  TrainResult result;
  while (trainer.current_step() < cfg.total_steps) {
    const StepLog log = trainer.step();
    result.steps.push_back(log);
    if (metrics.is_open()) metrics << metrics_csv_row(log) << "\n" << std::flush;
    if (callbacks.on_step) callbacks.on_step(log);
    if (cfg.validate_every > 0 && log.step % cfg.validate_every == 0 &&
        trainer.has_validation()) {
      const ValidationLog v{log.step, trainer.validate()};
      result.validations.push_back(v);
      if (validation.is_open()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%lld,%.10g", static_cast<long long>(v.step), v.mel_l1);
        validation << buf << "\n" << std::flush;
      }
      if (callbacks.on_validation) callbacks.on_validation(v);
    }
    if (out_dir && cfg.checkpoint_every > 0 && log.step % cfg.checkpoint_every == 0)
      trainer.save(*out_dir / ("checkpoint_" + std::to_string(log.step) + ".ckpt"));
  }
  if (out_dir) {
    trainer.save(*out_dir / "state.ckpt");
    save_generator(*out_dir / "generator.ckpt", trainer.generator(), trainer.mel_config());
  }
  return result;
}

}  // namespace wolonet
