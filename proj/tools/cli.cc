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

#include "cli.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "wolonet/ablation.h"
#include "wolonet/checkpoint.h"
#include "wolonet/checks.h"
#include "wolonet/config.h"
#include "wolonet/data.h"
#include "wolonet/dsp.h"
#include "wolonet/eval.h"
#include "wolonet/generator.h"
#include "wolonet/trainer.h"

namespace wolonet::cli {

namespace {

namespace fs = std::filesystem;

constexpr double kReferenceParams = 9.09e6;

struct Options {
  // shared
  uint64_t seed = 1234;
  std::optional<uint64_t> train_seed;  // train / ablate; overrides the config
  std::string config;
  std::string preset = "desk";
  std::string out;
  // extract-mel
  std::string in;
  // train / ablate
  std::string data;
  int64_t synthetic = 0;
  int64_t steps = -1;
  int64_t batch = -1;
  std::string resume;
  std::string activation;
  std::string mode = "all";
  // synth
  std::string ckpt;
  std::string mel;
  // gradcheck
  std::string module = "all";
  // verify-madds
  int64_t channels = 512;
  int64_t kernel = 5;
  // oracle-check
  int trials = 100;
  // mcd
  std::string ref;
  std::string syn;
  // report
  std::string format = "md";
};

RunConfig preset_config(const std::string& preset) {
  RunConfig cfg;
  if (preset == "desk") {
    cfg.generator = tiny_generator_config();
    cfg.train.disc = desk_discriminator_config();
  } else if (preset != "full") {
    throw CLI::ValidationError("--preset", "expected desk or full");
  }
  return cfg;
}

RunConfig resolve_config(const Options& o) {
  RunConfig cfg = preset_config(o.preset);
  if (!o.config.empty()) cfg = load_run_config(o.config, cfg);
  if (o.steps >= 0) cfg.train.total_steps = o.steps;
  if (o.batch >= 1) cfg.train.batch_size = o.batch;
  if (!o.activation.empty()) cfg.generator.activation = parse_activation(o.activation);
  if (o.train_seed) cfg.train.seed = *o.train_seed;
  cfg.mel.validate();
  cfg.generator.validate();
  cfg.train.validate(cfg.mel.hop);
  return cfg;
}

void print_precise(std::ostream& out) { out << std::setprecision(10); }

int cmd_extract_mel(const Options& o, std::ostream& out) {
  MelConfig mel = o.config.empty() ? MelConfig{} : load_run_config(o.config).mel;
  Waveform w = load_wav(o.in);
  if (w.sample_rate != mel.sample_rate)
    throw ValueError(o.in + ": sample rate " + std::to_string(w.sample_rate) + " differs from " +
                     std::to_string(mel.sample_rate));
  NoGradGuard no_grad;
  Tensor m = log_mel(w, mel);
  save_mel(o.out, m);
  out << "frames=" << m.dim(1) << " mels=" << m.dim(0) << "\n";
  return kOk;
}

int cmd_train(const Options& o, std::ostream& out) {
  RunConfig cfg = resolve_config(o);
  Dataset train_set, val_set;
  if (!o.data.empty()) {
    train_set = load_dataset(o.data);
    if (static_cast<int64_t>(train_set.size()) <= cfg.train.validation_clips)
      throw ValueError("dataset needs more than " + std::to_string(cfg.train.validation_clips) +
                       " clips (the last ones are held out for validation)");
    val_set = split_tail(train_set, cfg.train.validation_clips);
  } else {
    train_set = synthetic_dataset(o.synthetic, cfg.train.seed, cfg.mel.sample_rate);
    val_set = synthetic_dataset(cfg.train.validation_clips, cfg.train.seed ^ 0x5bd1e995ULL,
                                cfg.mel.sample_rate);
  }
  fs::create_directories(o.out);
  {
    std::ofstream f(fs::path(o.out) / "config.json");
    f << dump_run_config(cfg) << "\n";
  }
  print_precise(out);
  TrainCallbacks cb;
  const int64_t every = std::max<int64_t>(1, cfg.train.total_steps / 20);
  cb.on_step = [&](const StepLog& l) {
    if (l.step % every == 0 || l.step == cfg.train.total_steps) out << metrics_csv_row(l) << "\n";
  };
  cb.on_validation = [&](const ValidationLog& v) {
    out << "validation step=" << v.step << " mel_l1=" << v.mel_l1 << "\n";
  };
  out << metrics_csv_header() << "\n";
  std::optional<fs::path> resume;
  if (!o.resume.empty()) resume = o.resume;
  train(cfg.train, cfg.generator, cfg.mel, std::move(train_set), std::move(val_set), fs::path(o.out),
        resume, cb);
  out << "wrote " << (fs::path(o.out) / "generator.ckpt").string() << "\n";
  return kOk;
}

int cmd_synth(const Options& o, std::ostream& out) {
  const auto tensors = read_checkpoint(o.ckpt);
  Generator g = Generator::build(generator_config_from(tensors), 0);
  assign_tensors(g.named_parameters(), tensors);
  const MelConfig mel = mel_config_from(tensors);
  Tensor m = load_mel(o.mel);
  Waveform w = synthesize(g, m, mel.sample_rate);
  save_wav(o.out, w);
  out << "samples=" << w.samples.size() << " frames=" << m.dim(1) << "\n";
  return kOk;
}

int cmd_gradcheck(const Options& o, std::ostream& out) {
  print_precise(out);
  const auto entries = gradient_suite(o.module, o.seed);
  double worst = 0.0;
  for (const auto& e : entries) {
    out << e.name << " max_rel_error=" << e.max_rel_error << " entries=" << e.entries_checked
        << (e.max_rel_error < kGradTolerance ? "" : "  FAIL") << "\n";
    worst = std::max(worst, e.max_rel_error);
  }
  const bool ok = worst < kGradTolerance;
  out << "max_rel_error=" << worst << " tolerance=" << kGradTolerance << " "
      << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? kOk : kCheckFailed;
}

int cmd_verify_madds(const Options& o, std::ostream& out) {
  const MAddsReport r = madds_report(o.channels, o.kernel);
  const int64_t slack = madds_slack(o.channels, o.kernel);
  out << "C=" << r.channels << " K=" << r.kernel << "\n"
      << "wolo_madds=" << r.wolo_madds << "\n"
      << "resblock_madds=" << r.resblock_madds << "\n"
      << "resblock_madds_with_bias=" << r.resblock_with_bias << "\n"
      << std::fixed << std::setprecision(3) << "ratio=" << r.ratio << "\n"
      << std::setprecision(9) << "ratio_full=" << r.ratio << "\n"
      << std::defaultfloat << "empirical_madds=" << r.empirical << " slack=" << slack << "\n";
  bool ok = std::llabs(r.empirical - r.wolo_madds) <= slack;
  out << "empirical_within_slack=" << (ok ? "yes" : "no") << "\n";
  if (o.channels == 512 && o.kernel == 5) {
    const bool parity = r.wolo_madds == 293376 && r.resblock_madds == 1310720 &&
                        std::fabs(r.ratio - 4.468) <= 1e-3;
    out << "reference_figures=" << (parity ? "match" : "MISMATCH") << "\n";
    ok = ok && parity;
  }
  return ok ? kOk : kCheckFailed;
}

int cmd_oracle_check(const Options& o, std::ostream& out) {
  const OracleReport r = oracle_check(o.trials, o.seed);
  out << std::setprecision(6) << "trials=" << r.trials << " activations=3"
      << " max_abs_error=" << r.max_abs_error << " breaches=" << r.breaches << "\n";
  if (!r.worst.empty()) out << "worst: " << r.worst << "\n";
  out << (r.breaches == 0 ? "PASS" : "FAIL") << "\n";
  return r.breaches == 0 ? kOk : kCheckFailed;
}

int cmd_mcd(const Options& o, std::ostream& out) {
  const Waveform ref = load_wav(o.ref), syn = load_wav(o.syn);
  MelConfig mel;
  mel.sample_rate = ref.sample_rate;
  if (syn.sample_rate != ref.sample_rate) throw ValueError("sample rates differ");
  out << std::setprecision(10) << "mcd_db=" << mcd(ref, syn, mel) << "\n";
  return kOk;
}

int cmd_ablate(const Options& o, std::ostream& out) {
  Options opts = o;
  if (opts.steps < 0) opts.steps = 200;
  RunConfig cfg = resolve_config(opts);
  cfg.train.validate_every = 0;
  cfg.train.checkpoint_every = 0;
  const int64_t clips = o.synthetic > 0 ? o.synthetic : 16;
  std::vector<KernelActivation> modes;
  if (o.mode == "all")
    modes = {KernelActivation::kSine, KernelActivation::kTanh, KernelActivation::kSoftmax};
  else
    modes = {parse_activation(o.mode)};
  bool ok = true;
  print_precise(out);
  for (auto mode : modes) {
    std::optional<fs::path> dir;
    if (!o.out.empty()) dir = fs::path(o.out) / std::string(activation_name(mode));
    const AblationResult r = run_ablation(cfg, mode, clips, dir);
    out << "mode=" << activation_name(mode) << " steps=" << r.steps
        << " finite=" << (r.finite ? "yes" : "no") << " loss_d=" << r.last.loss_d
        << " loss_g=" << r.last.loss_g << " loss_mel=" << r.last.loss_mel
        << " kernel_min=" << r.kernels.min_value << " kernel_max=" << r.kernels.max_value
        << " row_sum_error=" << r.kernels.max_row_sum_error << " "
        << (r.passed ? "PASS" : "FAIL") << "\n";
    ok = ok && r.passed;
  }
  return ok ? kOk : kCheckFailed;
}

int cmd_report(const Options& o, std::ostream& out) {
  std::vector<MAddsReport> rows;
  for (int64_t c : {8, 64, 512})
    for (int64_t k : {1, 3, 5}) rows.push_back(madds_report(c, k));
  out << (o.format == "csv" ? madds_table_csv(rows) : madds_table_markdown(rows));
  const Generator g = Generator::build(GeneratorConfig{}, 0);
  const int64_t n = g.param_count();
  const double rel = (static_cast<double>(n) - kReferenceParams) / kReferenceParams;
  out << std::setprecision(6) << "\nparam_count=" << n << " reference=" << kReferenceParams
      << " relative_difference=" << rel << " within_20_percent=" << (std::fabs(rel) <= 0.2 ? "yes" : "no")
      << "\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Neural vocoder with location-variant dynamic convolution"};
  app.require_subcommand(1);
  Options o;

  auto* extract = app.add_subcommand("extract-mel", "WAV -> log-mel (MEL1 file)");
  extract->add_option("--in", o.in, "input WAV")->required()->check(CLI::ExistingFile);
  extract->add_option("--out", o.out, "output MEL1 file")->required();
  extract->add_option("--config", o.config, "JSON config (mel section)")->check(CLI::ExistingFile);

  auto* trn = app.add_subcommand("train", "train a generator");
  trn->add_option("--config", o.config, "JSON config")->check(CLI::ExistingFile);
  trn->add_option("--preset", o.preset, "base configuration before --config: desk or full")
      ->check(CLI::IsMember({"desk", "full"}));
  auto* data_opt = trn->add_option("--data", o.data, "directory of WAV clips")->check(CLI::ExistingDirectory);
  auto* synth_opt = trn->add_option("--synthetic", o.synthetic, "number of synthetic clips")
                        ->check(CLI::PositiveNumber);
  data_opt->excludes(synth_opt);
  trn->add_option("--out", o.out, "output directory")->required();
  trn->add_option("--steps", o.steps, "total steps")->check(CLI::NonNegativeNumber);
  trn->add_option("--batch", o.batch, "batch size")->check(CLI::PositiveNumber);
  trn->add_option("--activation", o.activation, "sine, tanh or softmax")
      ->check(CLI::IsMember({"sine", "tanh", "softmax"}));
  trn->add_option("--resume", o.resume, "state checkpoint to continue from")->check(CLI::ExistingFile);
  trn->add_option("--seed", o.train_seed, "random seed (overrides train.seed)");

  auto* syn = app.add_subcommand("synth", "log-mel -> WAV with a trained generator");
  syn->add_option("--ckpt", o.ckpt, "generator checkpoint")->required()->check(CLI::ExistingFile);
  syn->add_option("--mel", o.mel, "MEL1 file")->required()->check(CLI::ExistingFile);
  syn->add_option("--out", o.out, "output WAV")->required();

  auto* grad = app.add_subcommand("gradcheck", "finite-difference gradient checks");
  grad->add_option("--module", o.module, "all, ops, wolo, losses or dsp")
      ->check(CLI::IsMember({"all", "ops", "wolo", "losses", "dsp"}));
  grad->add_option("--seed", o.seed, "random seed");

  auto* madds = app.add_subcommand("verify-madds", "multiply-add accounting for one block");
  madds->add_option("--C", o.channels, "channels")->check(CLI::PositiveNumber);
  madds->add_option("--K", o.kernel, "kernel size (odd)")->check(CLI::PositiveNumber);

  auto* oracle = app.add_subcommand("oracle-check", "attention vs index-loop reference");
  oracle->add_option("--trials", o.trials, "random instances")->check(CLI::PositiveNumber);
  oracle->add_option("--seed", o.seed, "random seed");

  auto* mcd_cmd = app.add_subcommand("mcd", "mel cepstral distortion between two WAVs");
  mcd_cmd->add_option("--ref", o.ref, "reference WAV")->required()->check(CLI::ExistingFile);
  mcd_cmd->add_option("--syn", o.syn, "synthesised WAV")->required()->check(CLI::ExistingFile);

  auto* abl = app.add_subcommand("ablate", "short training runs per kernel activation");
  abl->add_option("--mode", o.mode, "sine, tanh, softmax or all")
      ->check(CLI::IsMember({"all", "sine", "tanh", "softmax"}));
  abl->add_option("--steps", o.steps, "steps per run (default 200)")->check(CLI::NonNegativeNumber);
  abl->add_option("--batch", o.batch, "batch size")->check(CLI::PositiveNumber);
  abl->add_option("--synthetic", o.synthetic, "synthetic clips (default 16)")->check(CLI::PositiveNumber);
  abl->add_option("--config", o.config, "JSON config")->check(CLI::ExistingFile);
  abl->add_option("--preset", o.preset, "desk or full")->check(CLI::IsMember({"desk", "full"}));
  abl->add_option("--out", o.out, "output directory");
  abl->add_option("--seed", o.train_seed, "random seed (overrides train.seed)");

  auto* rep = app.add_subcommand("report", "multiply-add table and parameter count");
  rep->add_option("--format", o.format, "md or csv")->check(CLI::IsMember({"md", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  if (trn->parsed() && o.data.empty() && o.synthetic == 0) {
    err << "train: one of --data or --synthetic is required\n" << trn->help();
    return kUsage;
  }

  try {
    if (extract->parsed()) return cmd_extract_mel(o, out);
    if (trn->parsed()) return cmd_train(o, out);
    if (syn->parsed()) return cmd_synth(o, out);
    if (grad->parsed()) return cmd_gradcheck(o, out);
    if (madds->parsed()) return cmd_verify_madds(o, out);
    if (oracle->parsed()) return cmd_oracle_check(o, out);
    if (mcd_cmd->parsed()) return cmd_mcd(o, out);
    if (abl->parsed()) return cmd_ablate(o, out);
    if (rep->parsed()) return cmd_report(o, out);
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}

}  // namespace wolonet::cli
