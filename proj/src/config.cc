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

#include "wolonet/config.h"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace wolonet {

using nlohmann::json;

namespace {

// Reads the keys of one section, rejecting anything it was not asked about.
class Section {
 public:
  Section(const json& root, const char* name) : name_(name) {
    if (root.contains(name)) {
      node_ = &root.at(name);
      if (!node_->is_object()) throw ValueError(std::string("config: \"") + name + "\" must be an object");
    }
  }
  void reject_unknown() const {
    if (!node_) return;
    for (const auto& [key, value] : node_->items())
      if (!seen_.count(key)) throw ValueError("config: unknown key \"" + name_ + "." + key + "\"");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!node_ || !node_->contains(key)) return;
    try {
      out = node_->at(key).get<T>();
    } catch (const json::exception& e) {
      throw ValueError("config: bad value for \"" + name_ + "." + key + "\": " + e.what());
    }
  }

 private:
  std::string name_;
  const json* node_ = nullptr;
  std::set<std::string> seen_;
};

}  // namespace

RunConfig parse_run_config(const std::string& json_text, const RunConfig& base) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValueError(std::string("config: ") + e.what());
  }
  if (!root.is_object()) throw ValueError("config: top level must be an object");
  for (const auto& [key, value] : root.items())
    if (key != "train" && key != "discriminator" && key != "generator" && key != "mel")
      throw ValueError("config: unknown section \"" + key + "\"");

  RunConfig cfg = base;
  {
    Section s(root, "train");
    auto& t = cfg.train;
    s.get("lr", t.lr);
    s.get("lr_halve_every", t.lr_halve_every);
    s.get("beta1", t.beta1);
    s.get("beta2", t.beta2);
    s.get("batch_size", t.batch_size);
    s.get("segment_samples", t.segment_samples);
    s.get("total_steps", t.total_steps);
    s.get("seed", t.seed);
    s.get("checkpoint_every", t.checkpoint_every);
    s.get("validate_every", t.validate_every);
    s.get("validation_clips", t.validation_clips);
    s.get("lambda_fm", t.weights.lambda_fm);
    s.get("lambda_mel", t.weights.lambda_mel);
    s.reject_unknown();
  }
  {
    Section s(root, "discriminator");
    auto& d = cfg.train.disc;
    s.get("periods", d.periods);
    s.get("scales", d.scales);
    s.get("channel_divisor", d.channel_divisor);
    s.reject_unknown();
  }
  {
    Section s(root, "generator");
    auto& g = cfg.generator;
    s.get("upsample_strides", g.upsample_strides);
    s.get("upsample_kernels", g.upsample_kernels);
    s.get("base_channels", g.base_channels);
    s.get("wolo_per_stage", g.wolo_per_stage);
    s.get("wolo_dilations", g.wolo_dilations);
    s.get("wolo_kernel", g.wolo_kernel);
    s.get("mel_bins", g.mel_bins);
    s.get("pre_kernel", g.pre_kernel);
    s.get("post_kernel", g.post_kernel);
    s.get("hop", g.hop);
    std::string act(activation_name(g.activation));
    s.get("activation", act);
    g.activation = parse_activation(act);
    s.reject_unknown();
  }
  {
    Section s(root, "mel");
    auto& m = cfg.mel;
    s.get("sample_rate", m.sample_rate);
    s.get("n_fft", m.n_fft);
    s.get("hop", m.hop);
    s.get("win_length", m.win_length);
    s.get("n_mels", m.n_mels);
    s.get("fmin", m.fmin);
    s.get("fmax", m.fmax);
    s.get("log_floor", m.log_floor);
    s.reject_unknown();
  }
  cfg.mel.validate();
  cfg.generator.validate();
  cfg.train.validate(cfg.mel.hop);
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path, const RunConfig& base) {
  std::ifstream is(path);
  if (!is) throw ValueError("cannot open config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_run_config(ss.str(), base);
}

std::string dump_run_config(const RunConfig& cfg) {
  const auto& t = cfg.train;
  const auto& g = cfg.generator;
  const auto& m = cfg.mel;
  json root = {
      {"train",
       {{"lr", t.lr},
        {"lr_halve_every", t.lr_halve_every},
        {"beta1", t.beta1},
        {"beta2", t.beta2},
        {"batch_size", t.batch_size},
        {"segment_samples", t.segment_samples},
        {"total_steps", t.total_steps},
        {"seed", t.seed},
        {"checkpoint_every", t.checkpoint_every},
        {"validate_every", t.validate_every},
        {"validation_clips", t.validation_clips},
        {"lambda_fm", t.weights.lambda_fm},
        {"lambda_mel", t.weights.lambda_mel}}},
      {"discriminator",
       {{"periods", t.disc.periods},
        {"scales", t.disc.scales},
        {"channel_divisor", t.disc.channel_divisor}}},
      {"generator",
       {{"upsample_strides", g.upsample_strides},
        {"upsample_kernels", g.upsample_kernels},
        {"base_channels", g.base_channels},
        {"wolo_per_stage", g.wolo_per_stage},
        {"wolo_dilations", g.wolo_dilations},
        {"wolo_kernel", g.wolo_kernel},
        {"mel_bins", g.mel_bins},
        {"pre_kernel", g.pre_kernel},
        {"post_kernel", g.post_kernel},
        {"hop", g.hop},
        {"activation", std::string(activation_name(g.activation))}}},
      {"mel",
       {{"sample_rate", m.sample_rate},
        {"n_fft", m.n_fft},
        {"hop", m.hop},
        {"win_length", m.win_length},
        {"n_mels", m.n_mels},
        {"fmin", m.fmin},
        {"fmax", m.fmax},
        {"log_floor", m.log_floor}}},
  };
  return root.dump(2);
}

GeneratorConfig tiny_generator_config() {
  GeneratorConfig g;
  g.base_channels = 32;
  g.upsample_strides = {8, 8, 2, 2};
  g.upsample_kernels = {16, 16, 4, 4};
  g.wolo_kernel = 3;
  return g;
}

DiscriminatorConfig desk_discriminator_config() {
  DiscriminatorConfig d;
  d.channel_divisor = 16;
  return d;
}

}  // namespace wolonet
