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

#include "wolonet/checkpoint.h"

#include <cmath>
#include <fstream>
#include <set>

#include "binary_io.h"

namespace wolonet {

using detail::read_le;
using detail::read_tag;
using detail::write_le;

void write_checkpoint(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors,
                      CheckpointPrecision precision) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot write " + path.string());
  os.write("WOLO", 4);
  write_le<uint32_t>(os, static_cast<uint32_t>(precision));
  write_le<uint32_t>(os, static_cast<uint32_t>(tensors.size()));
  for (const auto& [name, value] : tensors) {
    if (name.empty() || name.size() > 0xffff) throw ValueError("checkpoint: bad tensor name length");
    if (value.rank() > 255) throw ValueError("checkpoint: rank too large for " + name);
    write_le<uint16_t>(os, static_cast<uint16_t>(name.size()));
    os.write(name.data(), static_cast<std::streamsize>(name.size()));
    write_le<uint8_t>(os, static_cast<uint8_t>(value.rank()));
    for (int64_t d : value.shape()) write_le<uint32_t>(os, static_cast<uint32_t>(d));
    for (double x : value.data()) {
      if (precision == CheckpointPrecision::kFloat32)
        write_le<float>(os, static_cast<float>(x));
      else
        write_le<double>(os, x);
    }
  }
  if (!os) throw FormatError("write failed: " + path.string());
}

std::vector<NamedTensor> read_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  if (read_tag(is, "checkpoint magic") != "WOLO")
    throw FormatError(path.string() + ": not a checkpoint (bad magic)");
  const uint32_t version = read_le<uint32_t>(is, "checkpoint version");
  if (version != 1 && version != 2)
    throw FormatError(path.string() + ": unsupported checkpoint version " + std::to_string(version));
  const uint32_t count = read_le<uint32_t>(is, "tensor count");
  std::vector<NamedTensor> out;
  std::set<std::string> seen;
  for (uint32_t i = 0; i < count; ++i) {
    const uint16_t len = read_le<uint16_t>(is, "name length");
    std::string name(len, '\0');
    if (!is.read(name.data(), len)) throw FormatError(path.string() + ": truncated tensor name");
    if (!seen.insert(name).second) throw FormatError(path.string() + ": duplicate tensor " + name);
    const uint8_t rank = read_le<uint8_t>(is, "rank");
    Shape shape(rank);
    for (auto& d : shape) d = read_le<uint32_t>(is, "dimension");
    std::vector<double> values(shape_numel(shape));
    for (auto& x : values)
      x = version == 1 ? static_cast<double>(read_le<float>(is, "values")) : read_le<double>(is, "values");
    out.push_back({std::move(name), Tensor(std::move(shape), std::move(values))});
  }
  return out;
}

bool has_tensor(const std::vector<NamedTensor>& tensors, const std::string& name) {
  for (const auto& t : tensors)
    if (t.name == name) return true;
  return false;
}

const Tensor& find_tensor(const std::vector<NamedTensor>& tensors, const std::string& name) {
  for (const auto& t : tensors)
    if (t.name == name) return t.value;
  throw FormatError("checkpoint has no tensor named " + name);
}

void assign_tensors(const std::vector<NamedTensor>& dst, const std::vector<NamedTensor>& src) {
  for (const auto& [name, value] : dst) {
    const Tensor& s = find_tensor(src, name);
    if (s.shape() != value.shape())
      throw FormatError("checkpoint tensor " + name + " has shape " + shape_str(s.shape()) +
                        ", expected " + shape_str(value.shape()));
    Tensor d = value;
    auto out = d.mutable_data();
    auto in = s.data();
    std::copy(in.begin(), in.end(), out.begin());
  }
}

namespace {

Tensor int_vector(const std::vector<int64_t>& v) {
  std::vector<double> d(v.begin(), v.end());
  return Tensor({static_cast<int64_t>(v.size())}, std::move(d));
}

std::vector<int64_t> to_ints(const Tensor& t) {
  std::vector<int64_t> out;
  for (double x : t.data()) out.push_back(static_cast<int64_t>(std::llround(x)));
  return out;
}

int64_t to_int(const Tensor& t) { return static_cast<int64_t>(std::llround(t.item())); }

}  // namespace

std::vector<NamedTensor> config_tensors(const GeneratorConfig& cfg) {
  return {
      {"config.generator.upsample_strides", int_vector(cfg.upsample_strides)},
      {"config.generator.upsample_kernels", int_vector(cfg.upsample_kernels)},
      {"config.generator.base_channels", Tensor::scalar(cfg.base_channels)},
      {"config.generator.wolo_per_stage", Tensor::scalar(cfg.wolo_per_stage)},
      {"config.generator.wolo_dilations", int_vector(cfg.wolo_dilations)},
      {"config.generator.wolo_kernel", Tensor::scalar(cfg.wolo_kernel)},
      {"config.generator.mel_bins", Tensor::scalar(cfg.mel_bins)},
      {"config.generator.pre_kernel", Tensor::scalar(cfg.pre_kernel)},
      {"config.generator.post_kernel", Tensor::scalar(cfg.post_kernel)},
      {"config.generator.hop", Tensor::scalar(cfg.hop)},
      {"config.generator.activation", Tensor::scalar(static_cast<double>(cfg.activation))},
  };
}

std::vector<NamedTensor> config_tensors(const DiscriminatorConfig& cfg) {
  return {
      {"config.disc.periods", int_vector(cfg.periods)},
      {"config.disc.scales", Tensor::scalar(cfg.scales)},
      {"config.disc.channel_divisor", Tensor::scalar(cfg.channel_divisor)},
  };
}

std::vector<NamedTensor> config_tensors(const MelConfig& cfg) {
  return {
      {"config.mel.sample_rate", Tensor::scalar(cfg.sample_rate)},
      {"config.mel.n_fft", Tensor::scalar(cfg.n_fft)},
      {"config.mel.hop", Tensor::scalar(cfg.hop)},
      {"config.mel.win_length", Tensor::scalar(cfg.win_length)},
      {"config.mel.n_mels", Tensor::scalar(cfg.n_mels)},
      {"config.mel.fmin", Tensor::scalar(cfg.fmin)},
      {"config.mel.fmax", Tensor::scalar(cfg.fmax)},
      {"config.mel.log_floor", Tensor::scalar(cfg.log_floor)},
  };
}

GeneratorConfig generator_config_from(const std::vector<NamedTensor>& t) {
  GeneratorConfig cfg;
  cfg.upsample_strides = to_ints(find_tensor(t, "config.generator.upsample_strides"));
  cfg.upsample_kernels = to_ints(find_tensor(t, "config.generator.upsample_kernels"));
  cfg.base_channels = to_int(find_tensor(t, "config.generator.base_channels"));
  cfg.wolo_per_stage = to_int(find_tensor(t, "config.generator.wolo_per_stage"));
  cfg.wolo_dilations = to_ints(find_tensor(t, "config.generator.wolo_dilations"));
  cfg.wolo_kernel = to_int(find_tensor(t, "config.generator.wolo_kernel"));
  cfg.mel_bins = to_int(find_tensor(t, "config.generator.mel_bins"));
  cfg.pre_kernel = to_int(find_tensor(t, "config.generator.pre_kernel"));
  cfg.post_kernel = to_int(find_tensor(t, "config.generator.post_kernel"));
  cfg.hop = to_int(find_tensor(t, "config.generator.hop"));
  const int64_t act = to_int(find_tensor(t, "config.generator.activation"));
  if (act < 0 || act > 2) throw FormatError("checkpoint: unknown activation id " + std::to_string(act));
  cfg.activation = static_cast<KernelActivation>(act);
  cfg.validate();
  return cfg;
}

DiscriminatorConfig discriminator_config_from(const std::vector<NamedTensor>& t) {
  DiscriminatorConfig cfg;
  cfg.periods = to_ints(find_tensor(t, "config.disc.periods"));
  cfg.scales = to_int(find_tensor(t, "config.disc.scales"));
  cfg.channel_divisor = to_int(find_tensor(t, "config.disc.channel_divisor"));
  cfg.validate();
  return cfg;
}

MelConfig mel_config_from(const std::vector<NamedTensor>& t) {
  MelConfig cfg;
  if (!has_tensor(t, "config.mel.sample_rate")) return cfg;
  cfg.sample_rate = static_cast<int>(to_int(find_tensor(t, "config.mel.sample_rate")));
  cfg.n_fft = static_cast<int>(to_int(find_tensor(t, "config.mel.n_fft")));
  cfg.hop = static_cast<int>(to_int(find_tensor(t, "config.mel.hop")));
  cfg.win_length = static_cast<int>(to_int(find_tensor(t, "config.mel.win_length")));
  cfg.n_mels = static_cast<int>(to_int(find_tensor(t, "config.mel.n_mels")));
  cfg.fmin = find_tensor(t, "config.mel.fmin").item();
  cfg.fmax = find_tensor(t, "config.mel.fmax").item();
  cfg.log_floor = find_tensor(t, "config.mel.log_floor").item();
  cfg.validate();
  return cfg;
}

void save_generator(const std::filesystem::path& path, const Generator& g, const MelConfig& mel,
                    CheckpointPrecision precision) {
  auto tensors = g.named_parameters();
  for (auto& t : config_tensors(g.config())) tensors.push_back(std::move(t));
  for (auto& t : config_tensors(mel)) tensors.push_back(std::move(t));
  write_checkpoint(path, tensors, precision);
}

Generator load_generator(const std::filesystem::path& path) {
  const auto tensors = read_checkpoint(path);
  Generator g = Generator::build(generator_config_from(tensors), 0);
  assign_tensors(g.named_parameters(), tensors);
  return g;
}

}  // namespace wolonet
