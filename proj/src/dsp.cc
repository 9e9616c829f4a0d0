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

#include "wolonet/dsp.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "binary_io.h"
#include "wolonet/ops.h"

namespace wolonet {

using detail::read_le;
using detail::read_tag;
using detail::write_le;

void MelConfig::validate() const {
  if (n_fft < 2 || hop < 1 || win_length < 1)
    throw ValueError("MelConfig: n_fft, hop and win_length must be positive");
  if (!(hop <= win_length && win_length <= n_fft))
    throw ValueError("MelConfig: need hop <= win_length <= n_fft");
  if (!(fmin >= 0.0 && fmin < fmax && fmax <= sample_rate / 2.0))
    throw ValueError("MelConfig: need 0 <= fmin < fmax <= sample_rate / 2");
  if (n_mels < 1) throw ValueError("MelConfig: n_mels must be >= 1");
  if (!(log_floor > 0.0)) throw ValueError("MelConfig: log_floor must be positive");
}

// ---------------------------------------------------------------------------
// WAV

Waveform load_wav(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  if (read_tag(is, "RIFF tag") != "RIFF") throw FormatError(path.string() + ": not a RIFF file");
  read_le<uint32_t>(is, "RIFF size");
  if (read_tag(is, "WAVE tag") != "WAVE") throw FormatError(path.string() + ": not a WAVE file");

  bool have_fmt = false;
  uint16_t channels = 0, bits = 0;
  uint32_t rate = 0;
  while (true) {
    std::string id = read_tag(is, "chunk id");
    uint32_t size = read_le<uint32_t>(is, "chunk size");
    if (id == "fmt ") {
      if (size < 16) throw FormatError(path.string() + ": fmt chunk too small");
      uint16_t format = read_le<uint16_t>(is, "format tag");
      channels = read_le<uint16_t>(is, "channels");
      rate = read_le<uint32_t>(is, "sample rate");
      read_le<uint32_t>(is, "byte rate");
      read_le<uint16_t>(is, "block align");
      bits = read_le<uint16_t>(is, "bits per sample");
      is.seekg(size - 16 + (size & 1), std::ios::cur);
      if (format != 1) throw FormatError(path.string() + ": unsupported codec (PCM only)");
      if (bits != 16) throw FormatError(path.string() + ": unsupported bit depth (16 only)");
      if (channels != 1) throw FormatError(path.string() + ": unsupported channel count (mono only)");
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw FormatError(path.string() + ": data chunk before fmt chunk");
      if (size % 2 != 0) throw FormatError(path.string() + ": odd data size for 16-bit PCM");
      Waveform w;
      w.sample_rate = static_cast<int>(rate);
      w.samples.resize(size / 2);
      for (auto& s : w.samples) s = read_le<int16_t>(is, "sample data") / 32768.0;
      return w;
    } else {
      is.seekg(size + (size & 1), std::ios::cur);
      if (!is) throw FormatError(path.string() + ": truncated chunk '" + id + "'");
    }
  }
}

void save_wav(const std::filesystem::path& path, const Waveform& wave) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot write " + path.string());
  const uint32_t data_bytes = static_cast<uint32_t>(wave.samples.size() * 2);
  os.write("RIFF", 4);
  write_le<uint32_t>(os, 36 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  write_le<uint32_t>(os, 16);
  write_le<uint16_t>(os, 1);
  write_le<uint16_t>(os, 1);
  write_le<uint32_t>(os, static_cast<uint32_t>(wave.sample_rate));
  write_le<uint32_t>(os, static_cast<uint32_t>(wave.sample_rate * 2));
  write_le<uint16_t>(os, 2);
  write_le<uint16_t>(os, 16);
  os.write("data", 4);
  write_le<uint32_t>(os, data_bytes);
  for (double x : wave.samples) {
    double c = std::isfinite(x) ? std::clamp(x, -1.0, 1.0) : 0.0;
    double q = std::clamp(std::round(c * 32768.0), -32768.0, 32767.0);
    write_le<int16_t>(os, static_cast<int16_t>(q));
  }
  if (!os) throw FormatError("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// Mel scale

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

namespace {

std::vector<double> mel_points_hz(const MelConfig& cfg) {
  const double lo = hz_to_mel(cfg.fmin), hi = hz_to_mel(cfg.fmax);
  std::vector<double> pts(cfg.n_mels + 2);
  for (int i = 0; i < cfg.n_mels + 2; ++i)
    pts[i] = mel_to_hz(lo + (hi - lo) * i / static_cast<double>(cfg.n_mels + 1));
  return pts;
}

}  // namespace

std::vector<double> mel_center_frequencies(const MelConfig& cfg) {
  cfg.validate();
  auto pts = mel_points_hz(cfg);
  return {pts.begin() + 1, pts.end() - 1};
}

Tensor mel_filterbank(const MelConfig& cfg) {
  cfg.validate();
  const int bins = cfg.n_bins();
  auto pts = mel_points_hz(cfg);
  std::vector<double> fb(static_cast<size_t>(cfg.n_mels) * bins, 0.0);
  for (int m = 0; m < cfg.n_mels; ++m) {
    const double left = pts[m], center = pts[m + 1], right = pts[m + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * cfg.sample_rate / cfg.n_fft;
      const double up = (f - left) / (center - left);
      const double down = (right - f) / (right - center);
      fb[static_cast<size_t>(m) * bins + k] = std::max(0.0, std::min(up, down));
    }
  }
  return Tensor({cfg.n_mels, bins}, std::move(fb));
}

int64_t num_frames(int64_t samples, const MelConfig& cfg) {
  return (samples + cfg.hop - 1) / cfg.hop;
}

// ---------------------------------------------------------------------------
// Log-mel

MelExtractor::MelExtractor(MelConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  const int n = cfg_.n_fft, bins = cfg_.n_bins();
  std::vector<double> window(n, 0.0);
  const int offset = (n - cfg_.win_length) / 2;
  for (int i = 0; i < cfg_.win_length; ++i)
    window[offset + i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / cfg_.win_length);
  std::vector<double> basis(static_cast<size_t>(2) * bins * n);
  for (int k = 0; k < bins; ++k) {
    for (int i = 0; i < n; ++i) {
      // Reduce the phase index modulo n so large k*i keeps full precision.
      const double phase = 2.0 * std::numbers::pi * static_cast<double>((static_cast<int64_t>(k) * i) % n) / n;
      basis[static_cast<size_t>(k) * n + i] = window[i] * std::cos(phase);
      basis[static_cast<size_t>(bins + k) * n + i] = -window[i] * std::sin(phase);
    }
  }
  basis_ = Tensor({2 * bins, 1, n}, std::move(basis));
  filterbank_ = mel_filterbank(cfg_);
}

Tensor MelExtractor::mel_energy(const Tensor& wave) const {
  if (wave.rank() != 1 && wave.rank() != 2)
    throw ShapeError("log_mel", {wave.shape()}, "expected (L) or (N, L)");
  const int64_t len = wave.dim(-1);
  if (len < cfg_.win_length)
    throw ValueError("log_mel: input of " + std::to_string(len) +
                     " samples is shorter than win_length " + std::to_string(cfg_.win_length));
  const int64_t frames = num_frames(len, cfg_);
  const int64_t left = (cfg_.n_fft - cfg_.hop) / 2;
  const int64_t right = (frames - 1) * cfg_.hop + cfg_.n_fft - len - left;
  const int64_t batch = wave.rank() == 2 ? wave.dim(0) : 1;
  Tensor x = reshape(wave, {batch, 1, len});
  x = pad(x, left, std::max<int64_t>(0, right), PadMode::kReflect);
  Tensor spec = conv1d(x, basis_, Tensor(), {.stride = cfg_.hop});
  const int64_t bins = cfg_.n_bins();
  Tensor mag = hypot(slice(spec, 1, 0, bins), slice(spec, 1, bins, 2 * bins));
  Tensor mel = matmul(filterbank_, mag);
  if (wave.rank() == 1) mel = reshape(mel, {cfg_.n_mels, frames});
  return mel;
}

Tensor MelExtractor::operator()(const Tensor& wave) const {
  return log(clamp_min(mel_energy(wave), cfg_.log_floor));
}

Tensor log_mel(const Tensor& wave, const MelConfig& cfg) { return MelExtractor(cfg)(wave); }

Tensor log_mel(const Waveform& wave, const MelConfig& cfg) {
  return log_mel(Tensor({static_cast<int64_t>(wave.samples.size())}, wave.samples), cfg);
}

// ---------------------------------------------------------------------------
// MEL1

void save_mel(const std::filesystem::path& path, const Tensor& mel) {
  if (mel.rank() != 2) throw ShapeError("save_mel", {mel.shape()}, "expected (n_mels, frames)");
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot write " + path.string());
  const int64_t n_mels = mel.dim(0), frames = mel.dim(1);
  os.write("MEL1", 4);
  write_le<uint32_t>(os, static_cast<uint32_t>(n_mels));
  write_le<uint32_t>(os, static_cast<uint32_t>(frames));
  auto d = mel.data();
  for (int64_t f = 0; f < frames; ++f)
    for (int64_t m = 0; m < n_mels; ++m) write_le<float>(os, static_cast<float>(d[m * frames + f]));
  if (!os) throw FormatError("write failed: " + path.string());
}

Tensor load_mel(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  if (read_tag(is, "MEL1 magic") != "MEL1") throw FormatError(path.string() + ": bad MEL1 magic");
  const int64_t n_mels = read_le<uint32_t>(is, "n_mels");
  const int64_t frames = read_le<uint32_t>(is, "n_frames");
  if (n_mels == 0 || frames == 0) throw FormatError(path.string() + ": empty mel");
  std::vector<double> v(n_mels * frames);
  for (int64_t f = 0; f < frames; ++f)
    for (int64_t m = 0; m < n_mels; ++m) v[m * frames + f] = read_le<float>(is, "mel values");
  return Tensor({n_mels, frames}, std::move(v));
}

}  // namespace wolonet
