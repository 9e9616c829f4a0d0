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

// Audio I/O and log-mel features.

#pragma once

#include <filesystem>
#include <vector>

#include "wolonet/tensor.h"

namespace wolonet {

struct MelConfig {
  int sample_rate = 22050;
  int n_fft = 1024;
  int hop = 256;
  int win_length = 1024;  // periodic Hann, centred inside n_fft
  int n_mels = 80;
  double fmin = 80.0;
  double fmax = 7600.0;
  double log_floor = 1e-5;

  // Throws ValueError unless hop <= win_length <= n_fft,
  // 0 <= fmin < fmax <= sample_rate / 2 and n_mels >= 1.
  void validate() const;
  int n_bins() const { return n_fft / 2 + 1; }
};

struct Waveform {
  std::vector<double> samples;
  int sample_rate = 22050;
};

// RIFF/WAVE, PCM 16-bit, mono, little-endian. Decoded samples are int/32768.
Waveform load_wav(const std::filesystem::path& path);
// Samples are clamped to [-1, 1] and quantised as round(x * 32768), saturated
// to the int16 range.
void save_wav(const std::filesystem::path& path, const Waveform& wave);

double hz_to_mel(double hz);  // 2595 * log10(1 + hz / 700)
double mel_to_hz(double mel);

// Triangular filters, (n_mels, n_fft/2 + 1). Row m rises from point m to a
// peak of 1 at point m+1 and falls to zero at point m+2, where the n_mels + 2
// points are evenly spaced on the mel scale over [fmin, fmax].
Tensor mel_filterbank(const MelConfig& cfg);
// Centre frequency (Hz) of every filter row.
std::vector<double> mel_center_frequencies(const MelConfig& cfg);

// ceil(samples / hop).
int64_t num_frames(int64_t samples, const MelConfig& cfg);

// Precomputes the windowed DFT basis and filterbank once for repeated use.
class MelExtractor {
 public:
  explicit MelExtractor(MelConfig cfg);

  const MelConfig& config() const { return cfg_; }
  const Tensor& filterbank() const { return filterbank_; }

  // Magnitude STFT -> mel -> ln(max(., floor)). Input (L) or (N, L); output
  // (n_mels, F) or (N, n_mels, F) with F = ceil(L / hop). The signal is reflect
  // padded by (n_fft - hop) / 2 on the left and as needed on the right, so
  // frame t covers padded samples [t * hop, t * hop + n_fft).
  // Differentiable with respect to the waveform.
  Tensor operator()(const Tensor& wave) const;

  // Pre-log mel energies, same framing.
  Tensor mel_energy(const Tensor& wave) const;

 private:
  MelConfig cfg_;
  Tensor basis_;  // (2 * n_bins, 1, n_fft): window * cos rows, then window * -sin rows
  Tensor filterbank_;
};

Tensor log_mel(const Tensor& wave, const MelConfig& cfg);
Tensor log_mel(const Waveform& wave, const MelConfig& cfg);

// MEL1 file: "MEL1", u32 n_mels, u32 n_frames, then float32 values frame-major
// (all mel bins of frame 0 first). All little-endian.
void save_mel(const std::filesystem::path& path, const Tensor& mel);
Tensor load_mel(const std::filesystem::path& path);

}  // namespace wolonet
