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

#include "wolonet/data.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>

#include "wolonet/ops.h"

namespace wolonet {

Dataset synthetic_dataset(int64_t clips, uint64_t seed, int sample_rate, double seconds) {
  if (clips < 0) throw ValueError("synthetic_dataset: negative clip count");
  if (sample_rate <= 0 || !(seconds > 0.0)) throw ValueError("synthetic_dataset: bad duration");
  const int64_t len = static_cast<int64_t>(std::llround(seconds * sample_rate));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> harmonics(3, 8);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double two_pi = 2.0 * std::numbers::pi;

  Dataset ds;
  ds.sample_rate = sample_rate;
  for (int64_t c = 0; c < clips; ++c) {
    const double f0 = 80.0 + 320.0 * unit(rng);
    const int n = harmonics(rng);
    std::vector<double> x(len, 0.0);
    for (int h = 1; h <= n; ++h) {
      const double f = f0 * h;
      if (f >= 0.5 * sample_rate) break;
      const double amp = 1.0 / h * (0.5 + 0.5 * unit(rng));
      const double phase = two_pi * unit(rng);
      const double am_rate = 0.5 + 3.5 * unit(rng);
      const double am_phase = two_pi * unit(rng);
      const double am_depth = 0.8 * unit(rng);
      for (int64_t i = 0; i < len; ++i) {
        const double t = static_cast<double>(i) / sample_rate;
        const double env = 1.0 - am_depth * 0.5 * (1.0 + std::sin(two_pi * am_rate * t + am_phase));
        x[i] += amp * env * std::sin(two_pi * f * t + phase);
      }
    }
    for (auto& v : x) v += 0.003 * noise(rng);
    double peak = 0.0;
    for (double v : x) peak = std::max(peak, std::abs(v));
    if (peak > 0.0)
      for (auto& v : x) v *= 0.5 / peak;
    ds.clips.push_back(std::move(x));
    ds.names.push_back("synthetic_" + std::to_string(c));
  }
  return ds;
}

Dataset load_dataset(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ValueError("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".wav") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  Dataset ds;
  for (size_t i = 0; i < files.size(); ++i) {
    Waveform w = load_wav(files[i]);
    if (i == 0) ds.sample_rate = w.sample_rate;
    if (w.sample_rate != ds.sample_rate)
      throw ValueError(files[i].string() + ": sample rate " + std::to_string(w.sample_rate) +
                       " differs from " + std::to_string(ds.sample_rate));
    ds.clips.push_back(std::move(w.samples));
    ds.names.push_back(files[i].filename().string());
  }
  return ds;
}

Dataset split_tail(Dataset& dataset, int64_t count) {
  if (count < 0 || count > static_cast<int64_t>(dataset.size()))
    throw ValueError("split_tail: cannot take " + std::to_string(count) + " of " +
                     std::to_string(dataset.size()) + " clips");
  Dataset tail;
  tail.sample_rate = dataset.sample_rate;
  const size_t keep = dataset.size() - count;
  tail.clips.assign(std::make_move_iterator(dataset.clips.begin() + keep),
                    std::make_move_iterator(dataset.clips.end()));
  tail.names.assign(dataset.names.begin() + keep, dataset.names.end());
  dataset.clips.resize(keep);
  dataset.names.resize(keep);
  return tail;
}

SegmentSampler::SegmentSampler(const Dataset& dataset, int64_t segment_samples,
                               const MelExtractor& mel, bool warn)
    : dataset_(dataset), segment_(segment_samples), mel_(mel) {
  const int hop = mel.config().hop;
  if (segment_samples <= 0 || segment_samples % hop != 0)
    throw ValueError("segment_samples (" + std::to_string(segment_samples) +
                     ") must be a positive multiple of the hop (" + std::to_string(hop) + ")");
  if (dataset.empty()) throw ValueError("dataset is empty");
  for (size_t i = 0; i < dataset.size(); ++i) {
    if (static_cast<int64_t>(dataset.clips[i].size()) >= segment_samples) {
      eligible_.push_back(i);
    } else if (warn) {
      std::cerr << "warning: skipping " << dataset.names[i] << " (" << dataset.clips[i].size()
                << " samples, need " << segment_samples << ")\n";
    }
  }
  if (eligible_.empty()) throw ValueError("no clip is long enough for one segment");
}

Segment SegmentSampler::sample(std::mt19937_64& rng) const {
  const int64_t hop = mel_.config().hop;
  const size_t clip = eligible_[std::uniform_int_distribution<size_t>(0, eligible_.size() - 1)(rng)];
  const auto& x = dataset_.clips[clip];
  const int64_t slots = (static_cast<int64_t>(x.size()) - segment_) / hop;
  const int64_t offset = hop * std::uniform_int_distribution<int64_t>(0, slots)(rng);
  std::vector<double> crop(x.begin() + offset, x.begin() + offset + segment_);
  Segment s;
  s.wave = Tensor({segment_}, std::move(crop));
  {
    NoGradGuard no_grad;
    s.mel = mel_(s.wave);
  }
  s.clip = clip;
  s.offset = offset;
  return s;
}

Batch SegmentSampler::sample_batch(int64_t batch_size, std::mt19937_64& rng) const {
  if (batch_size < 1) throw ValueError("batch_size must be >= 1");
  std::vector<Tensor> mels, waves;
  for (int64_t i = 0; i < batch_size; ++i) {
    Segment s = sample(rng);
    mels.push_back(reshape(s.mel, {1, s.mel.dim(0), s.mel.dim(1)}));
    waves.push_back(reshape(s.wave, {1, segment_}));
  }
  NoGradGuard no_grad;
  return {concat(mels, 0), concat(waves, 0)};
}

Segment sample_segment(const Dataset& dataset, int64_t segment_samples, const MelExtractor& mel,
                       std::mt19937_64& rng) {
  return SegmentSampler(dataset, segment_samples, mel).sample(rng);
}

}  // namespace wolonet
