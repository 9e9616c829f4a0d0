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

// Training clips and random segment crops.

#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "wolonet/dsp.h"
#include "wolonet/tensor.h"

namespace wolonet {

struct Dataset {
  std::vector<std::vector<double>> clips;
  std::vector<std::string> names;
  int sample_rate = 22050;

  size_t size() const { return clips.size(); }
  bool empty() const { return clips.empty(); }
};

// Harmonic test signals: each clip sums 3 to 8 harmonics of a random
// fundamental in [80, 400] Hz, every harmonic with its own slow amplitude
// envelope, plus low-level white noise. Peak-normalised to 0.5.
Dataset synthetic_dataset(int64_t clips, uint64_t seed, int sample_rate = 22050,
                          double seconds = 1.0);

// Every *.wav in `dir` (sorted by file name). Throws on a sample rate that
// differs between files.
Dataset load_dataset(const std::filesystem::path& dir);

// Moves the last `count` clips into a second dataset.
Dataset split_tail(Dataset& dataset, int64_t count);

struct Segment {
  Tensor mel;   // (n_mels, segment / hop)
  Tensor wave;  // (segment)
  size_t clip = 0;
  int64_t offset = 0;
};

struct Batch {
  Tensor mel;   // (N, n_mels, frames)
  Tensor wave;  // (N, segment)
};

// Hop-aligned uniform crops. Clips shorter than the segment are skipped with
// a warning on stderr when the sampler is built.
class SegmentSampler {
 public:
  SegmentSampler(const Dataset& dataset, int64_t segment_samples, const MelExtractor& mel,
                 bool warn = true);

  size_t eligible() const { return eligible_.size(); }
  Segment sample(std::mt19937_64& rng) const;
  Batch sample_batch(int64_t batch_size, std::mt19937_64& rng) const;

 private:
  const Dataset& dataset_;
  int64_t segment_;
  const MelExtractor& mel_;
  std::vector<size_t> eligible_;
};

Segment sample_segment(const Dataset& dataset, int64_t segment_samples, const MelExtractor& mel,
                       std::mt19937_64& rng);

}  // namespace wolonet
