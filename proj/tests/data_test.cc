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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "test_util.h"
#include "wolonet/ops.h"

namespace wolonet {
namespace {

namespace fs = std::filesystem;

TEST(Synthetic, DeterministicAndNormalised) {
  Dataset a = synthetic_dataset(3, 7), b = synthetic_dataset(3, 7), c = synthetic_dataset(3, 8);
  ASSERT_EQ(a.size(), 3u);
  EXPECT_EQ(a.clips, b.clips);
  EXPECT_NE(a.clips, c.clips);
  for (const auto& clip : a.clips) {
    ASSERT_EQ(clip.size(), 22050u);
    double peak = 0.0;
    for (double v : clip) peak = std::max(peak, std::fabs(v));
    EXPECT_NEAR(peak, 0.5, 1e-12);
  }
}

TEST(Sampler, SegmentShapesAndAlignment) {
  Dataset ds = synthetic_dataset(4, 1);
  MelExtractor mel(MelConfig{});
  SegmentSampler sampler(ds, 8192, mel);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 5; ++i) {
    Segment s = sampler.sample(rng);
    EXPECT_EQ(s.wave.shape(), (Shape{8192}));
    EXPECT_EQ(s.mel.shape(), (Shape{80, 32}));
    EXPECT_EQ(s.offset % 256, 0);
    EXPECT_LE(s.offset + 8192, static_cast<int64_t>(ds.clips[s.clip].size()));
    for (int64_t j = 0; j < 8192; j += 1000) EXPECT_EQ(s.wave.data()[j], ds.clips[s.clip][s.offset + j]);
  }
}

TEST(Sampler, MelIsLogMelOfTheCrop) {
  Dataset ds = synthetic_dataset(2, 2);
  MelExtractor mel(MelConfig{});
  SegmentSampler sampler(ds, 4096, mel);
  std::mt19937_64 rng(4);
  Segment s = sampler.sample(rng);
  EXPECT_LT(testing::max_abs_diff(s.mel, log_mel(s.wave, MelConfig{})), 1e-12);
  EXPECT_FALSE(s.mel.requires_grad());
}

TEST(Sampler, ReproducibleWithSeed) {
  Dataset ds = synthetic_dataset(4, 1);
  MelExtractor mel(MelConfig{});
  SegmentSampler sampler(ds, 2048, mel);
  std::mt19937_64 r1(9), r2(9);
  Batch a = sampler.sample_batch(3, r1), b = sampler.sample_batch(3, r2);
  EXPECT_EQ(a.wave.shape(), (Shape{3, 2048}));
  EXPECT_EQ(a.mel.shape(), (Shape{3, 80, 8}));
  EXPECT_EQ(testing::values(a.wave), testing::values(b.wave));
  EXPECT_EQ(testing::values(a.mel), testing::values(b.mel));
}

TEST(Sampler, SkipsShortClipsAndRejectsEmpty) {
  Dataset ds = synthetic_dataset(2, 1);
  ds.clips[0].resize(1000);
  MelExtractor mel(MelConfig{});
  SegmentSampler sampler(ds, 2048, mel, false);
  EXPECT_EQ(sampler.eligible(), 1u);
  std::mt19937_64 rng(1);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(sampler.sample(rng).clip, 1u);

  Dataset empty;
  EXPECT_THROW(SegmentSampler(empty, 2048, mel, false), ValueError);
  ds.clips[1].resize(1000);
  EXPECT_THROW(SegmentSampler(ds, 2048, mel, false), ValueError);
  EXPECT_THROW(SegmentSampler(synthetic_dataset(1, 1), 2000, mel, false), ValueError);
}

TEST(Dataset, LoadsSortedWavsAndSplitsTail) {
  const fs::path dir = fs::temp_directory_path() / "wolonet_data_test";
  fs::remove_all(dir);
  fs::create_directories(dir);
  for (int i : {2, 0, 1}) {
    Waveform w;
    w.samples.assign(100 + i, 0.25 * i);
    save_wav(dir / ("clip" + std::to_string(i) + ".wav"), w);
  }
  {
    std::ofstream os(dir / "notes.txt");
    os << "ignored";
  }
  Dataset ds = load_dataset(dir);
  ASSERT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds.names[0], "clip0.wav");
  EXPECT_EQ(ds.clips[2].size(), 102u);
  Dataset tail = split_tail(ds, 1);
  EXPECT_EQ(ds.size(), 2u);
  ASSERT_EQ(tail.size(), 1u);
  EXPECT_EQ(tail.names[0], "clip2.wav");
  fs::remove_all(dir);
}

}  // namespace
}  // namespace wolonet
