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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "test_util.h"
#include "wolonet/config.h"

namespace wolonet {
namespace {

namespace fs = std::filesystem;

fs::path temp_path(const std::string& name) {
  return fs::temp_directory_path() / ("wolonet_ckpt_" + name);
}

TEST(Checkpoint, Float64RoundTripIsExact) {
  std::mt19937_64 rng(1);
  std::vector<NamedTensor> t{{"a", testing::random_tensor({3, 4}, rng)},
                             {"b.c", testing::random_tensor({5}, rng)},
                             {"s", Tensor::scalar(1.0 / 3.0)}};
  const fs::path p = temp_path("f64");
  write_checkpoint(p, t, CheckpointPrecision::kFloat64);
  auto r = read_checkpoint(p);
  ASSERT_EQ(r.size(), 3u);
  for (size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(r[i].name, t[i].name);
    EXPECT_EQ(r[i].value.shape(), t[i].value.shape());
    EXPECT_EQ(testing::values(r[i].value), testing::values(t[i].value));
  }
  fs::remove(p);
}

TEST(Checkpoint, Float32RoundsValues) {
  const fs::path p = temp_path("f32");
  write_checkpoint(p, {{"x", Tensor({1}, {0.1})}}, CheckpointPrecision::kFloat32);
  EXPECT_EQ(find_tensor(read_checkpoint(p), "x").data()[0], static_cast<double>(0.1f));
  EXPECT_EQ(fs::file_size(p), 4u + 4 + 4 + 2 + 1 + 1 + 4 + 4);
  fs::remove(p);
}

TEST(Checkpoint, CorruptFilesThrow) {
  const fs::path p = temp_path("bad");
  write_checkpoint(p, {{"x", Tensor({4}, 1.0)}});
  auto bytes = [&] {
    std::ifstream is(p, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(is), {});
  }();
  auto rewrite = [&](std::string b) {
    std::ofstream os(p, std::ios::binary | std::ios::trunc);
    os << b;
  };
  std::string b = bytes;
  b[0] = 'X';
  rewrite(b);
  EXPECT_THROW(read_checkpoint(p), FormatError);
  b = bytes;
  b[4] = 9;
  rewrite(b);
  EXPECT_THROW(read_checkpoint(p), FormatError);
  rewrite(bytes.substr(0, bytes.size() - 3));
  EXPECT_THROW(read_checkpoint(p), FormatError);
  write_checkpoint(p, {{"x", Tensor({1}, 1.0)}, {"x", Tensor({1}, 2.0)}});
  EXPECT_THROW(read_checkpoint(p), FormatError);
  EXPECT_THROW(read_checkpoint(temp_path("missing")), FormatError);
  fs::remove(p);
}

TEST(Checkpoint, FindAndAssign) {
  std::vector<NamedTensor> src{{"w", Tensor({2}, {1.0, 2.0})}};
  Tensor dst({2}, 0.0);
  assign_tensors({{"w", dst}}, src);
  EXPECT_EQ(testing::values(dst), (std::vector<double>{1.0, 2.0}));
  EXPECT_THROW(assign_tensors({{"w", Tensor({3}, 0.0)}}, src), FormatError);
  EXPECT_THROW(assign_tensors({{"v", dst}}, src), FormatError);
  EXPECT_TRUE(has_tensor(src, "w"));
  EXPECT_THROW(find_tensor(src, "v"), FormatError);
}

TEST(Checkpoint, ConfigsRoundTrip) {
  GeneratorConfig g = tiny_generator_config();
  g.activation = KernelActivation::kSoftmax;
  GeneratorConfig g2 = generator_config_from(config_tensors(g));
  EXPECT_EQ(g2.upsample_strides, g.upsample_strides);
  EXPECT_EQ(g2.upsample_kernels, g.upsample_kernels);
  EXPECT_EQ(g2.base_channels, g.base_channels);
  EXPECT_EQ(g2.wolo_dilations, g.wolo_dilations);
  EXPECT_EQ(g2.wolo_kernel, g.wolo_kernel);
  EXPECT_EQ(g2.activation, g.activation);
  DiscriminatorConfig d = desk_discriminator_config();
  d.periods = {2, 7};
  DiscriminatorConfig d2 = discriminator_config_from(config_tensors(d));
  EXPECT_EQ(d2.periods, d.periods);
  EXPECT_EQ(d2.scales, d.scales);
  EXPECT_EQ(d2.channel_divisor, d.channel_divisor);
  MelConfig m;
  m.fmax = 8000.0;
  m.hop = 128;
  MelConfig m2 = mel_config_from(config_tensors(m));
  EXPECT_EQ(m2.fmax, 8000.0);
  EXPECT_EQ(m2.hop, 128);
  EXPECT_EQ(mel_config_from({}).n_mels, 80);
}

TEST(Checkpoint, GeneratorSaveLoad) {
  GeneratorConfig cfg = tiny_generator_config();
  Generator g = Generator::build(cfg, 5);
  const fs::path p = temp_path("gen");
  save_generator(p, g, MelConfig{}, CheckpointPrecision::kFloat64);
  Generator h = load_generator(p);
  auto a = g.named_parameters(), b = h.named_parameters();
  ASSERT_EQ(a.size(), b.size());
  for (size_t i = 0; i < a.size(); ++i) EXPECT_EQ(testing::values(a[i].value), testing::values(b[i].value));
  save_generator(p, g, MelConfig{});
  Generator f = load_generator(p);
  EXPECT_EQ(f.param_count(), g.param_count());
  EXPECT_EQ(f.named_parameters()[0].value.data()[0],
            static_cast<double>(static_cast<float>(a[0].value.data()[0])));
  fs::remove(p);
}

}  // namespace
}  // namespace wolonet
