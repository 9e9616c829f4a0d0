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

// Named-tensor checkpoint files.
//
//   "WOLO"  u32 version  u32 count
//   count x { u16 name_len, name (UTF-8), u8 rank, rank x u32 dim, values }
//
// Version 1 stores values as float32, version 2 as float64. Everything is
// little-endian. Configuration travels alongside the weights as small
// "config.*" tensors so a file is self-describing.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "wolonet/discriminator.h"
#include "wolonet/dsp.h"
#include "wolonet/generator.h"

namespace wolonet {

enum class CheckpointPrecision : uint32_t { kFloat32 = 1, kFloat64 = 2 };

void write_checkpoint(const std::filesystem::path& path, const std::vector<NamedTensor>& tensors,
                      CheckpointPrecision precision = CheckpointPrecision::kFloat64);
// Throws FormatError on bad magic, unknown version, duplicate names or
// truncation.
std::vector<NamedTensor> read_checkpoint(const std::filesystem::path& path);

// Looks a tensor up by exact name; throws FormatError if absent.
const Tensor& find_tensor(const std::vector<NamedTensor>& tensors, const std::string& name);
bool has_tensor(const std::vector<NamedTensor>& tensors, const std::string& name);

// Copies values into every destination tensor from the source tensor of the
// same name. Shapes must match exactly.
void assign_tensors(const std::vector<NamedTensor>& dst, const std::vector<NamedTensor>& src);

std::vector<NamedTensor> config_tensors(const GeneratorConfig& cfg);
std::vector<NamedTensor> config_tensors(const DiscriminatorConfig& cfg);
std::vector<NamedTensor> config_tensors(const MelConfig& cfg);
GeneratorConfig generator_config_from(const std::vector<NamedTensor>& tensors);
DiscriminatorConfig discriminator_config_from(const std::vector<NamedTensor>& tensors);
// Falls back to defaults when a file carries no mel configuration.
MelConfig mel_config_from(const std::vector<NamedTensor>& tensors);

// Generator weights plus its configuration (and the mel settings it expects).
void save_generator(const std::filesystem::path& path, const Generator& g, const MelConfig& mel,
                    CheckpointPrecision precision = CheckpointPrecision::kFloat32);
Generator load_generator(const std::filesystem::path& path);

}  // namespace wolonet
