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

// JSON run configuration. Top-level sections "train", "discriminator",
// "generator" and "mel" are all optional; keys inside them mirror the struct
// fields and missing keys keep their defaults. Unknown keys are errors.

#pragma once

#include <filesystem>
#include <string>

#include "wolonet/dsp.h"
#include "wolonet/generator.h"
#include "wolonet/trainer.h"

namespace wolonet {

struct RunConfig {
  TrainConfig train;
  GeneratorConfig generator;
  MelConfig mel;
};

// Throws ValueError on malformed JSON, wrong types or unknown keys.
RunConfig parse_run_config(const std::string& json_text, const RunConfig& base = {});
RunConfig load_run_config(const std::filesystem::path& path, const RunConfig& base = {});
std::string dump_run_config(const RunConfig& cfg);

// Small generator used for desk-scale runs: 32 base channels, strides
// [8, 8, 2, 2], WOLO kernel 3.
GeneratorConfig tiny_generator_config();
// Discriminators scaled for desk runs.
DiscriminatorConfig desk_discriminator_config();

}  // namespace wolonet
