// Copyright 2026 The kanglid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "kanglid/classifier.hpp"
#include "kanglid/evaluation.hpp"

namespace kanglid::cli {

// Everything a training run needs. Resolution order: defaults, then the
// config file, then command-line flags.
struct RunConfig {
  std::filesystem::path train_file;
  std::filesystem::path test_file;
  std::filesystem::path output_dir = "kanglid-run";
  std::filesystem::path weights_cache;  // empty: environment, then ~/.cache/kanglid
  std::string backend = "bert-base-uncased";
  double val_fraction = 0.1;
  bool stratified = true;
  LabelSet label_set = LabelSet::kPresentInGold;
  ModelSpec model;  // input_size is filled from the backend
  TrainingConfig training;
};

// Flat `key = value` lines; '#' starts a comment. Throws Error(kInvalidConfig)
// for unknown keys or unparsable values.
using KeyValues = std::map<std::string, std::string>;
KeyValues read_key_values(const std::filesystem::path& path);
void apply_config(RunConfig& config, const KeyValues& values);

std::string to_text(const RunConfig& config);

}  // namespace kanglid::cli
