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

#include <filesystem>

#include "kanglid/classifier.hpp"

namespace kanglid {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Binary container: magic, version, a JSON header (model spec, training config,
// tag scheme, backend, tensor directory, checksum), then the tensors as
// little-endian float64. Parameters round-trip bit for bit.
void save_checkpoint(const std::filesystem::path& path, const TrainedModel& model);

// Throws Error(kCorruptCheckpoint) on any structural problem and
// Error(kSchemeMismatch) when the stored scheme differs from `expected`.
TrainedModel load_checkpoint(const std::filesystem::path& path,
                             const TagScheme& expected = TagScheme::canonical());

}  // namespace kanglid
