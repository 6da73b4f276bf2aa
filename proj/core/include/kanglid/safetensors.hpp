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
#include <fstream>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace kanglid {

// Reader for the safetensors container: an 8-byte little-endian header
// length, a JSON header describing each tensor, then the raw data block.
// Tensors are read on demand so large checkpoints are never held twice.
class SafetensorsFile {
 public:
  struct TensorInfo {
    std::string dtype;  // F32, F16, BF16 or F64
    std::vector<std::int64_t> shape;
    std::uint64_t begin = 0;  // relative to the data block
    std::uint64_t end = 0;

    std::int64_t numel() const;
  };

  explicit SafetensorsFile(const std::filesystem::path& path);

  const std::map<std::string, TensorInfo>& tensors() const { return tensors_; }
  bool contains(const std::string& name) const { return tensors_.count(name) != 0; }
  const TensorInfo& info(const std::string& name) const;

  // Converts to float32; `out` must have exactly numel() entries.
  void read(const std::string& name, std::span<float> out);
  std::vector<float> read(const std::string& name);

 private:
  std::filesystem::path path_;
  std::ifstream stream_;
  std::uint64_t data_offset_ = 0;
  std::map<std::string, TensorInfo> tensors_;
};

}  // namespace kanglid
