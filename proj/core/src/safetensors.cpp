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

#include "kanglid/safetensors.hpp"

#include <bit>
#include <cstring>

#include <nlohmann/json.hpp>

#include "kanglid/error.hpp"

namespace kanglid {

namespace {

std::size_t dtype_size(const std::string& dtype) {
  if (dtype == "F32") return 4;
  if (dtype == "F16" || dtype == "BF16") return 2;
  if (dtype == "F64") return 8;
  return 0;
}

float half_to_float(std::uint16_t h) {
  const std::uint32_t sign = static_cast<std::uint32_t>(h & 0x8000u) << 16;
  std::uint32_t exponent = (h >> 10) & 0x1Fu;
  std::uint32_t mantissa = h & 0x3FFu;
  std::uint32_t bits;
  if (exponent == 0) {
    if (mantissa == 0) {
      bits = sign;
    } else {
      // Subnormal: renormalise.
      exponent = 127 - 15 + 1;
      while ((mantissa & 0x400u) == 0) {
        mantissa <<= 1;
        --exponent;
      }
      mantissa &= 0x3FFu;
      bits = sign | (exponent << 23) | (mantissa << 13);
    }
  } else if (exponent == 0x1F) {
    bits = sign | 0x7F800000u | (mantissa << 13);
  } else {
    bits = sign | ((exponent + 127 - 15) << 23) | (mantissa << 13);
  }
  return std::bit_cast<float>(bits);
}

}  // namespace

std::int64_t SafetensorsFile::TensorInfo::numel() const {
  std::int64_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

SafetensorsFile::SafetensorsFile(const std::filesystem::path& path)
    : path_(path), stream_(path, std::ios::binary) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  if (!stream_) throw Error(ErrorCode::kWeightsUnavailable, "cannot open " + path.string());

  std::uint64_t header_len = 0;
  stream_.read(reinterpret_cast<char*>(&header_len), sizeof(header_len));
  const auto file_size = std::filesystem::file_size(path);
  if (!stream_ || header_len == 0 || header_len > file_size - 8) {
    throw Error(ErrorCode::kWeightsUnavailable, "corrupt safetensors header in " + path.string());
  }
  std::string header(header_len, '\0');
  stream_.read(header.data(), static_cast<std::streamsize>(header_len));
  data_offset_ = 8 + header_len;

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kWeightsUnavailable, path.string() + ": " + e.what());
  }
  const std::uint64_t data_size = file_size - data_offset_;
  for (const auto& [name, entry] : doc.items()) {
    if (name == "__metadata__") continue;
    TensorInfo info;
    info.dtype = entry.at("dtype").get<std::string>();
    info.shape = entry.at("shape").get<std::vector<std::int64_t>>();
    const auto offsets = entry.at("data_offsets").get<std::vector<std::uint64_t>>();
    if (offsets.size() != 2 || offsets[1] < offsets[0] || offsets[1] > data_size) {
      throw Error(ErrorCode::kWeightsUnavailable, "bad offsets for tensor " + name);
    }
    info.begin = offsets[0];
    info.end = offsets[1];
    const auto width = dtype_size(info.dtype);
    if (width != 0 && info.end - info.begin != static_cast<std::uint64_t>(info.numel()) * width) {
      throw Error(ErrorCode::kWeightsUnavailable, "size mismatch for tensor " + name);
    }
    tensors_.emplace(name, std::move(info));
  }
}

const SafetensorsFile::TensorInfo& SafetensorsFile::info(const std::string& name) const {
  auto it = tensors_.find(name);
  if (it == tensors_.end()) {
    throw Error(ErrorCode::kWeightsUnavailable,
                path_.string() + " has no tensor named '" + name + "'");
  }
  return it->second;
}

void SafetensorsFile::read(const std::string& name, std::span<float> out) {
  const auto& meta = info(name);
  if (static_cast<std::int64_t>(out.size()) != meta.numel()) {
    throw Error(ErrorCode::kWeightsUnavailable, "unexpected element count for " + name);
  }
  const auto width = dtype_size(meta.dtype);
  if (width == 0) {
    throw Error(ErrorCode::kWeightsUnavailable, "unsupported dtype " + meta.dtype + " for " + name);
  }
  stream_.seekg(static_cast<std::streamoff>(data_offset_ + meta.begin));
  if (meta.dtype == "F32") {
    stream_.read(reinterpret_cast<char*>(out.data()),
                 static_cast<std::streamsize>(out.size() * sizeof(float)));
  } else {
    std::vector<char> raw(meta.end - meta.begin);
    stream_.read(raw.data(), static_cast<std::streamsize>(raw.size()));
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (meta.dtype == "F64") {
        double v;
        std::memcpy(&v, raw.data() + i * 8, 8);
        out[i] = static_cast<float>(v);
      } else {
        std::uint16_t v;
        std::memcpy(&v, raw.data() + i * 2, 2);
        out[i] = meta.dtype == "F16" ? half_to_float(v)
                                     : std::bit_cast<float>(static_cast<std::uint32_t>(v) << 16);
      }
    }
  }
  if (!stream_) throw Error(ErrorCode::kWeightsUnavailable, "short read for tensor " + name);
}

std::vector<float> SafetensorsFile::read(const std::string& name) {
  std::vector<float> out(static_cast<std::size_t>(info(name).numel()));
  read(name, out);
  return out;
}

}  // namespace kanglid
