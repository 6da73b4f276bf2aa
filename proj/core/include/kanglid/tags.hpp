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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kanglid {

// The six language tags, in canonical index order.
enum class Tag : std::uint8_t { kKannada = 0, kEnglish, kMixed, kName, kLocation, kOther };

inline constexpr std::size_t kNumTags = 6;

inline constexpr std::array<Tag, kNumTags> kAllTags = {Tag::kKannada, Tag::kEnglish,  Tag::kMixed,
                                                       Tag::kName,    Tag::kLocation, Tag::kOther};

using OneHot = std::array<float, kNumTags>;

constexpr std::size_t index_of(Tag tag) { return static_cast<std::size_t>(tag); }

// Lowercase wire name of a tag ("kn", "en", "en-kn", "name", "location", "other").
std::string_view tag_name(Tag tag);

// Case-insensitive; surrounding whitespace is ignored.
std::optional<Tag> parse_tag(std::string_view text);

// Like parse_tag but throws Error(kUnknownTag).
Tag require_tag(std::string_view text);

// Ordered tag-name list. A trained model records the scheme it was trained
// with; the canonical scheme is the only one this library trains.
class TagScheme {
 public:
  TagScheme();  // canonical order
  explicit TagScheme(std::vector<std::string> names);

  static const TagScheme& canonical();

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }
  bool is_canonical() const;

  OneHot encode(Tag tag) const;
  OneHot encode(std::string_view tag) const;

  // Throws Error(kInvalidOneHot) unless `vector` is length six with a single 1.
  Tag decode(std::span<const float> vector) const;

  friend bool operator==(const TagScheme&, const TagScheme&) = default;

 private:
  std::vector<std::string> names_;
};

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax_index(std::span<const double> values);
Tag argmax_tag(std::span<const double> probabilities);

}  // namespace kanglid
