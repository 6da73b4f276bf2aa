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

#include "kanglid/tags.hpp"

#include <algorithm>
#include <set>

#include "kanglid/error.hpp"
#include "kanglid/text.hpp"

namespace kanglid {

namespace {
constexpr std::array<std::string_view, kNumTags> kTagNames = {"kn",   "en",       "en-kn",
                                                              "name", "location", "other"};
}  // namespace

std::string_view tag_name(Tag tag) { return kTagNames[index_of(tag)]; }

std::optional<Tag> parse_tag(std::string_view text) {
  const std::string lowered = ascii_lower(trim(text));
  for (std::size_t i = 0; i < kNumTags; ++i) {
    if (lowered == kTagNames[i]) return static_cast<Tag>(i);
  }
  return std::nullopt;
}

Tag require_tag(std::string_view text) {
  if (auto tag = parse_tag(text)) return *tag;
  throw Error(ErrorCode::kUnknownTag, "'" + std::string(text) + "' is not one of the six tags");
}

TagScheme::TagScheme() : names_(kTagNames.begin(), kTagNames.end()) {}

TagScheme::TagScheme(std::vector<std::string> names) : names_(std::move(names)) {
  std::set<std::string> distinct(names_.begin(), names_.end());
  if (distinct.size() != names_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "tag scheme entries must be distinct");
  }
}

const TagScheme& TagScheme::canonical() {
  static const TagScheme scheme;
  return scheme;
}

bool TagScheme::is_canonical() const { return *this == canonical(); }

OneHot TagScheme::encode(Tag tag) const {
  OneHot out{};
  out[index_of(tag)] = 1.0f;
  return out;
}

OneHot TagScheme::encode(std::string_view tag) const { return encode(require_tag(tag)); }

Tag TagScheme::decode(std::span<const float> vector) const {
  if (vector.size() != kNumTags) {
    throw Error(ErrorCode::kInvalidOneHot,
                "expected a length-6 vector, got length " + std::to_string(vector.size()));
  }
  std::optional<std::size_t> hot;
  for (std::size_t i = 0; i < vector.size(); ++i) {
    if (vector[i] == 1.0f) {
      if (hot) throw Error(ErrorCode::kInvalidOneHot, "more than one hot entry");
      hot = i;
    } else if (vector[i] != 0.0f) {
      throw Error(ErrorCode::kInvalidOneHot, "entries must be 0 or 1");
    }
  }
  if (!hot) throw Error(ErrorCode::kInvalidOneHot, "no hot entry");
  return static_cast<Tag>(*hot);
}

std::size_t argmax_index(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kInvalidArgument, "argmax of empty vector");
  // max_element keeps the first of equal maxima.
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

Tag argmax_tag(std::span<const double> probabilities) {
  if (probabilities.size() != kNumTags) {
    throw Error(ErrorCode::kInvalidArgument, "probability vector must have six entries");
  }
  return static_cast<Tag>(argmax_index(probabilities));
}

}  // namespace kanglid
