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

#include <string>

#include "kanglid/embedding.hpp"
#include "kanglid/error.hpp"
#include "kanglid/random.hpp"
#include "kanglid/text.hpp"

namespace kanglid {

namespace {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

}  // namespace

HashEmbeddingBackend::HashEmbeddingBackend(std::size_t hidden_size)
    : config_(hash_backend_config(hidden_size)) {}

std::uint64_t HashEmbeddingBackend::bucket_of(std::string_view trigram) {
  return fnv1a(trigram) % kBuckets;
}

WordEmbedding HashEmbeddingBackend::embed_word(std::string_view word) const {
  const auto trimmed = trim(word);
  if (trimmed.empty()) throw Error(ErrorCode::kEmptyWord, "cannot embed an empty word");

  std::u32string padded = U"<";
  for (char32_t cp : utf8_decode(trimmed)) padded.push_back(to_lower(cp));
  padded.push_back(U'>');

  WordEmbedding out;
  out.word = std::string(word);
  out.backend = config_.name;
  const std::size_t count = padded.size() - 2;
  out.vectors.resize(static_cast<Eigen::Index>(count),
                     static_cast<Eigen::Index>(config_.hidden_size));
  for (std::size_t i = 0; i < count; ++i) {
    std::string trigram = utf8_encode(std::u32string_view(padded).substr(i, 3));
    const std::uint64_t bucket = bucket_of(trigram);
    for (std::size_t j = 0; j < config_.hidden_size; ++j) {
      const std::uint64_t bits = mix64(bucket * 0x100000001B3ULL + j);
      const double unit = static_cast<double>(bits >> 11) * 0x1.0p-53;
      out.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          static_cast<float>(2.0 * unit - 1.0);
    }
    out.pieces.push_back(std::move(trigram));
  }
  out.pooled = mean_pool(out.vectors);
  return out;
}

}  // namespace kanglid
