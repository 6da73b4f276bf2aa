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

#include "kanglid/embedding.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>

#include "kanglid/error.hpp"
#include "kanglid/transformer.hpp"

namespace kanglid {

const std::vector<EmbeddingBackendConfig>& pretrained_backend_configs() {
  using K = BackendKind;
  static const std::vector<EmbeddingBackendConfig> configs = {
      {"bert-base-uncased", K::kPretrainedTransformer, 768, 12, 12, 110'000'000, Casing::kUncased},
      {"bert-base-multilingual-uncased", K::kPretrainedTransformer, 768, 12, 12, 110'000'000,
       Casing::kUncased},
      {"xlm-roberta-large", K::kPretrainedTransformer, 1024, 24, 16, 355'000'000, Casing::kCased},
      {"roberta-base", K::kPretrainedTransformer, 768, 12, 12, 110'000'000, Casing::kCased},
  };
  return configs;
}

EmbeddingBackendConfig hash_backend_config(std::size_t hidden_size) {
  if (hidden_size == 0) throw Error(ErrorCode::kInvalidArgument, "hash hidden_size must be > 0");
  return {"hash-" + std::to_string(hidden_size),
          BackendKind::kDeterministicHash,
          hidden_size,
          1,
          1,
          0,
          Casing::kUncased};
}

std::optional<EmbeddingBackendConfig> find_backend_config(std::string_view name) {
  for (const auto& config : pretrained_backend_configs()) {
    if (config.name == name) return config;
  }
  if (name == "hash") return hash_backend_config();
  constexpr std::string_view kPrefix = "hash-";
  if (name.starts_with(kPrefix)) {
    const auto digits = name.substr(kPrefix.size());
    std::size_t size = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), size);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && size > 0 && size <= 65536) {
      return hash_backend_config(size);
    }
  }
  return std::nullopt;
}

EmbeddingBackendConfig require_backend_config(std::string_view name) {
  if (auto config = find_backend_config(name)) return *config;
  throw Error(ErrorCode::kUnknownBackend, "no backend named '" + std::string(name) + "'");
}

std::vector<WordEmbedding> EmbeddingBackend::embed_words(std::span<const std::string> words) const {
  std::vector<WordEmbedding> out;
  out.reserve(words.size());
  for (const auto& word : words) out.push_back(embed_word(word));
  return out;
}

std::filesystem::path default_weights_cache() {
  if (const char* env = std::getenv(kWeightsCacheEnv); env != nullptr && *env != '\0') {
    return env;
  }
  if (const char* home = std::getenv("HOME"); home != nullptr && *home != '\0') {
    return std::filesystem::path(home) / ".cache" / "kanglid";
  }
  return ".kanglid-cache";
}

std::unique_ptr<EmbeddingBackend> load_backend(const EmbeddingBackendConfig& config,
                                               const BackendOptions& options) {
  if (config.hidden_size == 0) {
    throw Error(ErrorCode::kInvalidArgument, "backend hidden_size must be positive");
  }
  if (config.kind == BackendKind::kDeterministicHash) {
    return std::make_unique<HashEmbeddingBackend>(config.hidden_size);
  }
  const auto cache =
      options.weights_cache.empty() ? default_weights_cache() : options.weights_cache;
  return load_pretrained_backend(config, cache / config.name);
}

std::unique_ptr<EmbeddingBackend> load_backend(std::string_view name,
                                               const BackendOptions& options) {
  return load_backend(require_backend_config(name), options);
}

Eigen::VectorXf mean_pool(const RowMatrixF& vectors) {
  if (vectors.rows() == 0) return Eigen::VectorXf::Zero(vectors.cols());
  return vectors.colwise().mean().transpose();
}

EmbeddedBatch embed_batch(const EmbeddingBackend& backend, std::span<const std::string> words,
                          std::size_t max_subwords) {
  if (words.empty()) throw Error(ErrorCode::kEmptyBatch, "embed_batch needs at least one word");
  if (max_subwords == 0) throw Error(ErrorCode::kInvalidArgument, "max_subwords must be > 0");

  const auto embeddings = backend.embed_words(words);
  EmbeddedBatch batch;
  batch.max_subwords = max_subwords;
  batch.hidden_size = backend.hidden_size();
  const auto rows = static_cast<Eigen::Index>(max_subwords);
  const auto cols = static_cast<Eigen::Index>(batch.hidden_size);
  batch.mask.setZero(static_cast<Eigen::Index>(words.size()), rows);
  for (std::size_t i = 0; i < embeddings.size(); ++i) {
    const auto& emb = embeddings[i];
    const auto real = std::min<Eigen::Index>(emb.vectors.rows(), rows);
    if (emb.vectors.rows() > rows) ++batch.truncated_words;
    RowMatrixF padded = RowMatrixF::Zero(rows, cols);
    padded.topRows(real) = emb.vectors.topRows(real);
    batch.sequences.push_back(std::move(padded));
    batch.mask.row(static_cast<Eigen::Index>(i)).head(real).setOnes();
    batch.lengths.push_back(static_cast<std::size_t>(real));
  }
  return batch;
}

}  // namespace kanglid
