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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace kanglid {

using RowMatrixF = Eigen::Matrix<float, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class BackendKind { kPretrainedTransformer, kDeterministicHash };
enum class Casing { kUncased, kCased };

struct EmbeddingBackendConfig {
  std::string name;
  BackendKind kind = BackendKind::kDeterministicHash;
  std::size_t hidden_size = 64;
  std::size_t transformer_blocks = 1;
  std::size_t attention_heads = 1;
  std::uint64_t parameter_count = 0;  // informational
  Casing casing = Casing::kUncased;

  friend bool operator==(const EmbeddingBackendConfig&, const EmbeddingBackendConfig&) = default;
};

inline constexpr std::size_t kDefaultHashHiddenSize = 64;
inline constexpr std::size_t kDefaultMaxSubwords = 16;

// The four pretrained encoders: bert-base-uncased, bert-base-multilingual-uncased,
// xlm-roberta-large, roberta-base.
const std::vector<EmbeddingBackendConfig>& pretrained_backend_configs();

EmbeddingBackendConfig hash_backend_config(std::size_t hidden_size = kDefaultHashHiddenSize);

// Resolves a registered name: one of the pretrained encoders, "hash"
// (= hash-64) or "hash-<N>".
std::optional<EmbeddingBackendConfig> find_backend_config(std::string_view name);
EmbeddingBackendConfig require_backend_config(std::string_view name);

struct WordEmbedding {
  std::string word;
  std::string backend;
  std::vector<std::string> pieces;
  RowMatrixF vectors;      // one row per subword piece
  Eigen::VectorXf pooled;  // mean over rows
  // The tokenizer produced no pieces and the unknown token was substituted.
  bool unknown_substituted = false;
};

class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;

  virtual const EmbeddingBackendConfig& config() const = 0;
  const std::string& name() const { return config().name; }
  std::size_t hidden_size() const { return config().hidden_size; }

  // Throws Error(kEmptyWord) for words that are empty after trimming.
  virtual WordEmbedding embed_word(std::string_view word) const = 0;

  // Same result as calling embed_word on each entry; backends may batch.
  virtual std::vector<WordEmbedding> embed_words(std::span<const std::string> words) const;
};

struct BackendOptions {
  // Directory holding one sub-directory per pretrained backend name, each a
  // Hugging Face style snapshot (config.json, model.safetensors,
  // tokenizer.json or vocab.txt).
  std::filesystem::path weights_cache;
};

inline constexpr const char* kWeightsCacheEnv = "KANGLID_WEIGHTS_CACHE";

// $KANGLID_WEIGHTS_CACHE when set, otherwise ~/.cache/kanglid.
std::filesystem::path default_weights_cache();

std::unique_ptr<EmbeddingBackend> load_backend(const EmbeddingBackendConfig& config,
                                               const BackendOptions& options = {});
std::unique_ptr<EmbeddingBackend> load_backend(std::string_view name,
                                               const BackendOptions& options = {});

// Pure function of (word, hidden_size): each character trigram of "<word>"
// selects a fixed pseudo-random vector.
class HashEmbeddingBackend final : public EmbeddingBackend {
 public:
  explicit HashEmbeddingBackend(std::size_t hidden_size = kDefaultHashHiddenSize);

  const EmbeddingBackendConfig& config() const override { return config_; }
  WordEmbedding embed_word(std::string_view word) const override;

  static constexpr std::uint64_t kBuckets = std::uint64_t{1} << 20;
  static std::uint64_t bucket_of(std::string_view trigram);

 private:
  EmbeddingBackendConfig config_;
};

struct EmbeddedBatch {
  std::size_t max_subwords = 0;
  std::size_t hidden_size = 0;
  std::vector<RowMatrixF> sequences;  // each max_subwords x hidden, zero padded
  Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> mask;
  std::vector<std::size_t> lengths;  // real (unpadded, post-truncation) rows
  std::size_t truncated_words = 0;

  std::size_t size() const { return sequences.size(); }
};

EmbeddedBatch embed_batch(const EmbeddingBackend& backend, std::span<const std::string> words,
                          std::size_t max_subwords = kDefaultMaxSubwords);

// Mean of the rows of `vectors`.
Eigen::VectorXf mean_pool(const RowMatrixF& vectors);

}  // namespace kanglid
