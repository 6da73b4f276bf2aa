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
#include <memory>
#include <string>
#include <vector>

#include "kanglid/embedding.hpp"
#include "kanglid/tokenizer.hpp"

namespace kanglid {

// The subset of a Hugging Face config.json the encoder needs.
struct EncoderConfig {
  std::string model_type;  // bert, roberta, xlm-roberta
  std::size_t vocab_size = 0;
  std::size_t hidden_size = 0;
  std::size_t num_layers = 0;
  std::size_t num_heads = 0;
  std::size_t intermediate_size = 0;
  std::size_t max_positions = 0;
  std::size_t type_vocab_size = 0;
  double layer_norm_eps = 1e-12;
  std::int32_t pad_token_id = 0;
  std::string hidden_act = "gelu";

  // RoBERTa-family models offset positions past the padding index.
  bool roberta_positions() const { return model_type == "roberta" || model_type == "xlm-roberta"; }

  static EncoderConfig from_file(const std::filesystem::path& config_json);
};

// Inference-only BERT/RoBERTa encoder. Immutable after load; forward() is
// safe to call concurrently.
class TransformerEncoder {
 public:
  static TransformerEncoder load(const std::filesystem::path& safetensors,
                                 const EncoderConfig& config);

  const EncoderConfig& config() const { return config_; }
  std::size_t max_sequence_length() const;

  // Last hidden state for each id sequence (special tokens included).
  // Sequences are packed together for the dense layers; attention never
  // crosses sequence boundaries.
  std::vector<RowMatrixF> forward(const std::vector<std::vector<std::int32_t>>& batch) const;

 private:
  struct Linear {
    RowMatrixF weight;  // out x in
    Eigen::RowVectorXf bias;
  };
  struct LayerNorm {
    Eigen::RowVectorXf gamma;
    Eigen::RowVectorXf beta;
  };
  struct Layer {
    Linear query, key, value, attention_out;
    LayerNorm attention_norm;
    Linear intermediate, output;
    LayerNorm output_norm;
  };

  void apply_norm(const LayerNorm& norm, RowMatrixF& x) const;
  void activate(RowMatrixF& x) const;
  static RowMatrixF apply_linear(const Linear& linear, const RowMatrixF& x);

  EncoderConfig config_;
  RowMatrixF word_embeddings_;
  RowMatrixF position_embeddings_;
  RowMatrixF token_type_embeddings_;
  LayerNorm embedding_norm_;
  std::vector<Layer> layers_;
};

class PretrainedBackend final : public EmbeddingBackend {
 public:
  PretrainedBackend(EmbeddingBackendConfig config, std::unique_ptr<SubwordTokenizer> tokenizer,
                    TransformerEncoder encoder);

  const EmbeddingBackendConfig& config() const override { return config_; }
  WordEmbedding embed_word(std::string_view word) const override;
  std::vector<WordEmbedding> embed_words(std::span<const std::string> words) const override;

  const SubwordTokenizer& tokenizer() const { return *tokenizer_; }
  // Pieces for a word after unknown-token substitution and length capping.
  TokenizedWord pieces_for(std::string_view word, bool* substituted = nullptr) const;

 private:
  EmbeddingBackendConfig config_;
  std::unique_ptr<SubwordTokenizer> tokenizer_;
  TransformerEncoder encoder_;
};

// Loads config.json, model.safetensors and the tokenizer from `dir`, checking
// the snapshot's geometry against `config`.
std::unique_ptr<EmbeddingBackend> load_pretrained_backend(const EmbeddingBackendConfig& config,
                                                          const std::filesystem::path& dir);

}  // namespace kanglid
