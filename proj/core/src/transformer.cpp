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

#include "kanglid/transformer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "kanglid/error.hpp"
#include "kanglid/safetensors.hpp"
#include "kanglid/text.hpp"

namespace kanglid {

EncoderConfig EncoderConfig::from_file(const std::filesystem::path& config_json) {
  std::ifstream in(config_json);
  if (!in) throw Error(ErrorCode::kWeightsUnavailable, "cannot read " + config_json.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kWeightsUnavailable, config_json.string() + ": " + e.what());
  }
  EncoderConfig c;
  try {
    c.model_type = doc.value("model_type", "bert");
    c.vocab_size = doc.at("vocab_size").get<std::size_t>();
    c.hidden_size = doc.at("hidden_size").get<std::size_t>();
    c.num_layers = doc.at("num_hidden_layers").get<std::size_t>();
    c.num_heads = doc.at("num_attention_heads").get<std::size_t>();
    c.intermediate_size = doc.at("intermediate_size").get<std::size_t>();
    c.max_positions = doc.at("max_position_embeddings").get<std::size_t>();
    c.type_vocab_size = doc.value("type_vocab_size", std::size_t{0});
    c.layer_norm_eps = doc.value("layer_norm_eps", 1e-12);
    if (doc.contains("pad_token_id") && doc["pad_token_id"].is_number_integer()) {
      c.pad_token_id = doc["pad_token_id"].get<std::int32_t>();
    }
    c.hidden_act = doc.value("hidden_act", "gelu");
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kWeightsUnavailable, config_json.string() + ": " + e.what());
  }
  if (c.num_heads == 0 || c.hidden_size % c.num_heads != 0) {
    throw Error(ErrorCode::kWeightsUnavailable, "hidden_size must divide into attention heads");
  }
  return c;
}

namespace {

class TensorSource {
 public:
  explicit TensorSource(const std::filesystem::path& path) : file_(path) {
    // Checkpoints saved from task heads prefix encoder tensors ("bert.", "roberta.").
    constexpr std::string_view kAnchor = "embeddings.word_embeddings.weight";
    for (const auto& [name, info] : file_.tensors()) {
      if (name.size() >= kAnchor.size() && name.ends_with(kAnchor)) {
        prefix_ = name.substr(0, name.size() - kAnchor.size());
        return;
      }
    }
    throw Error(ErrorCode::kWeightsUnavailable,
                path.string() + " does not contain transformer embeddings");
  }

  bool has(const std::string& name) const { return file_.contains(prefix_ + name); }

  RowMatrixF matrix(const std::string& name, std::size_t rows, std::size_t cols) {
    check_shape(name, {static_cast<std::int64_t>(rows), static_cast<std::int64_t>(cols)});
    RowMatrixF m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    file_.read(prefix_ + name, std::span<float>(m.data(), static_cast<std::size_t>(m.size())));
    return m;
  }

  Eigen::RowVectorXf vector(const std::string& name, std::size_t size) {
    check_shape(name, {static_cast<std::int64_t>(size)});
    Eigen::RowVectorXf v(static_cast<Eigen::Index>(size));
    file_.read(prefix_ + name, std::span<float>(v.data(), static_cast<std::size_t>(v.size())));
    return v;
  }

  // LayerNorm parameters are named weight/bias or, in older exports, gamma/beta.
  std::pair<Eigen::RowVectorXf, Eigen::RowVectorXf> norm(const std::string& base,
                                                         std::size_t size) {
    if (has(base + ".weight"))
      return {vector(base + ".weight", size), vector(base + ".bias", size)};
    return {vector(base + ".gamma", size), vector(base + ".beta", size)};
  }

 private:
  void check_shape(const std::string& name, const std::vector<std::int64_t>& expected) {
    const auto& info = file_.info(prefix_ + name);
    if (info.shape != expected) {
      throw Error(ErrorCode::kBackendConfigMismatch,
                  "tensor " + prefix_ + name + " does not match config.json geometry");
    }
  }

  SafetensorsFile file_;
  std::string prefix_;
};

}  // namespace

TransformerEncoder TransformerEncoder::load(const std::filesystem::path& safetensors,
                                            const EncoderConfig& config) {
  TensorSource src(safetensors);
  TransformerEncoder enc;
  enc.config_ = config;
  const auto h = config.hidden_size;
  const auto ff = config.intermediate_size;

  enc.word_embeddings_ = src.matrix("embeddings.word_embeddings.weight", config.vocab_size, h);
  enc.position_embeddings_ =
      src.matrix("embeddings.position_embeddings.weight", config.max_positions, h);
  if (config.type_vocab_size > 0 && src.has("embeddings.token_type_embeddings.weight")) {
    enc.token_type_embeddings_ =
        src.matrix("embeddings.token_type_embeddings.weight", config.type_vocab_size, h);
  }
  auto [eg, eb] = src.norm("embeddings.LayerNorm", h);
  enc.embedding_norm_ = {std::move(eg), std::move(eb)};

  auto linear = [&](const std::string& base, std::size_t out, std::size_t in) {
    return Linear{src.matrix(base + ".weight", out, in), src.vector(base + ".bias", out)};
  };
  for (std::size_t i = 0; i < config.num_layers; ++i) {
    const std::string p = "encoder.layer." + std::to_string(i) + ".";
    Layer layer;
    layer.query = linear(p + "attention.self.query", h, h);
    layer.key = linear(p + "attention.self.key", h, h);
    layer.value = linear(p + "attention.self.value", h, h);
    layer.attention_out = linear(p + "attention.output.dense", h, h);
    auto [ag, ab] = src.norm(p + "attention.output.LayerNorm", h);
    layer.attention_norm = {std::move(ag), std::move(ab)};
    layer.intermediate = linear(p + "intermediate.dense", ff, h);
    layer.output = linear(p + "output.dense", h, ff);
    auto [og, ob] = src.norm(p + "output.LayerNorm", h);
    layer.output_norm = {std::move(og), std::move(ob)};
    enc.layers_.push_back(std::move(layer));
  }
  return enc;
}

std::size_t TransformerEncoder::max_sequence_length() const {
  if (config_.roberta_positions()) {
    const auto offset = static_cast<std::size_t>(config_.pad_token_id) + 1;
    return config_.max_positions > offset ? config_.max_positions - offset : 0;
  }
  return config_.max_positions;
}

RowMatrixF TransformerEncoder::apply_linear(const Linear& linear, const RowMatrixF& x) {
  RowMatrixF y = x * linear.weight.transpose();
  y.rowwise() += linear.bias;
  return y;
}

void TransformerEncoder::apply_norm(const LayerNorm& norm, RowMatrixF& x) const {
  const float eps = static_cast<float>(config_.layer_norm_eps);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    const float mean = row.mean();
    row.array() -= mean;
    const float var = row.squaredNorm() / static_cast<float>(row.size());
    row *= 1.0f / std::sqrt(var + eps);
    row = row.cwiseProduct(norm.gamma) + norm.beta;
  }
}

void TransformerEncoder::activate(RowMatrixF& x) const {
  if (config_.hidden_act == "relu") {
    x = x.cwiseMax(0.0f);
  } else if (config_.hidden_act == "gelu_new" || config_.hidden_act == "gelu_pytorch_tanh") {
    constexpr float kC = 0.7978845608028654f;  // sqrt(2/pi)
    x = x.unaryExpr(
        [](float v) { return 0.5f * v * (1.0f + std::tanh(kC * (v + 0.044715f * v * v * v))); });
  } else {
    x = x.unaryExpr([](float v) { return 0.5f * v * (1.0f + std::erf(v * 0.7071067811865476f)); });
  }
}

std::vector<RowMatrixF> TransformerEncoder::forward(
    const std::vector<std::vector<std::int32_t>>& batch) const {
  const auto h = static_cast<Eigen::Index>(config_.hidden_size);
  std::vector<Eigen::Index> offsets;
  Eigen::Index total = 0;
  for (const auto& ids : batch) {
    if (ids.empty() || ids.size() > max_sequence_length()) {
      throw Error(ErrorCode::kInvalidArgument, "sequence length outside encoder limits");
    }
    offsets.push_back(total);
    total += static_cast<Eigen::Index>(ids.size());
  }

  RowMatrixF x(total, h);
  for (std::size_t s = 0; s < batch.size(); ++s) {
    const auto& ids = batch[s];
    for (std::size_t t = 0; t < ids.size(); ++t) {
      const auto id = ids[t];
      if (id < 0 || static_cast<std::size_t>(id) >= config_.vocab_size) {
        throw Error(ErrorCode::kInvalidArgument, "token id out of vocabulary range");
      }
      const auto position =
          config_.roberta_positions()
              ? static_cast<Eigen::Index>(config_.pad_token_id) + 1 + static_cast<Eigen::Index>(t)
              : static_cast<Eigen::Index>(t);
      auto row = x.row(offsets[s] + static_cast<Eigen::Index>(t));
      row = word_embeddings_.row(id) + position_embeddings_.row(position);
      if (token_type_embeddings_.rows() > 0) row += token_type_embeddings_.row(0);
    }
  }
  apply_norm(embedding_norm_, x);

  const auto heads = static_cast<Eigen::Index>(config_.num_heads);
  const auto head_dim = h / heads;
  const float scale = 1.0f / std::sqrt(static_cast<float>(head_dim));
  for (const auto& layer : layers_) {
    const RowMatrixF q = apply_linear(layer.query, x);
    const RowMatrixF k = apply_linear(layer.key, x);
    const RowMatrixF v = apply_linear(layer.value, x);
    RowMatrixF context(total, h);
    for (std::size_t s = 0; s < batch.size(); ++s) {
      const auto off = offsets[s];
      const auto len = static_cast<Eigen::Index>(batch[s].size());
      for (Eigen::Index head = 0; head < heads; ++head) {
        const auto col = head * head_dim;
        RowMatrixF scores =
            q.block(off, col, len, head_dim) * k.block(off, col, len, head_dim).transpose();
        scores *= scale;
        for (Eigen::Index r = 0; r < len; ++r) {
          auto row = scores.row(r);
          row.array() -= row.maxCoeff();
          row = row.array().exp().matrix();
          row /= row.sum();
        }
        context.block(off, col, len, head_dim) = scores * v.block(off, col, len, head_dim);
      }
    }
    RowMatrixF attended = apply_linear(layer.attention_out, context);
    attended += x;
    apply_norm(layer.attention_norm, attended);

    RowMatrixF inner = apply_linear(layer.intermediate, attended);
    activate(inner);
    RowMatrixF out = apply_linear(layer.output, inner);
    out += attended;
    apply_norm(layer.output_norm, out);
    x = std::move(out);
  }

  std::vector<RowMatrixF> result;
  result.reserve(batch.size());
  for (std::size_t s = 0; s < batch.size(); ++s) {
    result.emplace_back(x.middleRows(offsets[s], static_cast<Eigen::Index>(batch[s].size())));
  }
  return result;
}

// ---------------------------------------------------------------------------

PretrainedBackend::PretrainedBackend(EmbeddingBackendConfig config,
                                     std::unique_ptr<SubwordTokenizer> tokenizer,
                                     TransformerEncoder encoder)
    : config_(std::move(config)), tokenizer_(std::move(tokenizer)), encoder_(std::move(encoder)) {}

TokenizedWord PretrainedBackend::pieces_for(std::string_view word, bool* substituted) const {
  const auto trimmed = trim(word);
  if (trimmed.empty()) throw Error(ErrorCode::kEmptyWord, "cannot embed an empty word");
  TokenizedWord tokens = tokenizer_->tokenize(trimmed);
  if (substituted != nullptr) *substituted = tokens.empty();
  if (tokens.empty()) {
    tokens.ids.push_back(tokenizer_->special().unk);
    tokens.pieces.push_back(tokenizer_->special().unk_piece);
  }
  const std::size_t limit = encoder_.max_sequence_length() - 2;
  if (tokens.ids.size() > limit) {
    tokens.ids.resize(limit);
    tokens.pieces.resize(limit);
  }
  return tokens;
}

WordEmbedding PretrainedBackend::embed_word(std::string_view word) const {
  const std::string one(word);
  return embed_words(std::span<const std::string>(&one, 1)).front();
}

std::vector<WordEmbedding> PretrainedBackend::embed_words(
    std::span<const std::string> words) const {
  std::vector<WordEmbedding> out(words.size());
  std::vector<std::vector<std::int32_t>> batch;
  batch.reserve(words.size());
  const auto& special = tokenizer_->special();
  for (std::size_t i = 0; i < words.size(); ++i) {
    bool substituted = false;
    auto tokens = pieces_for(words[i], &substituted);
    out[i].word = words[i];
    out[i].backend = config_.name;
    out[i].unknown_substituted = substituted;
    out[i].pieces = std::move(tokens.pieces);
    std::vector<std::int32_t> ids;
    ids.reserve(tokens.ids.size() + 2);
    ids.push_back(special.cls);
    ids.insert(ids.end(), tokens.ids.begin(), tokens.ids.end());
    ids.push_back(special.sep);
    batch.push_back(std::move(ids));
  }
  auto hidden = encoder_.forward(batch);
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto n = hidden[i].rows() - 2;
    out[i].vectors = hidden[i].middleRows(1, n);
    out[i].pooled = mean_pool(out[i].vectors);
  }
  return out;
}

std::unique_ptr<EmbeddingBackend> load_pretrained_backend(const EmbeddingBackendConfig& config,
                                                          const std::filesystem::path& dir) {
  const auto config_path = dir / "config.json";
  const auto weights_path = dir / "model.safetensors";
  if (!std::filesystem::exists(config_path) || !std::filesystem::exists(weights_path)) {
    throw Error(ErrorCode::kWeightsUnavailable,
                "'" + config.name + "' needs config.json and model.safetensors under " +
                    dir.string() + " (set --weights-cache or " + kWeightsCacheEnv + ")");
  }
  const auto encoder_config = EncoderConfig::from_file(config_path);
  if (encoder_config.hidden_size != config.hidden_size ||
      encoder_config.num_layers != config.transformer_blocks ||
      encoder_config.num_heads != config.attention_heads) {
    throw Error(ErrorCode::kBackendConfigMismatch,
                dir.string() + " does not have the geometry registered for '" + config.name + "'");
  }
  auto tokenizer = load_tokenizer(dir, config.casing == Casing::kUncased);
  auto encoder = TransformerEncoder::load(weights_path, encoder_config);
  return std::make_unique<PretrainedBackend>(config, std::move(tokenizer), std::move(encoder));
}

}  // namespace kanglid
