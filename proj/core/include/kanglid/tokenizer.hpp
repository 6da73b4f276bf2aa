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
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace kanglid {

struct TokenizedWord {
  std::vector<std::string> pieces;
  std::vector<std::int32_t> ids;

  bool empty() const { return ids.empty(); }
};

struct SpecialTokens {
  std::int32_t cls = -1;  // sequence start ([CLS] / <s>)
  std::int32_t sep = -1;  // sequence end ([SEP] / </s>)
  std::int32_t pad = -1;
  std::int32_t unk = -1;
  std::string unk_piece;
};

// Splits one word into subword pieces (no special tokens).
class SubwordTokenizer {
 public:
  virtual ~SubwordTokenizer() = default;

  virtual TokenizedWord tokenize(std::string_view word) const = 0;
  const SpecialTokens& special() const { return special_; }
  void set_special(SpecialTokens special) { special_ = std::move(special); }

 protected:
  SpecialTokens special_;
};

struct BertNormalization {
  bool clean_text = true;
  bool handle_chinese_chars = true;
  bool strip_accents = true;
  bool lowercase = true;
};

class WordPieceTokenizer final : public SubwordTokenizer {
 public:
  WordPieceTokenizer(std::unordered_map<std::string, std::int32_t> vocab,
                     BertNormalization normalization, std::string unk_token = "[UNK]",
                     std::string continuing_prefix = "##", std::size_t max_chars_per_word = 100);

  TokenizedWord tokenize(std::string_view word) const override;

  std::string normalize(std::string_view text) const;
  std::vector<std::string> pre_tokenize(std::string_view normalized) const;

 private:
  std::unordered_map<std::string, std::int32_t> vocab_;
  BertNormalization normalization_;
  std::string unk_token_;
  std::string prefix_;
  std::size_t max_chars_;
};

// GPT-2 / RoBERTa byte-level BPE.
class ByteLevelBpeTokenizer final : public SubwordTokenizer {
 public:
  ByteLevelBpeTokenizer(std::unordered_map<std::string, std::int32_t> vocab,
                        std::vector<std::pair<std::string, std::string>> merges,
                        bool add_prefix_space);

  TokenizedWord tokenize(std::string_view word) const override;

  static std::vector<std::string> pre_tokenize(std::string_view text);
  std::vector<std::string> bpe(const std::string& mapped) const;

 private:
  std::unordered_map<std::string, std::int32_t> vocab_;
  std::map<std::pair<std::string, std::string>, std::size_t> merge_rank_;
  bool add_prefix_space_;
};

// Sentencepiece-style unigram model with a Metaspace ("▁") pre-tokenizer.
class UnigramTokenizer final : public SubwordTokenizer {
 public:
  UnigramTokenizer(std::vector<std::pair<std::string, double>> pieces, std::int32_t unk_id,
                   bool add_prefix_space = true, bool fuse_unk = true);

  TokenizedWord tokenize(std::string_view word) const override;

 private:
  TokenizedWord viterbi(const std::u32string& text) const;

  std::vector<std::pair<std::string, double>> pieces_;
  std::unordered_map<std::u32string, std::int32_t> lookup_;
  std::int32_t unk_id_;
  double unk_score_;
  std::size_t max_piece_chars_ = 1;
  bool add_prefix_space_;
  bool fuse_unk_;
};

// Loads tokenizer.json when present, otherwise a BERT vocab.txt. The
// `lowercase` flag applies only to the vocab.txt fallback.
std::unique_ptr<SubwordTokenizer> load_tokenizer(const std::filesystem::path& dir, bool lowercase);

}  // namespace kanglid
