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

#include "kanglid/tokenizer.hpp"

#include <array>
#include <fstream>
#include <limits>
#include <optional>

#include <nlohmann/json.hpp>

#include "kanglid/error.hpp"
#include "kanglid/text.hpp"

namespace kanglid {

using nlohmann::json;

// ---------------------------------------------------------------------------
// WordPiece

WordPieceTokenizer::WordPieceTokenizer(std::unordered_map<std::string, std::int32_t> vocab,
                                       BertNormalization normalization, std::string unk_token,
                                       std::string continuing_prefix,
                                       std::size_t max_chars_per_word)
    : vocab_(std::move(vocab)),
      normalization_(normalization),
      unk_token_(std::move(unk_token)),
      prefix_(std::move(continuing_prefix)),
      max_chars_(max_chars_per_word) {
  auto find = [&](const char* token) {
    auto it = vocab_.find(token);
    return it == vocab_.end() ? -1 : it->second;
  };
  special_.cls = find("[CLS]");
  special_.sep = find("[SEP]");
  special_.pad = find("[PAD]");
  special_.unk = find(unk_token_.c_str());
  special_.unk_piece = unk_token_;
}

std::string WordPieceTokenizer::normalize(std::string_view text) const {
  std::string out;
  for (char32_t cp : utf8_decode(text)) {
    if (normalization_.clean_text) {
      if (cp == 0 || cp == 0xFFFD || is_control(cp)) continue;
      if (is_whitespace(cp)) cp = U' ';
    }
    if (normalization_.handle_chinese_chars && is_cjk(cp)) {
      out.push_back(' ');
      utf8_append(out, cp);
      out.push_back(' ');
      continue;
    }
    if (normalization_.strip_accents) {
      if (is_combining_mark(cp)) continue;
      cp = strip_accent(cp);
    }
    if (normalization_.lowercase) cp = to_lower(cp);
    utf8_append(out, cp);
  }
  return out;
}

std::vector<std::string> WordPieceTokenizer::pre_tokenize(std::string_view normalized) const {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) tokens.push_back(std::move(current));
    current.clear();
  };
  for (char32_t cp : utf8_decode(normalized)) {
    if (is_whitespace(cp)) {
      flush();
    } else if (is_punctuation(cp)) {
      flush();
      utf8_append(current, cp);
      flush();
    } else {
      utf8_append(current, cp);
    }
  }
  flush();
  return tokens;
}

TokenizedWord WordPieceTokenizer::tokenize(std::string_view word) const {
  TokenizedWord out;
  auto emit_unk = [&] {
    out.pieces.push_back(unk_token_);
    out.ids.push_back(special_.unk);
  };
  for (const auto& token : pre_tokenize(normalize(word))) {
    const std::u32string chars = utf8_decode(token);
    if (chars.size() > max_chars_) {
      emit_unk();
      continue;
    }
    TokenizedWord sub;
    std::size_t start = 0;
    bool bad = false;
    while (start < chars.size()) {
      std::size_t end = chars.size();
      std::optional<std::pair<std::string, std::int32_t>> match;
      while (start < end) {
        std::string candidate = utf8_encode(std::u32string_view(chars).substr(start, end - start));
        if (start > 0) candidate = prefix_ + candidate;
        if (auto it = vocab_.find(candidate); it != vocab_.end()) {
          match.emplace(std::move(candidate), it->second);
          break;
        }
        --end;
      }
      if (!match) {
        bad = true;
        break;
      }
      sub.pieces.push_back(std::move(match->first));
      sub.ids.push_back(match->second);
      start = end;
    }
    if (bad) {
      emit_unk();
    } else {
      out.pieces.insert(out.pieces.end(), sub.pieces.begin(), sub.pieces.end());
      out.ids.insert(out.ids.end(), sub.ids.begin(), sub.ids.end());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Byte-level BPE

namespace {

const std::array<char32_t, 256>& byte_to_unicode() {
  static const std::array<char32_t, 256> table = [] {
    std::array<char32_t, 256> t{};
    std::array<bool, 256> direct{};
    auto mark = [&](int lo, int hi) {
      for (int b = lo; b <= hi; ++b) direct[static_cast<std::size_t>(b)] = true;
    };
    mark('!', '~');
    mark(0xA1, 0xAC);
    mark(0xAE, 0xFF);
    char32_t next = 256;
    for (std::size_t b = 0; b < 256; ++b) {
      t[b] = direct[b] ? static_cast<char32_t>(b) : next++;
    }
    return t;
  }();
  return table;
}

enum class CharClass { kLetter, kNumber, kSpace, kOther };

CharClass classify(char32_t cp) {
  if (is_whitespace(cp)) return CharClass::kSpace;
  if (is_number(cp)) return CharClass::kNumber;
  if (is_letter(cp)) return CharClass::kLetter;
  return CharClass::kOther;
}

}  // namespace

ByteLevelBpeTokenizer::ByteLevelBpeTokenizer(
    std::unordered_map<std::string, std::int32_t> vocab,
    std::vector<std::pair<std::string, std::string>> merges, bool add_prefix_space)
    : vocab_(std::move(vocab)), add_prefix_space_(add_prefix_space) {
  for (std::size_t rank = 0; rank < merges.size(); ++rank) {
    merge_rank_.emplace(std::move(merges[rank]), rank);
  }
  auto find = [&](const char* token) {
    auto it = vocab_.find(token);
    return it == vocab_.end() ? -1 : it->second;
  };
  special_.cls = find("<s>");
  special_.sep = find("</s>");
  special_.pad = find("<pad>");
  special_.unk = find("<unk>");
  special_.unk_piece = "<unk>";
}

// Mirrors the GPT-2 pattern
//   's|'t|'re|'ve|'m|'ll|'d| ?\p{L}+| ?\p{N}+| ?[^\s\p{L}\p{N}]+|\s+(?!\S)|\s+
std::vector<std::string> ByteLevelBpeTokenizer::pre_tokenize(std::string_view text) {
  static const std::array<std::u32string_view, 7> kContractions = {U"s", U"t",  U"re", U"ve",
                                                                   U"m", U"ll", U"d"};
  const std::u32string chars = utf8_decode(text);
  const std::size_t n = chars.size();
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < n) {
    if (chars[i] == U'\'') {
      bool matched = false;
      for (auto suffix : kContractions) {
        if (std::u32string_view(chars).substr(i + 1, suffix.size()) == suffix) {
          out.push_back(utf8_encode(std::u32string_view(chars).substr(i, suffix.size() + 1)));
          i += suffix.size() + 1;
          matched = true;
          break;
        }
      }
      if (matched) continue;
    }
    std::size_t j = i;
    if (chars[j] == U' ' && j + 1 < n && classify(chars[j + 1]) != CharClass::kSpace) ++j;
    const CharClass cls = classify(chars[j]);
    std::size_t k = j;
    if (cls == CharClass::kSpace) {
      while (k < n && classify(chars[k]) == CharClass::kSpace) ++k;
      // Leave the last space to prefix the following word.
      if (k < n && k - i > 1) --k;
    } else {
      while (k < n && classify(chars[k]) == cls) ++k;
    }
    out.push_back(utf8_encode(std::u32string_view(chars).substr(i, k - i)));
    i = k;
  }
  return out;
}

std::vector<std::string> ByteLevelBpeTokenizer::bpe(const std::string& mapped) const {
  std::vector<std::string> symbols;
  for (char32_t cp : utf8_decode(mapped)) {
    std::string s;
    utf8_append(s, cp);
    symbols.push_back(std::move(s));
  }
  while (symbols.size() > 1) {
    std::size_t best_rank = std::numeric_limits<std::size_t>::max();
    const std::pair<std::string, std::string>* best = nullptr;
    for (std::size_t i = 0; i + 1 < symbols.size(); ++i) {
      auto it = merge_rank_.find({symbols[i], symbols[i + 1]});
      if (it != merge_rank_.end() && it->second < best_rank) {
        best_rank = it->second;
        best = &it->first;
      }
    }
    if (best == nullptr) break;
    std::vector<std::string> merged;
    merged.reserve(symbols.size());
    for (std::size_t i = 0; i < symbols.size();) {
      if (i + 1 < symbols.size() && symbols[i] == best->first && symbols[i + 1] == best->second) {
        merged.push_back(symbols[i] + symbols[i + 1]);
        i += 2;
      } else {
        merged.push_back(symbols[i]);
        ++i;
      }
    }
    symbols = std::move(merged);
  }
  return symbols;
}

TokenizedWord ByteLevelBpeTokenizer::tokenize(std::string_view word) const {
  std::string text(word);
  if (add_prefix_space_ && !text.empty() && text.front() != ' ') text.insert(text.begin(), ' ');
  const auto& table = byte_to_unicode();
  TokenizedWord out;
  for (const auto& chunk : pre_tokenize(text)) {
    std::string mapped;
    for (unsigned char b : chunk) utf8_append(mapped, table[b]);
    for (auto& piece : bpe(mapped)) {
      auto it = vocab_.find(piece);
      if (it != vocab_.end()) {
        out.ids.push_back(it->second);
        out.pieces.push_back(std::move(piece));
      } else if (special_.unk >= 0) {
        out.ids.push_back(special_.unk);
        out.pieces.push_back(special_.unk_piece);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Unigram

namespace {
constexpr char32_t kMetaspace = U'▁';
constexpr double kUnkPenalty = 10.0;
}  // namespace

UnigramTokenizer::UnigramTokenizer(std::vector<std::pair<std::string, double>> pieces,
                                   std::int32_t unk_id, bool add_prefix_space, bool fuse_unk)
    : pieces_(std::move(pieces)),
      unk_id_(unk_id),
      add_prefix_space_(add_prefix_space),
      fuse_unk_(fuse_unk) {
  if (unk_id_ < 0 || static_cast<std::size_t>(unk_id_) >= pieces_.size()) {
    throw Error(ErrorCode::kWeightsUnavailable, "unigram vocabulary lacks a valid unk id");
  }
  double min_score = std::numeric_limits<double>::max();
  for (std::size_t id = 0; id < pieces_.size(); ++id) {
    const auto chars = utf8_decode(pieces_[id].first);
    lookup_.emplace(chars, static_cast<std::int32_t>(id));
    max_piece_chars_ = std::max(max_piece_chars_, chars.size());
    min_score = std::min(min_score, pieces_[id].second);
  }
  unk_score_ = min_score - kUnkPenalty;
  auto find = [&](const char* token) {
    auto it = lookup_.find(utf8_decode(token));
    return it == lookup_.end() ? -1 : it->second;
  };
  special_.cls = find("<s>");
  special_.sep = find("</s>");
  special_.pad = find("<pad>");
  special_.unk = unk_id_;
  special_.unk_piece = pieces_[static_cast<std::size_t>(unk_id_)].first;
}

TokenizedWord UnigramTokenizer::viterbi(const std::u32string& text) const {
  const std::size_t n = text.size();
  constexpr double kNone = -std::numeric_limits<double>::infinity();
  std::vector<double> best(n + 1, kNone);
  std::vector<std::size_t> back_start(n + 1, 0);
  std::vector<std::int32_t> back_id(n + 1, -1);
  best[0] = 0.0;
  for (std::size_t start = 0; start < n; ++start) {
    if (best[start] == kNone) continue;
    bool has_single = false;
    const std::size_t longest = std::min(max_piece_chars_, n - start);
    for (std::size_t len = 1; len <= longest; ++len) {
      auto it = lookup_.find(text.substr(start, len));
      if (it == lookup_.end() || it->second == unk_id_) continue;
      if (len == 1) has_single = true;
      const double score = best[start] + pieces_[static_cast<std::size_t>(it->second)].second;
      if (score > best[start + len]) {
        best[start + len] = score;
        back_start[start + len] = start;
        back_id[start + len] = it->second;
      }
    }
    if (!has_single) {
      const double score = best[start] + unk_score_;
      if (score > best[start + 1]) {
        best[start + 1] = score;
        back_start[start + 1] = start;
        back_id[start + 1] = unk_id_;
      }
    }
  }
  std::vector<std::pair<std::size_t, std::int32_t>> path;  // (start, id)
  for (std::size_t end = n; end > 0; end = back_start[end]) {
    path.emplace_back(back_start[end], back_id[end]);
  }
  TokenizedWord out;
  for (auto it = path.rbegin(); it != path.rend(); ++it) {
    const auto id = it->second;
    if (fuse_unk_ && id == unk_id_ && !out.ids.empty() && out.ids.back() == unk_id_) continue;
    out.ids.push_back(id);
    out.pieces.push_back(pieces_[static_cast<std::size_t>(id)].first);
  }
  return out;
}

TokenizedWord UnigramTokenizer::tokenize(std::string_view word) const {
  TokenizedWord out;
  std::u32string current;
  auto flush = [&] {
    if (current.empty()) return;
    auto part = viterbi(current);
    out.pieces.insert(out.pieces.end(), part.pieces.begin(), part.pieces.end());
    out.ids.insert(out.ids.end(), part.ids.begin(), part.ids.end());
    current.clear();
  };
  // Whitespace splits words; each word gets the metaspace prefix.
  bool first = true;
  for (char32_t cp : utf8_decode(word)) {
    if (is_whitespace(cp)) {
      flush();
      first = false;
      current.push_back(kMetaspace);
      continue;
    }
    if (current.empty() && first && add_prefix_space_) current.push_back(kMetaspace);
    first = false;
    current.push_back(cp);
  }
  flush();
  return out;
}

// ---------------------------------------------------------------------------
// Loading

namespace {

const json* find_typed(const json& node, std::string_view type) {
  if (!node.is_object()) return nullptr;
  if (node.contains("type") && node["type"] == type) return &node;
  for (const char* key : {"pretokenizers", "processors", "normalizers"}) {
    if (node.contains(key) && node[key].is_array()) {
      for (const auto& child : node[key]) {
        if (const json* hit = find_typed(child, type)) return hit;
      }
    }
  }
  return nullptr;
}

std::unordered_map<std::string, std::int32_t> read_vocab_txt(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kWeightsUnavailable, "cannot read " + path.string());
  std::unordered_map<std::string, std::int32_t> vocab;
  std::string line;
  std::int32_t id = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    vocab.emplace(line, id++);
  }
  return vocab;
}

// Sequence delimiters named by the post-processor, when it names them.
void apply_post_processor(const json& doc, SpecialTokens& special) {
  if (!doc.contains("post_processor") || doc["post_processor"].is_null()) return;
  const json& pp = doc["post_processor"];
  for (const char* type : {"RobertaProcessing", "BertProcessing"}) {
    if (const json* p = find_typed(pp, type)) {
      special.cls = (*p)["cls"][1].get<std::int32_t>();
      special.sep = (*p)["sep"][1].get<std::int32_t>();
      return;
    }
  }
  if (const json* p = find_typed(pp, "TemplateProcessing")) {
    const auto& single = (*p)["single"];
    const auto& tokens = (*p)["special_tokens"];
    auto id_of = [&](const json& entry) -> std::optional<std::int32_t> {
      if (!entry.contains("SpecialToken")) return std::nullopt;
      const auto name = entry["SpecialToken"]["id"].get<std::string>();
      if (!tokens.contains(name)) return std::nullopt;
      return tokens[name]["ids"][0].get<std::int32_t>();
    };
    if (!single.empty()) {
      if (auto id = id_of(single.front())) special.cls = *id;
      if (auto id = id_of(single.back())) special.sep = *id;
    }
  }
}

std::unique_ptr<SubwordTokenizer> tokenizer_from_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kWeightsUnavailable, "cannot read " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kWeightsUnavailable, path.string() + ": " + e.what());
  }
  const json& model = doc.at("model");
  const std::string type = model.value("type", "");
  const json null_node;
  const json& pre = doc.contains("pre_tokenizer") ? doc["pre_tokenizer"] : null_node;

  std::unique_ptr<SubwordTokenizer> tokenizer;
  if (type == "WordPiece") {
    BertNormalization norm{false, false, false, false};
    if (doc.contains("normalizer") && !doc["normalizer"].is_null()) {
      if (const json* n = find_typed(doc["normalizer"], "BertNormalizer")) {
        norm.clean_text = n->value("clean_text", true);
        norm.handle_chinese_chars = n->value("handle_chinese_chars", true);
        norm.lowercase = n->value("lowercase", true);
        const auto& strip = (*n)["strip_accents"];
        norm.strip_accents = strip.is_null() ? norm.lowercase : strip.get<bool>();
      }
    }
    auto vocab = model.at("vocab").get<std::unordered_map<std::string, std::int32_t>>();
    tokenizer = std::make_unique<WordPieceTokenizer>(
        std::move(vocab), norm, model.value("unk_token", "[UNK]"),
        model.value("continuing_subword_prefix", "##"),
        model.value("max_input_chars_per_word", std::size_t{100}));
  } else if (type == "BPE") {
    auto vocab = model.at("vocab").get<std::unordered_map<std::string, std::int32_t>>();
    std::vector<std::pair<std::string, std::string>> merges;
    for (const auto& m : model.at("merges")) {
      if (m.is_array()) {
        merges.emplace_back(m[0].get<std::string>(), m[1].get<std::string>());
      } else {
        const auto s = m.get<std::string>();
        const auto space = s.find(' ');
        if (space == std::string::npos) continue;
        merges.emplace_back(s.substr(0, space), s.substr(space + 1));
      }
    }
    bool prefix = false;
    if (const json* bl = find_typed(pre, "ByteLevel"))
      prefix = bl->value("add_prefix_space", false);
    tokenizer =
        std::make_unique<ByteLevelBpeTokenizer>(std::move(vocab), std::move(merges), prefix);
  } else if (type == "Unigram") {
    std::vector<std::pair<std::string, double>> pieces;
    for (const auto& entry : model.at("vocab")) {
      pieces.emplace_back(entry[0].get<std::string>(), entry[1].get<double>());
    }
    bool prefix = true;
    if (const json* ms = find_typed(pre, "Metaspace")) {
      if (ms->contains("prepend_scheme")) {
        prefix = (*ms)["prepend_scheme"].get<std::string>() != "never";
      } else {
        prefix = ms->value("add_prefix_space", true);
      }
    }
    const auto unk_id = model.value("unk_id", std::int32_t{-1});
    tokenizer = std::make_unique<UnigramTokenizer>(std::move(pieces), unk_id, prefix);
  } else {
    throw Error(ErrorCode::kWeightsUnavailable,
                path.string() + ": unsupported tokenizer model '" + type + "'");
  }

  // Patch up specials from added_tokens and the post-processor.
  SpecialTokens special = tokenizer->special();
  if (doc.contains("added_tokens")) {
    for (const auto& added : doc["added_tokens"]) {
      const auto content = added.value("content", "");
      const auto id = added.value("id", std::int32_t{-1});
      if (content == "[CLS]" || content == "<s>") special.cls = special.cls < 0 ? id : special.cls;
      if (content == "[SEP]" || content == "</s>") special.sep = special.sep < 0 ? id : special.sep;
      if (content == "[PAD]" || content == "<pad>")
        special.pad = special.pad < 0 ? id : special.pad;
      if (content == "[UNK]" || content == "<unk>") {
        if (special.unk < 0) {
          special.unk = id;
          special.unk_piece = content;
        }
      }
    }
  }
  apply_post_processor(doc, special);

  tokenizer->set_special(std::move(special));
  return tokenizer;
}

}  // namespace

std::unique_ptr<SubwordTokenizer> load_tokenizer(const std::filesystem::path& dir, bool lowercase) {
  std::unique_ptr<SubwordTokenizer> tokenizer;
  if (std::filesystem::exists(dir / "tokenizer.json")) {
    tokenizer = tokenizer_from_json(dir / "tokenizer.json");
  } else if (std::filesystem::exists(dir / "vocab.txt")) {
    BertNormalization norm;
    norm.lowercase = lowercase;
    norm.strip_accents = lowercase;
    tokenizer = std::make_unique<WordPieceTokenizer>(read_vocab_txt(dir / "vocab.txt"), norm);
  } else {
    throw Error(ErrorCode::kWeightsUnavailable,
                "no tokenizer.json or vocab.txt under " + dir.string());
  }
  const auto& s = tokenizer->special();
  if (s.cls < 0 || s.sep < 0 || s.unk < 0) {
    throw Error(ErrorCode::kWeightsUnavailable,
                dir.string() + ": tokenizer is missing sequence or unknown special tokens");
  }
  return tokenizer;
}

}  // namespace kanglid
