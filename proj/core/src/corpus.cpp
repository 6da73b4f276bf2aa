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

#include "kanglid/corpus.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>

#include "kanglid/error.hpp"
#include "kanglid/random.hpp"
#include "kanglid/text.hpp"

namespace kanglid {

namespace {

std::ifstream open_input(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw Error(ErrorCode::kMissingFile, path.string());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, path.string());
  return in;
}

std::string where(const std::filesystem::path& path, std::size_t line_no) {
  return path.string() + ":" + std::to_string(line_no);
}

// One CSV record on a single physical line, RFC 4180 quoting.
std::optional<std::vector<std::string>> parse_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  bool field_was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          fields.back().push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        fields.back().push_back(c);
      }
    } else if (c == '"') {
      if (!fields.back().empty() || field_was_quoted) return std::nullopt;
      quoted = true;
      field_was_quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
      field_was_quoted = false;
    } else {
      fields.back().push_back(c);
    }
  }
  if (quoted) return std::nullopt;
  return fields;
}

std::vector<std::string> split_fields(std::string_view line, CorpusFormat format, bool& ok) {
  ok = true;
  if (format == CorpusFormat::kCsv) {
    auto fields = parse_csv_line(line);
    if (!fields) {
      ok = false;
      return {};
    }
    return *fields;
  }
  std::vector<std::string> fields;
  for (auto part : split(line, '\t')) fields.emplace_back(part);
  return fields;
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

void strip_bom(std::string& line) {
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
}

}  // namespace

CorpusFormat format_for_path(const std::filesystem::path& path) {
  return ascii_lower(path.extension().string()) == ".csv" ? CorpusFormat::kCsv : CorpusFormat::kTsv;
}

std::string_view format_name(CorpusFormat format) {
  return format == CorpusFormat::kCsv ? "csv" : "tsv";
}

std::vector<std::string> LabeledCorpus::words() const {
  std::vector<std::string> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(item.word);
  return out;
}

std::vector<Tag> LabeledCorpus::tags() const {
  std::vector<Tag> out;
  out.reserve(items.size());
  for (const auto& item : items) out.push_back(item.tag);
  return out;
}

LabeledCorpus load_corpus(const std::filesystem::path& path) {
  return load_corpus(path, format_for_path(path));
}

LabeledCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  auto in = open_input(path);
  LabeledCorpus corpus;
  corpus.provenance.source = path;
  corpus.provenance.format = format;

  std::string line;
  std::size_t line_no = 0;
  bool header_pending = format == CorpusFormat::kCsv;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line_no == 1) strip_bom(line);
    if (is_blank(line)) continue;

    bool ok = true;
    auto fields = split_fields(line, format, ok);
    if (!ok || fields.size() != 2) {
      throw Error(ErrorCode::kMalformedLine,
                  where(path, line_no) + ": expected two columns (word, tag)");
    }
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto word = trim(fields[0]);
    const auto tag_text = trim(fields[1]);
    if (word.empty() || tag_text.empty()) {
      throw Error(ErrorCode::kMalformedLine, where(path, line_no) + ": empty word or tag");
    }
    if (word.find_first_of("\t\n\r") != std::string_view::npos) {
      throw Error(ErrorCode::kMalformedLine, where(path, line_no) + ": word contains a tab");
    }
    const auto tag = parse_tag(tag_text);
    if (!tag) {
      throw Error(ErrorCode::kUnknownTag,
                  where(path, line_no) + ": unknown tag '" + std::string(tag_text) + "'");
    }
    corpus.items.push_back({std::string(word), *tag});
    corpus.provenance.line_numbers.push_back(line_no);
  }
  if (corpus.items.empty()) throw Error(ErrorCode::kEmptyCorpus, path.string());
  return corpus;
}

WordList load_words(const std::filesystem::path& path) {
  auto in = open_input(path);
  WordList list;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    strip_cr(line);
    if (line_no == 1) strip_bom(line);
    if (is_blank(line)) continue;
    const auto fields = split(line, '\t');
    if (fields.size() > 2) {
      throw Error(ErrorCode::kMalformedLine,
                  where(path, line_no) + ": expected a word and an optional tag");
    }
    list.words.emplace_back(trim(fields[0]));
    list.line_numbers.push_back(line_no);
  }
  if (list.words.empty()) throw Error(ErrorCode::kEmptyCorpus, path.string());
  return list;
}

void write_corpus(const std::filesystem::path& path, const LabeledCorpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  for (const auto& item : corpus.items) {
    out << item.word << '\t' << tag_name(item.tag) << '\n';
  }
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

CorpusSplit split_corpus(const LabeledCorpus& corpus, double val_fraction, std::uint64_t seed,
                         bool stratified) {
  if (!(val_fraction > 0.0 && val_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "val_fraction must lie in (0, 1)");
  }
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "cannot split an empty corpus");

  std::vector<bool> in_validation(corpus.size(), false);
  Rng rng(seed);

  auto pick = [&](std::vector<std::size_t>& pool, std::size_t take) {
    rng.shuffle(std::span<std::size_t>(pool));
    for (std::size_t i = 0; i < take; ++i) in_validation[pool[i]] = true;
  };

  if (stratified) {
    for (Tag tag : kAllTags) {
      std::vector<std::size_t> pool;
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (corpus.items[i].tag == tag) pool.push_back(i);
      }
      if (pool.empty()) continue;
      const auto take =
          static_cast<std::size_t>(std::lround(static_cast<double>(pool.size()) * val_fraction));
      if (take == 0) {
        throw Error(ErrorCode::kStratumTooSmall,
                    "tag '" + std::string(tag_name(tag)) + "' has " + std::to_string(pool.size()) +
                        " item(s); no validation item at fraction " + std::to_string(val_fraction));
      }
      pick(pool, take);
    }
  } else {
    std::vector<std::size_t> pool(corpus.size());
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    const auto take =
        static_cast<std::size_t>(std::lround(static_cast<double>(pool.size()) * val_fraction));
    if (take == 0 || take == pool.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "corpus of " + std::to_string(corpus.size()) +
                      " items cannot be split into two non-empty parts");
    }
    pick(pool, take);
  }

  CorpusSplit out;
  for (auto* part : {&out.train, &out.validation}) {
    part->provenance.source = corpus.provenance.source;
    part->provenance.format = corpus.provenance.format;
  }
  const bool has_lines = corpus.provenance.line_numbers.size() == corpus.size();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto& part = in_validation[i] ? out.validation : out.train;
    part.items.push_back(corpus.items[i]);
    if (has_lines) part.provenance.line_numbers.push_back(corpus.provenance.line_numbers[i]);
  }
  return out;
}

DistributionStats compute_distribution(const LabeledCorpus& corpus) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyCorpus, "no tokens to summarise");
  DistributionStats stats;
  stats.total = corpus.size();
  for (const auto& item : corpus.items) ++stats.counts[index_of(item.tag)];
  for (std::size_t i = 0; i < kNumTags; ++i) {
    stats.percentages[i] =
        100.0 * static_cast<double>(stats.counts[i]) / static_cast<double>(stats.total);
  }
  return stats;
}

}  // namespace kanglid
