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
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "kanglid/tags.hpp"

namespace kanglid {

enum class CorpusFormat { kTsv, kCsv };

// ".csv" selects CSV; anything else is read as TSV.
CorpusFormat format_for_path(const std::filesystem::path& path);
std::string_view format_name(CorpusFormat format);

struct LabeledToken {
  std::string word;
  Tag tag;

  friend bool operator==(const LabeledToken&, const LabeledToken&) = default;
};

struct Provenance {
  std::filesystem::path source;
  CorpusFormat format = CorpusFormat::kTsv;
  // 1-based source line of each item; empty for derived corpora.
  std::vector<std::size_t> line_numbers;
};

struct LabeledCorpus {
  std::vector<LabeledToken> items;
  Provenance provenance;

  std::size_t size() const { return items.size(); }
  bool empty() const { return items.empty(); }
  std::vector<std::string> words() const;
  std::vector<Tag> tags() const;
};

// Reads `word<TAB>tag` lines (or a two-column CSV with a header row). Blank
// lines are skipped; every other line must parse or the load fails with the
// offending line number.
LabeledCorpus load_corpus(const std::filesystem::path& path, CorpusFormat format);
LabeledCorpus load_corpus(const std::filesystem::path& path);

// Input for prediction: one word per line with an optional (ignored) tag
// column. Returns the words in file order.
struct WordList {
  std::vector<std::string> words;
  std::vector<std::size_t> line_numbers;
};
WordList load_words(const std::filesystem::path& path);

void write_corpus(const std::filesystem::path& path, const LabeledCorpus& corpus);

struct CorpusSplit {
  LabeledCorpus train;
  LabeledCorpus validation;
};

// Deterministic for a fixed seed. Items keep their original relative order in
// both halves.
CorpusSplit split_corpus(const LabeledCorpus& corpus, double val_fraction, std::uint64_t seed,
                         bool stratified);

struct DistributionStats {
  std::size_t total = 0;
  std::array<std::size_t, kNumTags> counts{};
  std::array<double, kNumTags> percentages{};

  std::size_t count(Tag tag) const { return counts[index_of(tag)]; }
  double percentage(Tag tag) const { return percentages[index_of(tag)]; }
};

DistributionStats compute_distribution(const LabeledCorpus& corpus);

}  // namespace kanglid
