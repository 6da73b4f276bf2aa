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

#include <algorithm>
#include <fstream>
#include <map>

#include <gtest/gtest.h>

#include "kanglid/error.hpp"
#include "test_support.hpp"

namespace kanglid {
namespace {

using testing::TempDir;

std::filesystem::path write_file(const TempDir& dir, const std::string& name,
                                 const std::string& text) {
  const auto path = dir / name;
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

LabeledCorpus corpus_of(const std::vector<std::pair<std::string, Tag>>& rows) {
  LabeledCorpus c;
  for (const auto& [w, t] : rows) c.items.push_back({w, t});
  return c;
}

TEST(Corpus, SingleLine) {
  TempDir dir;
  const auto c = load_corpus(write_file(dir, "one.tsv", "ninna\tkn\n"));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.items[0].word, "ninna");
  EXPECT_EQ(c.items[0].tag, Tag::kKannada);
  EXPECT_EQ(c.provenance.line_numbers, std::vector<std::size_t>{1});
  EXPECT_EQ(c.provenance.format, CorpusFormat::kTsv);
}

TEST(Corpus, UnknownTagNamesLineAndText) {
  TempDir dir;
  const auto path = write_file(dir, "bad.tsv", "ninna\tkn\nhello\txyz\n");
  try {
    load_corpus(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownTag);
    const std::string msg = e.what();
    EXPECT_NE(msg.find(":2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("xyz"), std::string::npos) << msg;
  }
}

TEST(Corpus, MalformedLineReportsLineNumber) {
  TempDir dir;
  const auto path = write_file(dir, "bad.tsv", "a\tkn\n\nb\n");
  try {
    load_corpus(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedLine);
    EXPECT_NE(std::string(e.what()).find(":3"), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([&] { load_corpus(write_file(dir, "three.tsv", "a\tkn\textra\n")); }),
            ErrorCode::kMalformedLine);
  EXPECT_EQ(code_of([&] { load_corpus(write_file(dir, "noword.tsv", "\tkn\n")); }),
            ErrorCode::kMalformedLine);
}

TEST(Corpus, MissingAndEmptyFiles) {
  TempDir dir;
  EXPECT_EQ(code_of([&] { load_corpus(dir / "absent.tsv"); }), ErrorCode::kMissingFile);
  EXPECT_EQ(code_of([&] { load_corpus(write_file(dir, "empty.tsv", "\n\n")); }),
            ErrorCode::kEmptyCorpus);
}

TEST(Corpus, TagsAreCaseInsensitiveAndCrlfTolerated) {
  TempDir dir;
  const auto c =
      load_corpus(write_file(dir, "mixed.tsv", "\xEF\xBB\xBFguru\tKN\r\nBengaluru\tLocation\r\n"));
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.items[0].word, "guru");
  EXPECT_EQ(c.items[1].tag, Tag::kLocation);
}

TEST(Corpus, CsvWithHeaderAndQuotes) {
  TempDir dir;
  const auto c = load_corpus(write_file(
      dir, "data.csv", "word,tag\nninna,kn\n\"hi, there\",en\n\"say \"\"x\"\"\",other\n"));
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c.provenance.format, CorpusFormat::kCsv);
  EXPECT_EQ(c.items[1].word, "hi, there");
  EXPECT_EQ(c.items[2].word, "say \"x\"");
  EXPECT_EQ(c.provenance.line_numbers, (std::vector<std::size_t>{2, 3, 4}));
}

TEST(Corpus, DuplicatesAreKept) {
  TempDir dir;
  const auto c = load_corpus(write_file(dir, "dup.tsv", "a\tkn\na\tkn\n"));
  EXPECT_EQ(c.size(), 2u);
}

TEST(Corpus, WriteLoadRoundTrip) {
  TempDir dir;
  const auto c = corpus_of({{"ninna", Tag::kKannada}, {"Mysuru", Tag::kLocation}});
  write_corpus(dir / "out.tsv", c);
  EXPECT_EQ(load_corpus(dir / "out.tsv").items, c.items);
}

TEST(Corpus, LoadWordsIgnoresTagColumn) {
  TempDir dir;
  const auto words = load_words(write_file(dir, "w.tsv", "one\ntwo\tkn\n\nthree\tanything\n"));
  EXPECT_EQ(words.words, (std::vector<std::string>{"one", "two", "three"}));
  EXPECT_EQ(words.line_numbers, (std::vector<std::size_t>{1, 2, 4}));
  EXPECT_EQ(code_of([&] { load_words(write_file(dir, "e.tsv", "")); }), ErrorCode::kEmptyCorpus);
}

TEST(Corpus, UnstratifiedSplitSizes) {
  const auto c = testing::synthetic_corpus(100, 3);
  const auto s = split_corpus(c, 0.1, 7, false);
  EXPECT_EQ(s.train.size(), 90u);
  EXPECT_EQ(s.validation.size(), 10u);
}

TEST(Corpus, SplitIsDeterministicAndAPartition) {
  const auto c = testing::synthetic_corpus(100, 3);
  const auto a = split_corpus(c, 0.25, 11, true);
  const auto b = split_corpus(c, 0.25, 11, true);
  EXPECT_EQ(a.train.items, b.train.items);
  EXPECT_EQ(a.validation.items, b.validation.items);

  std::vector<std::string> all;
  for (const auto& it : a.train.items) all.push_back(it.word);
  for (const auto& it : a.validation.items) all.push_back(it.word);
  std::vector<std::string> original = c.words();
  std::sort(all.begin(), all.end());
  std::sort(original.begin(), original.end());
  EXPECT_EQ(all, original);

  const auto other_seed = split_corpus(c, 0.25, 12, true);
  EXPECT_NE(a.validation.items, other_seed.validation.items);
}

TEST(Corpus, StratifiedSplitOnePerTag) {
  LabeledCorpus c;
  for (Tag t : kAllTags) {
    for (int i = 0; i < 10; ++i)
      c.items.push_back({std::string(tag_name(t)) + std::to_string(i), t});
  }
  const auto s = split_corpus(c, 0.1, 5, true);
  std::map<Tag, int> per_tag;
  for (const auto& it : s.validation.items) ++per_tag[it.tag];
  ASSERT_EQ(per_tag.size(), kNumTags);
  for (const auto& [tag, n] : per_tag) EXPECT_EQ(n, 1) << tag_name(tag);
  EXPECT_EQ(s.train.size(), 54u);
}

TEST(Corpus, StratumTooSmall) {
  auto c = testing::synthetic_corpus(40, 1);
  c.items.push_back({"Mysuru", Tag::kLocation});
  EXPECT_EQ(code_of([&] { split_corpus(c, 0.1, 1, true); }), ErrorCode::kStratumTooSmall);
  EXPECT_EQ(code_of([&] { split_corpus(c, 1.5, 1, true); }), ErrorCode::kInvalidArgument);
}

TEST(Corpus, SplitKeepsSourceLineNumbers) {
  TempDir dir;
  std::string text;
  for (int i = 0; i < 20; ++i)
    text += "w" + std::to_string(i) + "\t" + (i % 2 ? "en" : "kn") + "\n";
  const auto c = load_corpus(write_file(dir, "lines.tsv", text));
  const auto s = split_corpus(c, 0.2, 3, true);
  ASSERT_EQ(s.validation.provenance.line_numbers.size(), s.validation.size());
  for (std::size_t i = 0; i < s.validation.size(); ++i) {
    const auto line = s.validation.provenance.line_numbers[i];
    EXPECT_EQ(s.validation.items[i], c.items[line - 1]);
  }
}

TEST(Corpus, DistributionOfToyCorpus) {
  const auto c = corpus_of(
      {{"a", Tag::kKannada}, {"b", Tag::kKannada}, {"c", Tag::kEnglish}, {"d", Tag::kOther}});
  const auto d = compute_distribution(c);
  EXPECT_EQ(d.total, 4u);
  EXPECT_DOUBLE_EQ(d.percentage(Tag::kKannada), 50.0);
  EXPECT_DOUBLE_EQ(d.percentage(Tag::kEnglish), 25.0);
  EXPECT_DOUBLE_EQ(d.percentage(Tag::kOther), 25.0);
  EXPECT_DOUBLE_EQ(d.percentage(Tag::kMixed), 0.0);
  EXPECT_DOUBLE_EQ(d.percentage(Tag::kName), 0.0);
  EXPECT_DOUBLE_EQ(d.percentage(Tag::kLocation), 0.0);
  EXPECT_EQ(code_of([] { compute_distribution(LabeledCorpus{}); }), ErrorCode::kEmptyCorpus);
}

TEST(Corpus, DistributionConservesCounts) {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    LabeledCorpus c;
    const auto n = 1 + rng.index(200);
    for (std::size_t i = 0; i < n; ++i) c.items.push_back({"w", kAllTags[rng.index(kNumTags)]});
    const auto d = compute_distribution(c);
    std::size_t sum = 0;
    double pct = 0;
    for (std::size_t t = 0; t < kNumTags; ++t) {
      sum += d.counts[t];
      pct += d.percentages[t];
    }
    EXPECT_EQ(sum, n);
    EXPECT_NEAR(pct, 100.0, 0.01);
  }
}

}  // namespace
}  // namespace kanglid
