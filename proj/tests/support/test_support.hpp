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
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "kanglid/corpus.hpp"
#include "kanglid/embedding.hpp"
#include "kanglid/random.hpp"
#include "kanglid/tags.hpp"

namespace kanglid::testing {

inline std::filesystem::path data_dir() { return KANGLID_TEST_DATA_DIR; }
inline std::filesystem::path encoder_fixture(const std::string& name) {
  return data_dir() / "encoders" / name;
}

// Geometry of the tiny fixture encoders.
inline EmbeddingBackendConfig tiny_config(const std::string& name, Casing casing) {
  return {name, BackendKind::kPretrainedTransformer, 32, 2, 4, 0, casing};
}

class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    const auto stamp = mix64(
        static_cast<std::uint64_t>(std::chrono::steady_clock::now().time_since_epoch().count()) +
        ++counter);
    path_ = std::filesystem::temp_directory_path() / ("kanglid-test-" + std::to_string(stamp));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Two tags drawn from disjoint three-letter alphabets. Small alphabets keep
// the trigram inventory small enough that held-out words reuse trigrams seen
// in training. Words are unique and the tags alternate.
inline LabeledCorpus synthetic_corpus(std::size_t n, std::uint64_t seed, Tag first = Tag::kKannada,
                                      Tag second = Tag::kEnglish) {
  constexpr std::string_view kAlphabets[2] = {"aei", "xyz"};
  Rng rng(seed);
  std::set<std::string> seen;
  LabeledCorpus corpus;
  while (corpus.size() < n) {
    const std::size_t cls = corpus.size() % 2;
    const std::size_t length = 3 + rng.index(6);
    std::string word;
    for (std::size_t i = 0; i < length; ++i) word.push_back(kAlphabets[cls][rng.index(3)]);
    if (!seen.insert(word).second) continue;
    corpus.items.push_back({word, cls == 0 ? first : second});
  }
  return corpus;
}

// Nearest-centroid check over the bag of subword pieces each word embeds
// into (cosine similarity). Mean-pooled 64-dim hash vectors are too noisy for
// a linear centroid, but the pieces are what the backend hashes.
inline double nearest_centroid_accuracy(const EmbeddingBackend& backend, const LabeledCorpus& train,
                                        const LabeledCorpus& val) {
  using Bag = std::map<std::string, double>;
  auto bag_of = [&](const std::string& word) {
    Bag bag;
    for (const auto& piece : backend.embed_word(word).pieces) bag[piece] += 1.0;
    return bag;
  };
  auto norm = [](const Bag& bag) {
    double sq = 0.0;
    for (const auto& [_, v] : bag) sq += v * v;
    return std::sqrt(sq);
  };
  std::array<Bag, kNumTags> centroids;
  for (const auto& item : train.items) {
    for (const auto& [piece, v] : bag_of(item.word)) centroids[index_of(item.tag)][piece] += v;
  }
  std::size_t correct = 0;
  for (const auto& item : val.items) {
    const Bag bag = bag_of(item.word);
    double best = -1.0;
    std::size_t best_tag = 0;
    for (std::size_t t = 0; t < kNumTags; ++t) {
      const double cn = norm(centroids[t]);
      if (cn == 0.0) continue;
      double dot = 0.0;
      for (const auto& [piece, v] : bag) {
        const auto it = centroids[t].find(piece);
        if (it != centroids[t].end()) dot += v * it->second;
      }
      const double sim = dot / (cn * norm(bag));
      if (sim > best) {
        best = sim;
        best_tag = t;
      }
    }
    if (best_tag == index_of(item.tag)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(val.size());
}

// Scores computed straight from (gold, predicted) pairs, with no confusion
// matrix in between.
struct OracleScores {
  std::array<double, kNumTags> precision{}, recall{}, f1{};
  std::array<std::size_t, kNumTags> support{};
  double weighted_p = 0, weighted_r = 0, weighted_f1 = 0;
  double macro_p = 0, macro_r = 0, macro_f1 = 0;
};

inline OracleScores brute_force_scores(const std::vector<Tag>& gold, const std::vector<Tag>& pred,
                                       bool all_six) {
  OracleScores s;
  for (std::size_t t = 0; t < kNumTags; ++t) {
    const Tag tag = kAllTags[t];
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) {
      const bool g = gold[i] == tag;
      const bool p = pred[i] == tag;
      if (g && p) ++tp;
      if (!g && p) ++fp;
      if (g && !p) ++fn;
    }
    s.support[t] = tp + fn;
    s.precision[t] = tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp);
    s.recall[t] = tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn);
    const double pr = s.precision[t] + s.recall[t];
    s.f1[t] = pr == 0.0 ? 0.0 : 2.0 * s.precision[t] * s.recall[t] / pr;
  }
  double n = 0;
  std::size_t labels = 0;
  for (std::size_t t = 0; t < kNumTags; ++t) {
    if (!all_six && s.support[t] == 0) continue;
    ++labels;
    const double w = double(s.support[t]);
    n += w;
    s.weighted_p += w * s.precision[t];
    s.weighted_r += w * s.recall[t];
    s.weighted_f1 += w * s.f1[t];
    s.macro_p += s.precision[t];
    s.macro_r += s.recall[t];
    s.macro_f1 += s.f1[t];
  }
  s.weighted_p /= n;
  s.weighted_r /= n;
  s.weighted_f1 /= n;
  s.macro_p /= double(labels);
  s.macro_r /= double(labels);
  s.macro_f1 /= double(labels);
  return s;
}

}  // namespace kanglid::testing
