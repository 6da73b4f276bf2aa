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
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kanglid/tags.hpp"

namespace kanglid {

// Counts indexed (gold, predicted) in canonical tag order.
class ConfusionMatrix {
 public:
  using Grid = std::array<std::array<std::size_t, kNumTags>, kNumTags>;

  ConfusionMatrix() = default;
  explicit ConfusionMatrix(const Grid& cells);

  std::size_t at(Tag gold, Tag predicted) const {
    return cells_[index_of(gold)][index_of(predicted)];
  }
  void add(Tag gold, Tag predicted, std::size_t count = 1);
  const Grid& cells() const { return cells_; }

  std::size_t total() const;
  std::size_t support(Tag gold) const;   // row sum
  std::size_t predicted(Tag tag) const;  // column sum

  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  Grid cells_{};
};

// Throws Error(kLengthMismatch) on unequal lengths and Error(kEmptyMatrix) on
// empty input.
ConfusionMatrix confusion(std::span<const Tag> gold, std::span<const Tag> predicted);
// As above, also throwing Error(kUnknownTag) for names outside the scheme.
ConfusionMatrix confusion(std::span<const std::string> gold,
                          std::span<const std::string> predicted);

struct ClassScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

// Empty denominators score 0.
ClassScores per_class_scores(const ConfusionMatrix& m, Tag tag);

enum class AverageMode { kWeighted, kMacro };
enum class LabelSet { kPresentInGold, kAllSix };

std::string_view label_set_name(LabelSet set);
// Accepts "present-in-gold" and "all-six"; throws Error(kInvalidArgument).
LabelSet parse_label_set(std::string_view text);

struct AggregateScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Throws Error(kEmptyMatrix) when the matrix has no entries.
AggregateScores aggregate_scores(const ConfusionMatrix& m, AverageMode mode,
                                 LabelSet labels = LabelSet::kPresentInGold);

struct EvaluationReport {
  ConfusionMatrix matrix;
  std::array<ClassScores, kNumTags> per_class{};
  AggregateScores weighted;
  AggregateScores macro;
  LabelSet label_set = LabelSet::kPresentInGold;
};

EvaluationReport evaluate(const ConfusionMatrix& m, LabelSet labels = LabelSet::kPresentInGold);

struct NamedReport {
  std::string name;
  EvaluationReport report;
};

struct LeaderboardEntry {
  std::size_t rank = 0;
  std::string name;
  EvaluationReport report;
};

using RankedLeaderboard = std::vector<LeaderboardEntry>;

inline constexpr int kRankingDecimals = 2;

// Sorted by weighted F1 (rounded to kRankingDecimals) descending. Equal
// rounded scores share a rank and the next distinct score takes the next
// rank (1, 2, 2, 3). Ties are listed by name.
RankedLeaderboard rank(std::span<const NamedReport> reports);
// Convenience for bare scores.
RankedLeaderboard rank_scores(std::span<const std::pair<std::string, double>> weighted_f1);

// Per-class table followed by weighted and macro rows; tab separated.
std::string format_report(const EvaluationReport& report);
std::string format_leaderboard(const RankedLeaderboard& board);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace kanglid
