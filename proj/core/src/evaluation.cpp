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

#include "kanglid/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>

#include "kanglid/error.hpp"

namespace kanglid {

ConfusionMatrix::ConfusionMatrix(const Grid& cells) : cells_(cells) {}

void ConfusionMatrix::add(Tag gold, Tag predicted, std::size_t count) {
  cells_[index_of(gold)][index_of(predicted)] += count;
}

std::size_t ConfusionMatrix::total() const {
  std::size_t sum = 0;
  for (const auto& row : cells_) {
    for (auto c : row) sum += c;
  }
  return sum;
}

std::size_t ConfusionMatrix::support(Tag gold) const {
  std::size_t sum = 0;
  for (auto c : cells_[index_of(gold)]) sum += c;
  return sum;
}

std::size_t ConfusionMatrix::predicted(Tag tag) const {
  std::size_t sum = 0;
  for (const auto& row : cells_) sum += row[index_of(tag)];
  return sum;
}

ConfusionMatrix confusion(std::span<const Tag> gold, std::span<const Tag> predicted) {
  if (gold.size() != predicted.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                fmt::format("{} gold tags vs {} predictions", gold.size(), predicted.size()));
  }
  if (gold.empty()) throw Error(ErrorCode::kEmptyMatrix, "nothing to evaluate");
  ConfusionMatrix m;
  for (std::size_t i = 0; i < gold.size(); ++i) m.add(gold[i], predicted[i]);
  return m;
}

ConfusionMatrix confusion(std::span<const std::string> gold,
                          std::span<const std::string> predicted) {
  if (gold.size() != predicted.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                fmt::format("{} gold tags vs {} predictions", gold.size(), predicted.size()));
  }
  std::vector<Tag> g, p;
  g.reserve(gold.size());
  p.reserve(predicted.size());
  for (const auto& s : gold) g.push_back(require_tag(s));
  for (const auto& s : predicted) p.push_back(require_tag(s));
  return confusion(std::span<const Tag>(g), std::span<const Tag>(p));
}

namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ClassScores per_class_scores(const ConfusionMatrix& m, Tag tag) {
  const auto tp = m.at(tag, tag);
  ClassScores s;
  s.support = m.support(tag);
  s.precision = ratio(tp, m.predicted(tag));
  s.recall = ratio(tp, s.support);
  const double sum = s.precision + s.recall;
  s.f1 = sum == 0.0 ? 0.0 : 2.0 * s.precision * s.recall / sum;
  return s;
}

std::string_view label_set_name(LabelSet set) {
  return set == LabelSet::kPresentInGold ? "present-in-gold" : "all-six";
}

LabelSet parse_label_set(std::string_view text) {
  if (text == "present-in-gold") return LabelSet::kPresentInGold;
  if (text == "all-six") return LabelSet::kAllSix;
  throw Error(ErrorCode::kInvalidArgument,
              fmt::format("label set must be present-in-gold or all-six, got '{}'", text));
}

AggregateScores aggregate_scores(const ConfusionMatrix& m, AverageMode mode, LabelSet labels) {
  const auto total = m.total();
  if (total == 0) throw Error(ErrorCode::kEmptyMatrix, "confusion matrix is empty");
  AggregateScores out;
  double weight_sum = 0.0;
  for (Tag tag : kAllTags) {
    const auto s = per_class_scores(m, tag);
    if (labels == LabelSet::kPresentInGold && s.support == 0) continue;
    const double w = mode == AverageMode::kWeighted ? static_cast<double>(s.support) : 1.0;
    out.precision += w * s.precision;
    out.recall += w * s.recall;
    out.f1 += w * s.f1;
    weight_sum += w;
  }
  if (weight_sum > 0.0) {
    out.precision /= weight_sum;
    out.recall /= weight_sum;
    out.f1 /= weight_sum;
  }
  return out;
}

EvaluationReport evaluate(const ConfusionMatrix& m, LabelSet labels) {
  EvaluationReport r;
  r.matrix = m;
  for (Tag tag : kAllTags) r.per_class[index_of(tag)] = per_class_scores(m, tag);
  r.weighted = aggregate_scores(m, AverageMode::kWeighted, labels);
  r.macro = aggregate_scores(m, AverageMode::kMacro, labels);
  r.label_set = labels;
  return r;
}

namespace {

long long rounded_key(double score) {
  return std::llround(score * std::pow(10.0, kRankingDecimals));
}

}  // namespace

RankedLeaderboard rank(std::span<const NamedReport> reports) {
  RankedLeaderboard board;
  board.reserve(reports.size());
  for (const auto& r : reports) board.push_back({0, r.name, r.report});
  std::sort(board.begin(), board.end(), [](const auto& a, const auto& b) {
    const auto ka = rounded_key(a.report.weighted.f1);
    const auto kb = rounded_key(b.report.weighted.f1);
    if (ka != kb) return ka > kb;
    return a.name < b.name;
  });
  std::size_t current = 0;
  for (std::size_t i = 0; i < board.size(); ++i) {
    if (i == 0 ||
        rounded_key(board[i].report.weighted.f1) != rounded_key(board[i - 1].report.weighted.f1)) {
      ++current;
    }
    board[i].rank = current;
  }
  return board;
}

RankedLeaderboard rank_scores(std::span<const std::pair<std::string, double>> weighted_f1) {
  std::vector<NamedReport> reports;
  for (const auto& [name, f1] : weighted_f1) {
    NamedReport r{name, {}};
    r.report.weighted.f1 = f1;
    reports.push_back(std::move(r));
  }
  return rank(reports);
}

std::string format_report(const EvaluationReport& r) {
  std::string out = "tag\tprecision\trecall\tf1\tsupport\n";
  for (Tag tag : kAllTags) {
    const auto& s = r.per_class[index_of(tag)];
    out += fmt::format("{}\t{:.4f}\t{:.4f}\t{:.4f}\t{}\n", tag_name(tag), s.precision, s.recall,
                       s.f1, s.support);
  }
  const auto total = r.matrix.total();
  out += fmt::format("weighted\t{:.4f}\t{:.4f}\t{:.4f}\t{}\n", r.weighted.precision,
                     r.weighted.recall, r.weighted.f1, total);
  out += fmt::format("macro\t{:.4f}\t{:.4f}\t{:.4f}\t{}\n", r.macro.precision, r.macro.recall,
                     r.macro.f1, total);
  out += fmt::format("# label_set={}\n", label_set_name(r.label_set));
  out += "# empty precision/recall denominators score 0\n";
  return out;
}

std::string format_leaderboard(const RankedLeaderboard& board) {
  std::string out = "rank\tname\tweighted_p\tweighted_r\tweighted_f1\tmacro_p\tmacro_r\tmacro_f1\n";
  for (const auto& e : board) {
    const auto& w = e.report.weighted;
    const auto& m = e.report.macro;
    out += fmt::format("{}\t{}\t{:.2f}\t{:.2f}\t{:.2f}\t{:.2f}\t{:.2f}\t{:.2f}\n", e.rank, e.name,
                       w.precision, w.recall, w.f1, m.precision, m.recall, m.f1);
  }
  return out;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

}  // namespace kanglid
