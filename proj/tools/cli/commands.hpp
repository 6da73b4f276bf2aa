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

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "run_config.hpp"

namespace kanglid::cli {

// Artifact names inside an output directory.
inline constexpr const char* kCheckpointFile = "model.ckpt";
inline constexpr const char* kHistoryFile = "history.tsv";
inline constexpr const char* kResolvedConfigFile = "run.conf";
inline constexpr const char* kSummaryFile = "model_summary.txt";
inline constexpr const char* kPredictionsFile = "predictions.tsv";
inline constexpr const char* kReportFile = "report.tsv";
inline constexpr const char* kLeaderboardFile = "leaderboard.tsv";
inline constexpr const char* kHeatmapFile = "confusion.svg";
inline constexpr const char* kStatsFile = "stats.json";
inline constexpr const char* kDistributionChart = "distribution.svg";
inline constexpr const char* kLossChart = "loss.svg";
inline constexpr const char* kAccuracyChart = "accuracy.svg";

void cmd_train(const RunConfig& config, std::ostream& log);

struct PredictOptions {
  std::filesystem::path checkpoint;
  std::filesystem::path input;
  std::filesystem::path output;  // file
  std::filesystem::path weights_cache;
};
// Returns the number of words that could not be embedded (written as "other").
std::size_t cmd_predict(const PredictOptions& options, std::ostream& log);

struct EvaluateOptions {
  std::filesystem::path gold;
  std::vector<std::filesystem::path> predictions;
  std::filesystem::path output_dir;
  LabelSet label_set = LabelSet::kPresentInGold;
  bool heatmap = true;
};
void cmd_evaluate(const EvaluateOptions& options, std::ostream& out);

void cmd_stats(const std::filesystem::path& corpus, const std::filesystem::path& output_dir,
               std::ostream& out);

void cmd_plot(const std::filesystem::path& history, const std::filesystem::path& output_dir,
              std::ostream& out);

// Parses arguments (without the program name) and runs a command. Returns the
// process exit code; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kanglid::cli
