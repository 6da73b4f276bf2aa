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

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include <gtest/gtest.h>

#include "cli/commands.hpp"
#include "kanglid/checkpoint.hpp"
#include "kanglid/corpus.hpp"
#include "kanglid/training.hpp"
#include "test_support.hpp"

namespace kanglid::cli {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1))
    ++n;
  return n;
}

class ScopedEnv {
 public:
  ScopedEnv(const char* name, const std::string& value) : name_(name) {
    if (const char* old = std::getenv(name)) old_ = old;
    ::setenv(name, value.c_str(), 1);
  }
  ~ScopedEnv() {
    if (old_) {
      ::setenv(name_, old_->c_str(), 1);
    } else {
      ::unsetenv(name_);
    }
  }

 private:
  const char* name_;
  std::optional<std::string> old_;
};

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    corpus_ = dir_ / "corpus.tsv";
    write_corpus(corpus_, testing::synthetic_corpus(120, 5));
  }

  Outcome train_hash(const fs::path& out, std::vector<std::string> extra = {}) {
    std::vector<std::string> args = {"train",           corpus_.string(), "--backend",    "hash",
                                     "--output-dir",    out.string(),     "--max-epochs", "3",
                                     "--learning-rate", "0.001"};
    args.insert(args.end(), extra.begin(), extra.end());
    return invoke(args);
  }

  TempDir dir_;
  fs::path corpus_;
};

TEST_F(CliTest, TrainWritesArtifactsOffline) {
  ScopedEnv env(kWeightsCacheEnv, (dir_ / "no-cache").string());
  const auto r = train_hash(dir_ / "run");
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {kCheckpointFile, kHistoryFile, kResolvedConfigFile, kSummaryFile}) {
    EXPECT_TRUE(fs::exists(dir_ / "run" / f)) << f;
  }
  EXPECT_FALSE(fs::exists(dir_ / "no-cache"));
  const auto history = read_history(dir_ / "run" / kHistoryFile);
  EXPECT_EQ(history.epochs.size(), 3u);
  EXPECT_EQ(load_checkpoint(dir_ / "run" / kCheckpointFile).backend, "hash-64");
}

TEST_F(CliTest, SameSeedGivesByteIdenticalHistory) {
  ASSERT_EQ(train_hash(dir_ / "a", {"--seed", "3"}).code, 0);
  ASSERT_EQ(train_hash(dir_ / "b", {"--seed", "3"}).code, 0);
  EXPECT_EQ(slurp(dir_ / "a" / kHistoryFile), slurp(dir_ / "b" / kHistoryFile));
  EXPECT_EQ(slurp(dir_ / "a" / kCheckpointFile), slurp(dir_ / "b" / kCheckpointFile));
}

TEST_F(CliTest, ResolvedConfigReproducesRun) {
  ASSERT_EQ(train_hash(dir_ / "first", {"--seed", "8"}).code, 0);
  const auto r = invoke({"train", "--config", (dir_ / "first" / kResolvedConfigFile).string(),
                         "--output-dir", (dir_ / "second").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(slurp(dir_ / "first" / kHistoryFile), slurp(dir_ / "second" / kHistoryFile));
}

TEST_F(CliTest, FlagsOverrideConfigFileOverridesDefaults) {
  std::ofstream(dir_ / "run.conf") << "# test\npatience = 7\nseed = 5\nlstm_hidden = 8\n";
  const auto r =
      train_hash(dir_ / "out", {"--config", (dir_ / "run.conf").string(), "--patience", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto resolved = read_key_values(dir_ / "out" / kResolvedConfigFile);
  EXPECT_EQ(resolved.at("patience"), "2");
  EXPECT_EQ(resolved.at("seed"), "5");
  EXPECT_EQ(resolved.at("lstm_hidden"), "8");
  EXPECT_EQ(resolved.at("batch_size"), "64");
  EXPECT_EQ(resolved.at("backend"), "hash");
}

TEST_F(CliTest, UnknownBackendExitCode) {
  const auto r = invoke(
      {"train", corpus_.string(), "--backend", "gpt-9", "--output-dir", (dir_ / "x").string()});
  EXPECT_EQ(r.code, 20);
  EXPECT_NE(r.err.find("UnknownBackend"), std::string::npos) << r.err;
}

TEST_F(CliTest, BadConfigExitCodes) {
  std::ofstream(dir_ / "bad.conf") << "colour = blue\n";
  EXPECT_EQ(invoke({"train", corpus_.string(), "--config", (dir_ / "bad.conf").string()}).code, 51);
  std::ofstream(dir_ / "bad2.conf") << "patience = soon\n";
  EXPECT_EQ(invoke({"train", corpus_.string(), "--config", (dir_ / "bad2.conf").string()}).code,
            51);
  EXPECT_EQ(invoke({"train", "--backend", "hash"}).code, 51);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"train", "--seed", "abc"}).code, 2);
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST_F(CliTest, WeightsCacheFlagBeatsEnvironment) {
  const auto cache = dir_ / "cache";
  fs::create_directories(cache);
  fs::copy(testing::encoder_fixture("tiny-bert"), cache / "bert-base-uncased");
  {
    ScopedEnv env(kWeightsCacheEnv, (dir_ / "empty").string());
    const auto r = invoke({"train", corpus_.string(), "--backend", "bert-base-uncased",
                           "--output-dir", (dir_ / "o1").string()});
    EXPECT_EQ(r.code, 21) << r.err;  // WeightsUnavailable
    const auto r2 =
        invoke({"train", corpus_.string(), "--backend", "bert-base-uncased", "--weights-cache",
                cache.string(), "--output-dir", (dir_ / "o2").string()});
    EXPECT_EQ(r2.code, 25) << r2.err;  // the tiny snapshot was found, and rejected
  }
  {
    ScopedEnv env(kWeightsCacheEnv, cache.string());
    const auto r = invoke({"train", corpus_.string(), "--backend", "bert-base-uncased",
                           "--output-dir", (dir_ / "o3").string()});
    EXPECT_EQ(r.code, 25) << r.err;
  }
}

TEST_F(CliTest, PredictPreservesOrderAndSelfEvaluatesPerfectly) {
  ASSERT_EQ(train_hash(dir_ / "run").code, 0);
  std::string input;
  for (const char* w : {"aei", "xyz", "eeia", "zzyx", "ninna", "hello", "iaie", "yyz", "a", "q"}) {
    input += std::string(w) + "\n";
  }
  std::ofstream(dir_ / "words.txt") << input;
  const auto r =
      invoke({"predict", (dir_ / "words.txt").string(), "--checkpoint",
              (dir_ / "run" / kCheckpointFile).string(), "--output", (dir_ / "pred.tsv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto predicted = load_corpus(dir_ / "pred.tsv");
  ASSERT_EQ(predicted.size(), 10u);
  EXPECT_EQ(predicted.items[0].word, "aei");
  EXPECT_EQ(predicted.items[9].word, "q");

  const auto e = invoke({"evaluate", (dir_ / "pred.tsv").string(), (dir_ / "pred.tsv").string()});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_NE(e.out.find("weighted\t1.0000\t1.0000\t1.0000"), std::string::npos) << e.out;
  EXPECT_NE(e.out.find("macro\t1.0000\t1.0000\t1.0000"), std::string::npos) << e.out;
}

TEST_F(CliTest, PredictErrors) {
  ASSERT_EQ(train_hash(dir_ / "run").code, 0);
  std::ofstream(dir_ / "empty.txt") << "";
  const auto ckpt = (dir_ / "run" / kCheckpointFile).string();
  EXPECT_EQ(invoke({"predict", (dir_ / "empty.txt").string(), "--checkpoint", ckpt}).code, 13);
  std::ofstream(dir_ / "bad.ckpt") << "KLIDCKPT";
  std::ofstream(dir_ / "w.txt") << "word\n";
  EXPECT_EQ(
      invoke({"predict", (dir_ / "w.txt").string(), "--checkpoint", (dir_ / "bad.ckpt").string()})
          .code,
      34);
  std::ofstream(dir_ / "three.txt") << "a\tb\tc\n";
  EXPECT_EQ(invoke({"predict", (dir_ / "three.txt").string(), "--checkpoint", ckpt, "--output-dir",
                    dir_.path().string()})
                .code,
            11);
}

TEST_F(CliTest, EvaluateWorkedExample) {
  std::ofstream(dir_ / "gold.tsv") << "a\tkn\nb\tkn\nc\ten\n";
  std::ofstream(dir_ / "pred.tsv") << "a\tkn\nb\ten\nc\ten\n";
  const auto r = invoke({"evaluate", (dir_ / "gold.tsv").string(), (dir_ / "pred.tsv").string(),
                         "--output-dir", (dir_ / "eval").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("weighted\t0.8333\t0.6667\t0.6667\t3"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(dir_ / "eval" / kReportFile));
  EXPECT_TRUE(fs::exists(dir_ / "eval" / kHeatmapFile));
}

TEST_F(CliTest, EvaluateErrors) {
  std::ofstream(dir_ / "gold.tsv") << "a\tkn\nb\tkn\n";
  std::ofstream(dir_ / "short.tsv") << "a\tkn\n";
  std::ofstream(dir_ / "weird.tsv") << "a\tkn\nb\tklingon\n";
  EXPECT_EQ(invoke({"evaluate", (dir_ / "gold.tsv").string(), (dir_ / "short.tsv").string()}).code,
            40);
  EXPECT_EQ(invoke({"evaluate", (dir_ / "gold.tsv").string(), (dir_ / "weird.tsv").string()}).code,
            12);
  EXPECT_EQ(invoke({"evaluate", (dir_ / "gold.tsv").string(), (dir_ / "gold.tsv").string(),
                    "--label-set", "micro"})
                .code,
            2);
}

TEST_F(CliTest, EvaluateSeveralRunsRanksThem) {
  std::ofstream(dir_ / "gold.tsv") << "a\tkn\nb\tkn\nc\ten\nd\ten\n";
  std::ofstream(dir_ / "good.tsv") << "a\tkn\nb\tkn\nc\ten\nd\ten\n";
  std::ofstream(dir_ / "bad.tsv") << "a\ten\nb\tkn\nc\tkn\nd\ten\n";
  const auto r = invoke({"evaluate", (dir_ / "gold.tsv").string(), (dir_ / "bad.tsv").string(),
                         (dir_ / "good.tsv").string(), "--output-dir", (dir_ / "lb").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto good = r.out.find("good.tsv");
  const auto bad = r.out.find("bad.tsv");
  ASSERT_NE(good, std::string::npos);
  EXPECT_LT(good, bad);
  EXPECT_TRUE(fs::exists(dir_ / "lb" / kLeaderboardFile));
}

TEST_F(CliTest, StatsOnToyCorpus) {
  std::ofstream(dir_ / "toy.tsv") << "a\tkn\nb\tkn\nc\ten\nd\tother\n";
  const auto r =
      invoke({"stats", (dir_ / "toy.tsv").string(), "--output-dir", (dir_ / "s").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("kn\t2\t50.00"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("en\t1\t25.00"), std::string::npos);
  EXPECT_NE(r.out.find("other\t1\t25.00"), std::string::npos);
  EXPECT_NE(slurp(dir_ / "s" / kStatsFile).find("\"percent\": 50.0"), std::string::npos);
  EXPECT_EQ(count(slurp(dir_ / "s" / kDistributionChart), "class=\"bar\""), 6u);
  std::ofstream(dir_ / "empty.tsv") << "";
  EXPECT_EQ(invoke({"stats", (dir_ / "empty.tsv").string()}).code, 13);
}

TEST_F(CliTest, PlotFromHistory) {
  TrainingHistory h;
  for (std::size_t e = 1; e <= 5; ++e) h.epochs.push_back({e, 1.0 / e, 1.2 / e, 0.5, 0.4});
  h.best_epoch = 5;
  h.stopped_epoch = 5;
  write_history(dir_ / "h.tsv", h);
  const auto r = invoke({"plot", (dir_ / "h.tsv").string(), "--output-dir", (dir_ / "p").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {kLossChart, kAccuracyChart}) {
    const auto svg = slurp(dir_ / "p" / f);
    EXPECT_EQ(count(svg, "class=\"xtick\""), 5u) << f;
    EXPECT_EQ(count(svg, "class=\"series\""), 2u) << f;
  }

  TrainingHistory one;
  one.epochs.push_back({1, 0.5, 0.6, 0.7, 0.8});
  write_history(dir_ / "one.tsv", one);
  EXPECT_EQ(invoke({"plot", (dir_ / "one.tsv").string()}).code, 0);
  EXPECT_EQ(count(slurp(dir_ / kLossChart), "class=\"xtick\""), 1u);

  std::ofstream(dir_ / "junk.tsv") << "nonsense\n";
  EXPECT_EQ(invoke({"plot", (dir_ / "junk.tsv").string()}).code, 50);
}

TEST_F(CliTest, SyntheticRunLossFallsBetweenFirstAndBestEpoch) {
  write_corpus(dir_ / "syn200.tsv", testing::synthetic_corpus(200, 42));
  const auto r = invoke({"train", (dir_ / "syn200.tsv").string(), "--backend", "hash",
                         "--output-dir", (dir_ / "syn").string(), "--learning-rate", "0.001"});
  ASSERT_EQ(r.code, 0) << r.err;
  ASSERT_EQ(invoke({"plot", (dir_ / "syn" / kHistoryFile).string()}).code, 0);
  const auto h = read_history(dir_ / "syn" / kHistoryFile);
  EXPECT_LT(h.epochs[h.best_epoch - 1].train_loss, h.epochs.front().train_loss);
  EXPECT_TRUE(fs::exists(dir_ / "syn" / kLossChart));
}

}  // namespace
}  // namespace kanglid::cli
