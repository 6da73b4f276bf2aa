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

#include "commands.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kanglid/checkpoint.hpp"
#include "kanglid/corpus.hpp"
#include "kanglid/error.hpp"
#include "kanglid/svg_chart.hpp"
#include "kanglid/training.hpp"

namespace kanglid::cli {
namespace fs = std::filesystem;

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
    throw Error(ErrorCode::kIoError,
                fmt::format("cannot create {}: {}", dir.string(), ec.message()));
}

BackendOptions backend_options(const fs::path& weights_cache) {
  BackendOptions options;
  options.weights_cache = weights_cache;
  return options;
}

// Embeds in chunks; a chunk that fails is retried word by word so one bad
// word does not sink its neighbours. Failed words get std::nullopt.
std::vector<std::optional<RowMatrixF>> embed_all(const EmbeddingBackend& backend,
                                                 const std::vector<std::string>& words,
                                                 std::size_t max_rows) {
  std::vector<std::optional<RowMatrixF>> out(words.size());
  constexpr std::size_t kChunk = 64;
  for (std::size_t start = 0; start < words.size(); start += kChunk) {
    const auto count = std::min(kChunk, words.size() - start);
    const auto chunk = std::span<const std::string>(words).subspan(start, count);
    try {
      auto embedded = backend.embed_words(chunk);
      for (std::size_t i = 0; i < count; ++i) {
        out[start + i] = truncate_rows(embedded[i].vectors, max_rows);
      }
    } catch (const Error&) {
      for (std::size_t i = 0; i < count; ++i) {
        try {
          out[start + i] = truncate_rows(backend.embed_word(chunk[i]).vectors, max_rows);
        } catch (const Error&) {
          out[start + i] = std::nullopt;
        }
      }
    }
  }
  return out;
}

struct Predictions {
  std::vector<Tag> tags;
  std::size_t failed = 0;
};

Predictions predict_words(const TrainedModel& trained, const EmbeddingBackend& backend,
                          const std::vector<std::string>& words) {
  if (backend.name() != trained.backend || backend.hidden_size() != trained.backend_hidden_size) {
    throw Error(
        ErrorCode::kBackendMismatch,
        fmt::format("checkpoint expects backend {} ({} dims), got {} ({} dims)", trained.backend,
                    trained.backend_hidden_size, backend.name(), backend.hidden_size()));
  }
  const auto embedded = embed_all(backend, words, trained.model.spec().max_subwords);
  Predictions out;
  out.tags.assign(words.size(), Tag::kOther);
  std::vector<SequenceRef> refs;
  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < embedded.size(); ++i) {
    if (embedded[i]) {
      refs.emplace_back(*embedded[i]);
      positions.push_back(i);
    } else {
      ++out.failed;
    }
  }
  constexpr std::size_t kBatch = 256;
  for (std::size_t start = 0; start < refs.size(); start += kBatch) {
    const auto count = std::min(kBatch, refs.size() - start);
    const Eigen::MatrixXd probs =
        trained.model.predict_proba(std::span<const SequenceRef>(refs).subspan(start, count));
    for (std::size_t r = 0; r < count; ++r) {
      const Eigen::RowVectorXd row = probs.row(static_cast<Eigen::Index>(r));
      out.tags[positions[start + r]] =
          argmax_tag(std::span<const double>(row.data(), static_cast<std::size_t>(row.size())));
    }
  }
  return out;
}

void write_predictions(const fs::path& path, const std::vector<std::string>& words,
                       const std::vector<Tag>& tags) {
  std::string text;
  for (std::size_t i = 0; i < words.size(); ++i) {
    text += fmt::format("{}\t{}\n", words[i], tag_name(tags[i]));
  }
  write_text(path, text);
}

std::vector<std::vector<double>> matrix_cells(const ConfusionMatrix& m) {
  std::vector<std::vector<double>> cells(kNumTags, std::vector<double>(kNumTags));
  for (std::size_t g = 0; g < kNumTags; ++g) {
    for (std::size_t p = 0; p < kNumTags; ++p) {
      cells[g][p] = static_cast<double>(m.cells()[g][p]);
    }
  }
  return cells;
}

std::vector<std::string> tag_labels() {
  std::vector<std::string> labels;
  for (Tag t : kAllTags) labels.emplace_back(tag_name(t));
  return labels;
}

}  // namespace

void cmd_train(const RunConfig& input, std::ostream& log) {
  RunConfig config = input;
  if (config.train_file.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "no training file given (train_file)");
  }
  config.training.validate();
  const auto backend_config = require_backend_config(config.backend);
  config.model.input_size = backend_config.hidden_size;
  config.model.validate();
  if (!(config.val_fraction > 0.0 && config.val_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "val_fraction must lie in (0, 1)");
  }

  config.train_file = fs::absolute(config.train_file);
  if (!config.test_file.empty()) config.test_file = fs::absolute(config.test_file);
  ensure_dir(config.output_dir);
  write_text(config.output_dir / kResolvedConfigFile, to_text(config));

  const auto corpus = load_corpus(config.train_file);
  const auto split =
      split_corpus(corpus, config.val_fraction, config.training.seed, config.stratified);
  fmt::print(log, "corpus: {} words ({} train / {} validation)\n", corpus.size(),
             split.train.size(), split.validation.size());

  const auto backend = load_backend(backend_config, backend_options(config.weights_cache));
  const auto train_data = encode_dataset(*backend, split.train, config.model.max_subwords);
  const auto val_data = encode_dataset(*backend, split.validation, config.model.max_subwords);
  if (const auto truncated = train_data.truncated_words + val_data.truncated_words) {
    fmt::print(log, "warning: {} words truncated to {} subwords\n", truncated,
               config.model.max_subwords);
  }

  Model model(config.model, config.training.seed);
  write_text(config.output_dir / kSummaryFile, model.summary());

  TrainingHooks hooks;
  hooks.on_epoch_end = [&log, &config](const EpochRecord& r, const Model&) {
    fmt::print(log, "epoch {:>2}/{}  loss {:.4f}  acc {:.4f}  val_loss {:.4f}  val_acc {:.4f}\n",
               r.epoch, config.training.max_epochs, r.train_loss, r.train_accuracy, r.val_loss,
               r.val_accuracy);
  };
  auto result = train(std::move(model), train_data, val_data, config.training, hooks);
  fmt::print(log, "best epoch {} of {}\n", result.history.best_epoch, result.history.stopped_epoch);

  write_history(config.output_dir / kHistoryFile, result.history);
  TrainedModel trained{std::move(result.model), backend->name(), backend->hidden_size(),
                       TagScheme::canonical(), config.training};
  save_checkpoint(config.output_dir / kCheckpointFile, trained);

  if (!config.test_file.empty()) {
    const auto test = load_corpus(config.test_file);
    const auto words = test.words();
    const auto predicted = predict_words(trained, *backend, words);
    write_predictions(config.output_dir / kPredictionsFile, words, predicted.tags);
    const auto gold = test.tags();
    const auto report =
        evaluate(confusion(std::span<const Tag>(gold), std::span<const Tag>(predicted.tags)),
                 config.label_set);
    write_text(config.output_dir / kReportFile, format_report(report));
    fmt::print(log, "test: weighted F1 {:.4f}  macro F1 {:.4f}\n", report.weighted.f1,
               report.macro.f1);
  }
}

std::size_t cmd_predict(const PredictOptions& options, std::ostream& log) {
  const auto trained = load_checkpoint(options.checkpoint);
  const auto words = load_words(options.input);
  const auto backend = load_backend(trained.backend, backend_options(options.weights_cache));
  const auto predicted = predict_words(trained, *backend, words.words);
  if (options.output.has_parent_path()) ensure_dir(options.output.parent_path());
  write_predictions(options.output, words.words, predicted.tags);
  if (predicted.failed > 0) {
    fmt::print(log, "warning: {} of {} words could not be embedded and were tagged other\n",
               predicted.failed, words.words.size());
  }
  return predicted.failed;
}

void cmd_evaluate(const EvaluateOptions& options, std::ostream& out) {
  if (options.predictions.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no prediction files given");
  }
  const auto gold = load_corpus(options.gold);
  const auto gold_tags = gold.tags();
  std::vector<NamedReport> reports;
  for (const auto& path : options.predictions) {
    const auto predicted = load_corpus(path);
    if (predicted.size() != gold.size()) {
      throw Error(ErrorCode::kLengthMismatch,
                  fmt::format("{} has {} entries but {} has {}", path.string(), predicted.size(),
                              options.gold.string(), gold.size()));
    }
    const auto tags = predicted.tags();
    reports.push_back({path.string(), evaluate(confusion(std::span<const Tag>(gold_tags),
                                                         std::span<const Tag>(tags)),
                                               options.label_set)});
  }

  if (!options.output_dir.empty()) ensure_dir(options.output_dir);
  const auto& first = reports.front().report;
  const auto report_text = format_report(first);
  if (reports.size() == 1) {
    fmt::print(out, "{}", report_text);
    if (!options.output_dir.empty()) {
      write_text(options.output_dir / kReportFile, report_text);
    }
  } else {
    const auto board = rank(reports);
    const auto board_text = format_leaderboard(board);
    fmt::print(out, "{}", board_text);
    if (!options.output_dir.empty()) {
      write_text(options.output_dir / kLeaderboardFile, board_text);
      for (std::size_t i = 0; i < reports.size(); ++i) {
        write_text(options.output_dir / fmt::format("report_{}.tsv", i + 1),
                   format_report(reports[i].report));
      }
    }
  }
  if (options.heatmap && !options.output_dir.empty()) {
    write_text(options.output_dir / kHeatmapFile,
               heatmap_svg("Confusion matrix", tag_labels(), matrix_cells(first.matrix)));
  }
}

void cmd_stats(const fs::path& corpus_path, const fs::path& output_dir, std::ostream& out) {
  const auto corpus = load_corpus(corpus_path);
  const auto stats = compute_distribution(corpus);
  fmt::print(out, "tag\tcount\tpercent\n");
  nlohmann::json tags = nlohmann::json::object();
  std::vector<Bar> bars;
  for (Tag t : kAllTags) {
    fmt::print(out, "{}\t{}\t{:.2f}\n", tag_name(t), stats.count(t), stats.percentage(t));
    tags[std::string(tag_name(t))] = {{"count", stats.count(t)}, {"percent", stats.percentage(t)}};
    bars.push_back({std::string(tag_name(t)), stats.percentage(t)});
  }
  fmt::print(out, "total\t{}\t100.00\n", stats.total);
  if (output_dir.empty()) return;
  ensure_dir(output_dir);
  const nlohmann::json report = {
      {"source", corpus_path.string()}, {"total", stats.total}, {"tags", tags}};
  write_text(output_dir / kStatsFile, report.dump(2) + "\n");
  write_text(output_dir / kDistributionChart, bar_chart_svg("Tag distribution", bars, "%"));
}

void cmd_plot(const fs::path& history_path, const fs::path& output_dir, std::ostream& out) {
  const auto history = read_history(history_path);
  Series train_loss{"train", {}}, val_loss{"validation", {}};
  Series train_acc{"train", {}}, val_acc{"validation", {}};
  for (const auto& r : history.epochs) {
    train_loss.values.push_back(r.train_loss);
    val_loss.values.push_back(r.val_loss);
    train_acc.values.push_back(r.train_accuracy);
    val_acc.values.push_back(r.val_accuracy);
  }
  ensure_dir(output_dir);
  write_text(output_dir / kLossChart, line_chart_svg("Training and validation loss", "epoch",
                                                     "loss", {train_loss, val_loss}));
  write_text(output_dir / kAccuracyChart,
             line_chart_svg("Training and validation accuracy", "epoch", "accuracy",
                            {train_acc, val_acc}));
  fmt::print(out, "wrote {} and {} ({} epochs, best {})\n", (output_dir / kLossChart).string(),
             (output_dir / kAccuracyChart).string(), history.epochs.size(), history.best_epoch);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Word-level language identification for code-mixed Kannada-English text", "kanglid"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "kanglid 0.1.0");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train a classifier and write a checkpoint");
  std::string config_path, backend, output_dir, weights_cache, train_file, test_file;
  std::uint64_t seed = 0;
  double val_fraction = 0.0, learning_rate = 0.0;
  std::size_t patience = 0, max_epochs = 0;
  train_cmd->add_option("train_file", train_file, "Labelled corpus (word<TAB>tag or CSV)");
  train_cmd->add_option("--config", config_path, "key = value run configuration");
  train_cmd->add_option("--backend", backend, "Embedding backend (e.g. bert-base-uncased, hash)");
  train_cmd->add_option("--seed", seed, "Random seed");
  train_cmd->add_option("--output-dir", output_dir, "Where artifacts are written");
  train_cmd->add_option("--weights-cache", weights_cache,
                        "Directory of pretrained snapshots (default $KANGLID_WEIGHTS_CACHE)");
  train_cmd->add_option("--val-fraction", val_fraction, "Held-out validation fraction");
  train_cmd->add_option("--patience", patience, "Early-stopping patience in epochs");
  train_cmd->add_option("--test-file", test_file, "Labelled file scored after training");
  train_cmd->add_option("--learning-rate", learning_rate, "Adam learning rate");
  train_cmd->add_option("--max-epochs", max_epochs, "Epoch limit");

  // predict
  auto* predict_cmd = app.add_subcommand("predict", "Tag one word per line");
  std::string checkpoint, input, output;
  predict_cmd->add_option("input", input, "Words, one per line (a tag column is ignored)")
      ->required();
  predict_cmd->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  predict_cmd->add_option("--output", output, "Output file (default <output-dir>/predictions.tsv)");
  predict_cmd->add_option("--output-dir", output_dir, "Output directory");
  predict_cmd->add_option("--weights-cache", weights_cache, "Directory of pretrained snapshots");

  // evaluate
  auto* eval_cmd = app.add_subcommand("evaluate", "Score predictions against gold tags");
  std::string gold, label_set = "present-in-gold";
  std::vector<std::string> predictions;
  bool no_heatmap = false;
  eval_cmd->add_option("gold", gold, "Gold file (word<TAB>tag)")->required();
  eval_cmd->add_option("predictions", predictions, "One or more prediction files")->required();
  eval_cmd->add_option("--output-dir", output_dir, "Where the report is written");
  eval_cmd->add_option("--label-set", label_set, "present-in-gold or all-six");
  eval_cmd->add_flag("--no-heatmap", no_heatmap, "Skip the confusion-matrix image");

  // stats
  auto* stats_cmd = app.add_subcommand("stats", "Tag distribution of a corpus");
  std::string corpus;
  stats_cmd->add_option("corpus", corpus, "Labelled corpus")->required();
  stats_cmd->add_option("--output-dir", output_dir, "Where stats.json and the chart go");

  // plot
  auto* plot_cmd = app.add_subcommand("plot", "Loss and accuracy curves from a history file");
  std::string history;
  plot_cmd->add_option("history", history, "history.tsv written by train")->required();
  plot_cmd->add_option("--output-dir", output_dir, "Where the images go (default: beside history)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ErrorCode::kInvalidArgument);
  }

  try {
    if (train_cmd->parsed()) {
      RunConfig config;
      if (!config_path.empty()) apply_config(config, read_key_values(config_path));
      if (!train_file.empty()) config.train_file = train_file;
      if (!test_file.empty()) config.test_file = test_file;
      if (train_cmd->count("--backend")) config.backend = backend;
      if (train_cmd->count("--seed")) config.training.seed = seed;
      if (train_cmd->count("--output-dir")) config.output_dir = output_dir;
      if (train_cmd->count("--weights-cache")) config.weights_cache = weights_cache;
      if (train_cmd->count("--val-fraction")) config.val_fraction = val_fraction;
      if (train_cmd->count("--patience")) config.training.patience = patience;
      if (train_cmd->count("--learning-rate")) config.training.learning_rate = learning_rate;
      if (train_cmd->count("--max-epochs")) config.training.max_epochs = max_epochs;
      cmd_train(config, err);
      fmt::print(out, "wrote {}\n", config.output_dir.string());
    } else if (predict_cmd->parsed()) {
      PredictOptions options;
      options.checkpoint = checkpoint;
      options.input = input;
      options.weights_cache = weights_cache;
      if (!output.empty()) {
        options.output = output;
      } else {
        options.output = fs::path(output_dir.empty() ? "." : output_dir) / kPredictionsFile;
      }
      cmd_predict(options, err);
      fmt::print(out, "wrote {}\n", options.output.string());
    } else if (eval_cmd->parsed()) {
      EvaluateOptions options;
      options.gold = gold;
      options.predictions.assign(predictions.begin(), predictions.end());
      options.output_dir = output_dir;
      options.label_set = parse_label_set(label_set);
      options.heatmap = !no_heatmap;
      cmd_evaluate(options, out);
    } else if (stats_cmd->parsed()) {
      cmd_stats(corpus, output_dir, out);
    } else if (plot_cmd->parsed()) {
      const fs::path dir =
          output_dir.empty() ? fs::path(history).parent_path() : fs::path(output_dir);
      cmd_plot(history, dir.empty() ? fs::path(".") : dir, out);
    }
  } catch (const Error& e) {
    fmt::print(err, "kanglid: {}\n", e.what());
    return e.exit_code();
  } catch (const std::exception& e) {
    fmt::print(err, "kanglid: internal error: {}\n", e.what());
    return 1;
  }
  return 0;
}

}  // namespace kanglid::cli
