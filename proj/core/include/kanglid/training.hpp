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

#include <cstddef>
#include <filesystem>
#include <functional>
#include <vector>

#include <Eigen/Core>

#include "kanglid/classifier.hpp"
#include "kanglid/corpus.hpp"
#include "kanglid/embedding.hpp"

namespace kanglid {

// Embedded words with one-hot targets. Embeddings are computed once; the
// encoder stays frozen during training.
struct EncodedDataset {
  std::vector<RowMatrixF> sequences;  // truncated to max_subwords
  Eigen::MatrixXd targets;            // N x 6 one-hot
  std::size_t truncated_words = 0;

  std::size_t size() const { return sequences.size(); }
  std::vector<Tag> labels() const;
};

EncodedDataset encode_dataset(const EmbeddingBackend& backend, const LabeledCorpus& corpus,
                              std::size_t max_subwords);
// Throws Error(kInvalidOneHot) for rows that are not one-hot.
EncodedDataset make_dataset(std::vector<RowMatrixF> sequences, Eigen::MatrixXd targets);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double val_loss = 0.0;
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;

  friend bool operator==(const EpochRecord&, const EpochRecord&) = default;
};

struct TrainingHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  std::size_t stopped_epoch = 0;

  friend bool operator==(const TrainingHistory&, const TrainingHistory&) = default;
};

struct DatasetMetrics {
  double loss = 0.0;
  double accuracy = 0.0;
};

// Evaluation-mode loss and accuracy.
DatasetMetrics evaluate_model(const Model& model, const EncodedDataset& data,
                              std::size_t batch_size = 256);

struct TrainingHooks {
  // Replaces the measured validation loss before early stopping sees it.
  std::function<double(std::size_t epoch, double measured)> val_loss_override;
  std::function<void(const EpochRecord&, const Model&)> on_epoch_end;
};

struct TrainingResult {
  Model model;  // parameters from the best epoch
  TrainingHistory history;
};

// Adam on mean categorical cross-entropy. Stops when the validation loss has
// not improved for `patience` consecutive epochs and restores the best epoch.
TrainingResult train(Model model, const EncodedDataset& train_data, const EncodedDataset& val_data,
                     const TrainingConfig& config, const TrainingHooks& hooks = {});

class AdamOptimizer {
 public:
  AdamOptimizer(const Parameters& shape, const TrainingConfig& config);
  void step(Parameters& params, const Gradients& grads);

 private:
  Gradients m_;
  Gradients v_;
  double lr_, beta1_, beta2_, eps_;
  std::size_t t_ = 0;
};

// Tab-separated, one line per epoch, with best/stopped epochs in header
// comments. Output is byte-stable for identical histories.
void write_history(const std::filesystem::path& path, const TrainingHistory& history);
TrainingHistory read_history(const std::filesystem::path& path);

}  // namespace kanglid
