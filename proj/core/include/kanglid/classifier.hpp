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
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "kanglid/embedding.hpp"
#include "kanglid/tags.hpp"

namespace kanglid {

enum class DropoutPlacement { kAfterNorm, kBeforeNorm };

struct ModelSpec {
  std::size_t input_size = 0;  // backend hidden size
  std::size_t lstm_hidden = 128;
  double dropout_rate = 0.2;
  std::size_t num_classes = kNumTags;
  bool batch_norm = true;
  DropoutPlacement dropout_placement = DropoutPlacement::kAfterNorm;
  std::size_t max_subwords = kDefaultMaxSubwords;
  double norm_momentum = 0.99;
  double norm_epsilon = 1e-3;

  // Throws Error(kInvalidSpec).
  void validate() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct TrainingConfig {
  double learning_rate = 1e-4;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 30;
  std::size_t patience = 3;
  std::uint64_t seed = 42;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-7;

  void validate() const;

  friend bool operator==(const TrainingConfig&, const TrainingConfig&) = default;
};

// Trainable tensors use Keras gate order (input, forget, cell, output) along
// the 4*hidden axis.
struct Parameters {
  Eigen::MatrixXd input_kernel;      // input x 4H
  Eigen::MatrixXd recurrent_kernel;  // H x 4H
  Eigen::RowVectorXd lstm_bias;      // 4H
  Eigen::RowVectorXd gamma;          // H (empty without batch norm)
  Eigen::RowVectorXd beta;
  Eigen::RowVectorXd moving_mean;  // not trained by gradient
  Eigen::RowVectorXd moving_variance;
  Eigen::MatrixXd dense_kernel;  // H x classes
  Eigen::RowVectorXd dense_bias;
};

struct Gradients {
  Eigen::MatrixXd input_kernel;
  Eigen::MatrixXd recurrent_kernel;
  Eigen::RowVectorXd lstm_bias;
  Eigen::RowVectorXd gamma;
  Eigen::RowVectorXd beta;
  Eigen::MatrixXd dense_kernel;
  Eigen::RowVectorXd dense_bias;
};

using SequenceRef = std::reference_wrapper<const RowMatrixF>;

// LSTM over a word's subword vectors -> final hidden state -> batch norm ->
// dropout -> dense -> softmax.
class Model {
 public:
  Model(const ModelSpec& spec, std::uint64_t seed);

  const ModelSpec& spec() const { return spec_; }
  Parameters& parameters() { return params_; }
  const Parameters& parameters() const { return params_; }

  std::size_t parameter_count() const;
  std::size_t trainable_parameter_count() const;
  std::string summary() const;

  // Evaluation mode: moving statistics, no dropout. Returns batch x classes.
  Eigen::MatrixXd predict_proba(std::span<const SequenceRef> inputs) const;
  Eigen::MatrixXd predict_proba(std::span<const RowMatrixF> inputs) const;

  struct Step {
    double loss = 0.0;
    std::size_t correct = 0;
    Eigen::MatrixXd probabilities;
    Gradients gradients;
    Eigen::RowVectorXd batch_mean;  // for the moving-statistics update
    Eigen::RowVectorXd batch_variance;
  };

  // Training mode (batch statistics, dropout drawn from `dropout_seed`).
  // `targets` holds one one-hot row per input. Does not modify the model.
  Step forward_backward(std::span<const SequenceRef> inputs, const Eigen::MatrixXd& targets,
                        std::uint64_t dropout_seed) const;
  // Loss of the same training-mode forward pass, without gradients.
  double training_loss(std::span<const SequenceRef> inputs, const Eigen::MatrixXd& targets,
                       std::uint64_t dropout_seed) const;

  void update_moving_statistics(const Eigen::RowVectorXd& batch_mean,
                                const Eigen::RowVectorXd& batch_variance);

 private:
  struct Trace;
  Trace run(std::span<const SequenceRef> inputs, bool training, std::uint64_t dropout_seed,
            bool keep_cache) const;

  ModelSpec spec_;
  Parameters params_;
};

Model build_model(const ModelSpec& spec, std::uint64_t seed = 0);

// A model plus everything needed to use it on raw words.
struct TrainedModel {
  Model model;
  std::string backend;
  std::size_t backend_hidden_size = 0;
  TagScheme scheme;
  TrainingConfig training;
};

// Throws Error(kBackendMismatch) if the embedding came from another backend.
std::array<double, kNumTags> predict_proba(const TrainedModel& model,
                                           const WordEmbedding& embedding);
Tag classify(const TrainedModel& model, const WordEmbedding& embedding);
Tag classify(const TrainedModel& model, const EmbeddingBackend& backend, std::string_view word);

// First `max_rows` rows of `vectors`.
RowMatrixF truncate_rows(const RowMatrixF& vectors, std::size_t max_rows);

}  // namespace kanglid
