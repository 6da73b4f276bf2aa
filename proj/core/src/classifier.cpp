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

#include "kanglid/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>
#include <Eigen/QR>

#include "kanglid/error.hpp"
#include "kanglid/random.hpp"

namespace kanglid {

void ModelSpec::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::kInvalidSpec, why); };
  if (input_size == 0) fail("input_size must be positive");
  if (lstm_hidden == 0) fail("lstm_hidden must be positive");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) fail("dropout_rate must lie in [0, 1)");
  if (num_classes != kNumTags) fail("num_classes must equal the tag scheme size (6)");
  if (max_subwords == 0) fail("max_subwords must be positive");
  if (!(norm_momentum >= 0.0 && norm_momentum < 1.0)) fail("norm_momentum must lie in [0, 1)");
  if (!(norm_epsilon > 0.0)) fail("norm_epsilon must be positive");
}

void TrainingConfig::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::kInvalidConfig, why); };
  if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
  if (batch_size == 0) fail("batch_size must be positive");
  if (max_epochs == 0) fail("max_epochs must be positive");
  if (patience == 0) fail("patience must be positive");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    fail("Adam betas must lie in [0, 1)");
  }
  if (!(adam_epsilon > 0.0)) fail("adam_epsilon must be positive");
}

namespace {

Eigen::MatrixXd glorot_uniform(Rng& rng, Eigen::Index fan_in, Eigen::Index fan_out) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Eigen::MatrixXd m(fan_in, fan_out);
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = rng.uniform(-limit, limit);
  }
  return m;
}

// rows x cols with orthonormal rows (rows <= cols).
Eigen::MatrixXd orthogonal(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd a(cols, rows);
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    for (Eigen::Index r = 0; r < a.rows(); ++r) a(r, c) = rng.normal();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(cols, rows);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(rows).triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < rows; ++k) {
    if (r(k, k) < 0) q.col(k) *= -1.0;
  }
  return q.transpose();
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

Model::Model(const ModelSpec& spec, std::uint64_t seed) : spec_(spec) {
  spec_.validate();
  const auto in = static_cast<Eigen::Index>(spec_.input_size);
  const auto h = static_cast<Eigen::Index>(spec_.lstm_hidden);
  const auto classes = static_cast<Eigen::Index>(spec_.num_classes);
  Rng rng(mix64(seed));
  params_.input_kernel = glorot_uniform(rng, in, 4 * h);
  params_.recurrent_kernel = orthogonal(rng, h, 4 * h);
  params_.lstm_bias = Eigen::RowVectorXd::Zero(4 * h);
  params_.lstm_bias.segment(h, h).setOnes();  // forget gate
  if (spec_.batch_norm) {
    params_.gamma = Eigen::RowVectorXd::Ones(h);
    params_.beta = Eigen::RowVectorXd::Zero(h);
    params_.moving_mean = Eigen::RowVectorXd::Zero(h);
    params_.moving_variance = Eigen::RowVectorXd::Ones(h);
  }
  params_.dense_kernel = glorot_uniform(rng, h, classes);
  params_.dense_bias = Eigen::RowVectorXd::Zero(classes);
}

Model build_model(const ModelSpec& spec, std::uint64_t seed) { return Model(spec, seed); }

std::size_t Model::trainable_parameter_count() const {
  const auto in = spec_.input_size;
  const auto h = spec_.lstm_hidden;
  std::size_t n = 4 * h * (in + h + 1) + (h + 1) * spec_.num_classes;
  if (spec_.batch_norm) n += 2 * h;
  return n;
}

std::size_t Model::parameter_count() const {
  return trainable_parameter_count() + (spec_.batch_norm ? 2 * spec_.lstm_hidden : 0);
}

std::string Model::summary() const {
  const auto h = spec_.lstm_hidden;
  std::ostringstream out;
  const std::string rule(72, '-');
  auto row = [&](const std::string& layer, const std::string& shape, std::size_t params) {
    out << fmt::format("{:<42}{:<20}{:>10}\n", layer, shape, params);
  };
  out << rule << '\n';
  out << fmt::format("{:<42}{:<20}{:>10}\n", "Layer (type)", "Output Shape", "Param #");
  out << rule << '\n';
  row("input (InputLayer)", fmt::format("(None, {}, {})", spec_.max_subwords, spec_.input_size), 0);
  row("lstm (LSTM)", fmt::format("(None, {})", h), 4 * h * (spec_.input_size + h + 1));
  const bool dropout = spec_.dropout_rate > 0.0;
  if (dropout && spec_.dropout_placement == DropoutPlacement::kBeforeNorm) {
    row("dropout (Dropout)", fmt::format("(None, {})", h), 0);
  }
  if (spec_.batch_norm) {
    row("batch_normalization (BatchNormalization)", fmt::format("(None, {})", h), 4 * h);
  }
  if (dropout && spec_.dropout_placement == DropoutPlacement::kAfterNorm) {
    row("dropout (Dropout)", fmt::format("(None, {})", h), 0);
  }
  row("dense (Dense, softmax)", fmt::format("(None, {})", spec_.num_classes),
      (h + 1) * spec_.num_classes);
  out << rule << '\n';
  out << "Total params: " << parameter_count() << '\n';
  out << "Trainable params: " << trainable_parameter_count() << '\n';
  out << "Non-trainable params: " << parameter_count() - trainable_parameter_count() << '\n';
  return out.str();
}

struct Model::Trace {
  struct Cell {
    Eigen::MatrixXd x;      // T x input
    Eigen::MatrixXd gates;  // T x 4H, post-activation
    Eigen::MatrixXd c;      // T x H
    Eigen::MatrixXd h;      // T x H
  };
  std::vector<Cell> cells;
  Eigen::MatrixXd last_hidden;  // B x H
  Eigen::MatrixXd normalized;   // x-hat
  Eigen::RowVectorXd inv_std;
  Eigen::RowVectorXd batch_mean;
  Eigen::RowVectorXd batch_variance;
  Eigen::MatrixXd mask;  // dropout scale, empty when inactive
  Eigen::MatrixXd features;
  Eigen::MatrixXd logits;
  Eigen::MatrixXd probabilities;
};

Model::Trace Model::run(std::span<const SequenceRef> inputs, bool training,
                        std::uint64_t dropout_seed, bool keep_cache) const {
  if (inputs.empty()) throw Error(ErrorCode::kEmptyBatch, "model input batch is empty");
  const auto h = static_cast<Eigen::Index>(spec_.lstm_hidden);
  const auto batch = static_cast<Eigen::Index>(inputs.size());
  const auto& p = params_;

  Trace t;
  t.last_hidden.resize(batch, h);
  if (keep_cache) t.cells.resize(inputs.size());
  for (Eigen::Index b = 0; b < batch; ++b) {
    const RowMatrixF& seq = inputs[static_cast<std::size_t>(b)].get();
    if (seq.rows() == 0) throw Error(ErrorCode::kInvalidArgument, "empty subword sequence");
    if (seq.cols() != static_cast<Eigen::Index>(spec_.input_size)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("input width {} does not match model input_size {}", seq.cols(),
                              spec_.input_size));
    }
    const auto steps =
        std::min<Eigen::Index>(seq.rows(), static_cast<Eigen::Index>(spec_.max_subwords));
    Eigen::MatrixXd x = seq.topRows(steps).cast<double>();
    Eigen::MatrixXd projected = x * p.input_kernel;
    projected.rowwise() += p.lstm_bias;

    Eigen::RowVectorXd hidden = Eigen::RowVectorXd::Zero(h);
    Eigen::RowVectorXd cell = Eigen::RowVectorXd::Zero(h);
    Trace::Cell cache;
    if (keep_cache) {
      cache.gates.resize(steps, 4 * h);
      cache.c.resize(steps, h);
      cache.h.resize(steps, h);
    }
    for (Eigen::Index s = 0; s < steps; ++s) {
      Eigen::RowVectorXd z = projected.row(s) + hidden * p.recurrent_kernel;
      for (Eigen::Index k = 0; k < h; ++k) {
        z(k) = sigmoid(z(k));
        z(h + k) = sigmoid(z(h + k));
        z(2 * h + k) = std::tanh(z(2 * h + k));
        z(3 * h + k) = sigmoid(z(3 * h + k));
      }
      cell = z.segment(h, h).cwiseProduct(cell) + z.segment(0, h).cwiseProduct(z.segment(2 * h, h));
      hidden = z.segment(3 * h, h).cwiseProduct(cell.array().tanh().matrix());
      if (keep_cache) {
        cache.gates.row(s) = z;
        cache.c.row(s) = cell;
        cache.h.row(s) = hidden;
      }
    }
    t.last_hidden.row(b) = hidden;
    if (keep_cache) {
      cache.x = std::move(x);
      t.cells[static_cast<std::size_t>(b)] = std::move(cache);
    }
  }

  const bool dropout_active = training && spec_.dropout_rate > 0.0;
  if (dropout_active) {
    Rng rng(dropout_seed);
    const double keep = 1.0 - spec_.dropout_rate;
    t.mask.resize(batch, h);
    for (Eigen::Index r = 0; r < batch; ++r) {
      for (Eigen::Index c = 0; c < h; ++c) t.mask(r, c) = rng.uniform() < keep ? 1.0 / keep : 0.0;
    }
  }

  Eigen::MatrixXd x = t.last_hidden;
  if (dropout_active && spec_.dropout_placement == DropoutPlacement::kBeforeNorm) {
    x = x.cwiseProduct(t.mask);
  }
  if (spec_.batch_norm) {
    if (training) {
      t.batch_mean = x.colwise().mean();
      Eigen::MatrixXd centered = x.rowwise() - t.batch_mean;
      t.batch_variance = centered.array().square().colwise().mean();
      t.inv_std = (t.batch_variance.array() + spec_.norm_epsilon).rsqrt();
      t.normalized = centered.array().rowwise() * t.inv_std.array();
    } else {
      t.inv_std = (p.moving_variance.array() + spec_.norm_epsilon).rsqrt();
      t.normalized = (x.rowwise() - p.moving_mean).array().rowwise() * t.inv_std.array();
    }
    x = (t.normalized.array().rowwise() * p.gamma.array()).rowwise() + p.beta.array();
  }
  if (dropout_active && spec_.dropout_placement == DropoutPlacement::kAfterNorm) {
    x = x.cwiseProduct(t.mask);
  }
  t.features = std::move(x);
  t.logits = t.features * p.dense_kernel;
  t.logits.rowwise() += p.dense_bias;
  t.probabilities.resize(t.logits.rows(), t.logits.cols());
  for (Eigen::Index r = 0; r < t.logits.rows(); ++r) {
    const Eigen::RowVectorXd shifted = t.logits.row(r).array() - t.logits.row(r).maxCoeff();
    const Eigen::RowVectorXd e = shifted.array().exp();
    t.probabilities.row(r) = e / e.sum();
  }
  return t;
}

namespace {

double cross_entropy(const Eigen::MatrixXd& logits, const Eigen::MatrixXd& targets) {
  double total = 0.0;
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double max = logits.row(r).maxCoeff();
    const double lse = max + std::log((logits.row(r).array() - max).exp().sum());
    total -= targets.row(r).dot((logits.row(r).array() - lse).matrix());
  }
  return total / static_cast<double>(logits.rows());
}

void check_targets(const Eigen::MatrixXd& targets, std::size_t batch, std::size_t classes) {
  if (targets.rows() != static_cast<Eigen::Index>(batch) ||
      targets.cols() != static_cast<Eigen::Index>(classes)) {
    throw Error(ErrorCode::kInvalidArgument, "targets must be batch x classes");
  }
}

}  // namespace

Eigen::MatrixXd Model::predict_proba(std::span<const SequenceRef> inputs) const {
  return run(inputs, /*training=*/false, 0, /*keep_cache=*/false).probabilities;
}

Eigen::MatrixXd Model::predict_proba(std::span<const RowMatrixF> inputs) const {
  std::vector<SequenceRef> refs(inputs.begin(), inputs.end());
  return predict_proba(std::span<const SequenceRef>(refs));
}

double Model::training_loss(std::span<const SequenceRef> inputs, const Eigen::MatrixXd& targets,
                            std::uint64_t dropout_seed) const {
  check_targets(targets, inputs.size(), spec_.num_classes);
  const auto t = run(inputs, /*training=*/true, dropout_seed, /*keep_cache=*/false);
  return cross_entropy(t.logits, targets);
}

Model::Step Model::forward_backward(std::span<const SequenceRef> inputs,
                                    const Eigen::MatrixXd& targets,
                                    std::uint64_t dropout_seed) const {
  check_targets(targets, inputs.size(), spec_.num_classes);
  const auto t = run(inputs, /*training=*/true, dropout_seed, /*keep_cache=*/true);
  const auto h = static_cast<Eigen::Index>(spec_.lstm_hidden);
  const auto batch = static_cast<double>(inputs.size());
  const auto& p = params_;

  Step step;
  step.loss = cross_entropy(t.logits, targets);
  for (Eigen::Index r = 0; r < t.probabilities.rows(); ++r) {
    Eigen::Index predicted, gold;
    t.probabilities.row(r).maxCoeff(&predicted);
    targets.row(r).maxCoeff(&gold);
    if (predicted == gold) ++step.correct;
  }
  step.probabilities = t.probabilities;
  step.batch_mean = t.batch_mean;
  step.batch_variance = t.batch_variance;

  auto& g = step.gradients;
  const Eigen::MatrixXd d_logits = (t.probabilities - targets) / batch;
  g.dense_kernel = t.features.transpose() * d_logits;
  g.dense_bias = d_logits.colwise().sum();
  Eigen::MatrixXd d = d_logits * p.dense_kernel.transpose();

  const bool dropout_active = t.mask.size() > 0;
  if (dropout_active && spec_.dropout_placement == DropoutPlacement::kAfterNorm) {
    d = d.cwiseProduct(t.mask);
  }
  if (spec_.batch_norm) {
    g.gamma = d.cwiseProduct(t.normalized).colwise().sum();
    g.beta = d.colwise().sum();
    const Eigen::MatrixXd d_hat = d.array().rowwise() * p.gamma.array();
    const Eigen::RowVectorXd sum_d_hat = d_hat.colwise().sum();
    const Eigen::RowVectorXd sum_d_hat_x = d_hat.cwiseProduct(t.normalized).colwise().sum();
    Eigen::MatrixXd inner = batch * d_hat;
    inner.rowwise() -= sum_d_hat;
    inner -= (t.normalized.array().rowwise() * sum_d_hat_x.array()).matrix();
    d = (inner.array().rowwise() * t.inv_std.array()).matrix() / batch;
  }
  if (dropout_active && spec_.dropout_placement == DropoutPlacement::kBeforeNorm) {
    d = d.cwiseProduct(t.mask);
  }

  g.input_kernel = Eigen::MatrixXd::Zero(p.input_kernel.rows(), p.input_kernel.cols());
  g.recurrent_kernel = Eigen::MatrixXd::Zero(h, 4 * h);
  g.lstm_bias = Eigen::RowVectorXd::Zero(4 * h);
  for (std::size_t b = 0; b < t.cells.size(); ++b) {
    const auto& cell = t.cells[b];
    const Eigen::Index steps = cell.x.rows();
    Eigen::MatrixXd dz_all(steps, 4 * h);
    Eigen::RowVectorXd dh = d.row(static_cast<Eigen::Index>(b));
    Eigen::RowVectorXd dc = Eigen::RowVectorXd::Zero(h);
    for (Eigen::Index s = steps - 1; s >= 0; --s) {
      const auto gates = cell.gates.row(s);
      const Eigen::RowVectorXd i = gates.segment(0, h);
      const Eigen::RowVectorXd f = gates.segment(h, h);
      const Eigen::RowVectorXd gg = gates.segment(2 * h, h);
      const Eigen::RowVectorXd o = gates.segment(3 * h, h);
      const Eigen::RowVectorXd tanh_c = cell.c.row(s).array().tanh();
      const Eigen::RowVectorXd c_prev =
          s > 0 ? Eigen::RowVectorXd(cell.c.row(s - 1)) : Eigen::RowVectorXd::Zero(h);

      const Eigen::RowVectorXd d_o = dh.cwiseProduct(tanh_c);
      dc += dh.cwiseProduct(o).cwiseProduct((1.0 - tanh_c.array().square()).matrix());
      const Eigen::RowVectorXd d_i = dc.cwiseProduct(gg);
      const Eigen::RowVectorXd d_g = dc.cwiseProduct(i);
      const Eigen::RowVectorXd d_f = dc.cwiseProduct(c_prev);

      auto dz = dz_all.row(s);
      dz.segment(0, h) = d_i.array() * i.array() * (1.0 - i.array());
      dz.segment(h, h) = d_f.array() * f.array() * (1.0 - f.array());
      dz.segment(2 * h, h) = d_g.array() * (1.0 - gg.array().square());
      dz.segment(3 * h, h) = d_o.array() * o.array() * (1.0 - o.array());

      if (s > 0) g.recurrent_kernel.noalias() += cell.h.row(s - 1).transpose() * dz;
      dh = dz * p.recurrent_kernel.transpose();
      dc = dc.cwiseProduct(f);
    }
    g.input_kernel.noalias() += cell.x.transpose() * dz_all;
    g.lstm_bias += dz_all.colwise().sum();
  }
  return step;
}

void Model::update_moving_statistics(const Eigen::RowVectorXd& batch_mean,
                                     const Eigen::RowVectorXd& batch_variance) {
  if (!spec_.batch_norm) return;
  const double m = spec_.norm_momentum;
  params_.moving_mean = m * params_.moving_mean + (1.0 - m) * batch_mean;
  params_.moving_variance = m * params_.moving_variance + (1.0 - m) * batch_variance;
}

RowMatrixF truncate_rows(const RowMatrixF& vectors, std::size_t max_rows) {
  const auto rows = std::min<Eigen::Index>(vectors.rows(), static_cast<Eigen::Index>(max_rows));
  return vectors.topRows(rows);
}

std::array<double, kNumTags> predict_proba(const TrainedModel& model,
                                           const WordEmbedding& embedding) {
  if (embedding.backend != model.backend) {
    throw Error(ErrorCode::kBackendMismatch, "model was trained on '" + model.backend +
                                                 "' but the embedding came from '" +
                                                 embedding.backend + "'");
  }
  const std::array<SequenceRef, 1> input = {std::cref(embedding.vectors)};
  const Eigen::MatrixXd probs = model.model.predict_proba(std::span<const SequenceRef>(input));
  std::array<double, kNumTags> out{};
  for (std::size_t i = 0; i < kNumTags; ++i) out[i] = probs(0, static_cast<Eigen::Index>(i));
  return out;
}

Tag classify(const TrainedModel& model, const WordEmbedding& embedding) {
  const auto probs = predict_proba(model, embedding);
  return argmax_tag(probs);
}

Tag classify(const TrainedModel& model, const EmbeddingBackend& backend, std::string_view word) {
  return classify(model, backend.embed_word(word));
}

}  // namespace kanglid
