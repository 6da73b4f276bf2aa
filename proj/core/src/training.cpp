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

#include "kanglid/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <fmt/format.h>

#include "kanglid/error.hpp"
#include "kanglid/random.hpp"
#include "kanglid/text.hpp"

namespace kanglid {

std::vector<Tag> EncodedDataset::labels() const {
  std::vector<Tag> out;
  out.reserve(size());
  for (Eigen::Index r = 0; r < targets.rows(); ++r) {
    Eigen::Index idx;
    targets.row(r).maxCoeff(&idx);
    out.push_back(static_cast<Tag>(idx));
  }
  return out;
}

EncodedDataset make_dataset(std::vector<RowMatrixF> sequences, Eigen::MatrixXd targets) {
  if (targets.rows() != static_cast<Eigen::Index>(sequences.size()) ||
      targets.cols() != static_cast<Eigen::Index>(kNumTags)) {
    throw Error(ErrorCode::kInvalidArgument, "targets must have one six-wide row per sequence");
  }
  for (Eigen::Index r = 0; r < targets.rows(); ++r) {
    OneHot row{};
    for (std::size_t c = 0; c < kNumTags; ++c) {
      row[c] = static_cast<float>(targets(r, static_cast<Eigen::Index>(c)));
    }
    TagScheme::canonical().decode(row);
  }
  EncodedDataset out;
  out.sequences = std::move(sequences);
  out.targets = std::move(targets);
  return out;
}

EncodedDataset encode_dataset(const EmbeddingBackend& backend, const LabeledCorpus& corpus,
                              std::size_t max_subwords) {
  if (corpus.empty()) throw Error(ErrorCode::kEmptyDataset, "corpus is empty");
  EncodedDataset out;
  out.targets = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(corpus.size()),
                                      static_cast<Eigen::Index>(kNumTags));
  constexpr std::size_t kChunk = 64;
  const auto words = corpus.words();
  for (std::size_t start = 0; start < words.size(); start += kChunk) {
    const auto count = std::min(kChunk, words.size() - start);
    auto embedded = backend.embed_words(std::span<const std::string>(words).subspan(start, count));
    for (auto& emb : embedded) {
      if (static_cast<std::size_t>(emb.vectors.rows()) > max_subwords) ++out.truncated_words;
      out.sequences.push_back(truncate_rows(emb.vectors, max_subwords));
    }
  }
  const auto& scheme = TagScheme::canonical();
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto one_hot = scheme.encode(corpus.items[i].tag);
    for (std::size_t c = 0; c < kNumTags; ++c) {
      out.targets(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = one_hot[c];
    }
  }
  return out;
}

namespace {

std::vector<SequenceRef> gather(const EncodedDataset& data, std::span<const std::size_t> idx) {
  std::vector<SequenceRef> refs;
  refs.reserve(idx.size());
  for (auto i : idx) refs.emplace_back(data.sequences[i]);
  return refs;
}

Eigen::MatrixXd gather_targets(const EncodedDataset& data, std::span<const std::size_t> idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), data.targets.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) = data.targets.row(static_cast<Eigen::Index>(idx[r]));
  }
  return out;
}

template <typename T>
void zero_like(T& out, const T& shape) {
  out = T::Zero(shape.rows(), shape.cols());
}

template <typename T>
void adam_update(T& param, const T& grad, T& m, T& v, double lr_t, double b1, double b2,
                 double eps) {
  m = b1 * m + (1.0 - b1) * grad;
  v = b2 * v + (1.0 - b2) * grad.cwiseProduct(grad);
  param.array() -= lr_t * m.array() / (v.array().sqrt() + eps);
}

}  // namespace

DatasetMetrics evaluate_model(const Model& model, const EncodedDataset& data,
                              std::size_t batch_size) {
  if (data.size() == 0) throw Error(ErrorCode::kEmptyDataset, "cannot evaluate on no data");
  double loss = 0.0;
  std::size_t correct = 0;
  std::vector<std::size_t> idx(data.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t start = 0; start < idx.size(); start += batch_size) {
    const auto span =
        std::span<const std::size_t>(idx).subspan(start, std::min(batch_size, idx.size() - start));
    const auto refs = gather(data, span);
    const Eigen::MatrixXd probs = model.predict_proba(std::span<const SequenceRef>(refs));
    for (std::size_t r = 0; r < span.size(); ++r) {
      const auto row = static_cast<Eigen::Index>(r);
      const auto target = data.targets.row(static_cast<Eigen::Index>(span[r]));
      Eigen::Index gold, predicted;
      target.maxCoeff(&gold);
      probs.row(row).maxCoeff(&predicted);
      if (gold == predicted) ++correct;
      loss -= std::log(std::max(probs(row, gold), 1e-300));
    }
  }
  const auto n = static_cast<double>(data.size());
  return {loss / n, static_cast<double>(correct) / n};
}

AdamOptimizer::AdamOptimizer(const Parameters& shape, const TrainingConfig& config)
    : lr_(config.learning_rate),
      beta1_(config.adam_beta1),
      beta2_(config.adam_beta2),
      eps_(config.adam_epsilon) {
  for (Gradients* g : {&m_, &v_}) {
    zero_like(g->input_kernel, shape.input_kernel);
    zero_like(g->recurrent_kernel, shape.recurrent_kernel);
    zero_like(g->lstm_bias, shape.lstm_bias);
    zero_like(g->gamma, shape.gamma);
    zero_like(g->beta, shape.beta);
    zero_like(g->dense_kernel, shape.dense_kernel);
    zero_like(g->dense_bias, shape.dense_bias);
  }
}

void AdamOptimizer::step(Parameters& p, const Gradients& g) {
  ++t_;
  const double t = static_cast<double>(t_);
  const double lr_t = lr_ * std::sqrt(1.0 - std::pow(beta2_, t)) / (1.0 - std::pow(beta1_, t));
  adam_update(p.input_kernel, g.input_kernel, m_.input_kernel, v_.input_kernel, lr_t, beta1_,
              beta2_, eps_);
  adam_update(p.recurrent_kernel, g.recurrent_kernel, m_.recurrent_kernel, v_.recurrent_kernel,
              lr_t, beta1_, beta2_, eps_);
  adam_update(p.lstm_bias, g.lstm_bias, m_.lstm_bias, v_.lstm_bias, lr_t, beta1_, beta2_, eps_);
  if (p.gamma.size() > 0) {
    adam_update(p.gamma, g.gamma, m_.gamma, v_.gamma, lr_t, beta1_, beta2_, eps_);
    adam_update(p.beta, g.beta, m_.beta, v_.beta, lr_t, beta1_, beta2_, eps_);
  }
  adam_update(p.dense_kernel, g.dense_kernel, m_.dense_kernel, v_.dense_kernel, lr_t, beta1_,
              beta2_, eps_);
  adam_update(p.dense_bias, g.dense_bias, m_.dense_bias, v_.dense_bias, lr_t, beta1_, beta2_, eps_);
}

TrainingResult train(Model model, const EncodedDataset& train_data, const EncodedDataset& val_data,
                     const TrainingConfig& config, const TrainingHooks& hooks) {
  config.validate();
  if (train_data.size() == 0) throw Error(ErrorCode::kEmptyDataset, "training set is empty");
  if (val_data.size() == 0) throw Error(ErrorCode::kEmptyDataset, "validation set is empty");

  AdamOptimizer optimizer(model.parameters(), config);
  TrainingHistory history;
  Parameters best_params = model.parameters();
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  std::vector<std::size_t> order(train_data.size());
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(mix64(config.seed ^ mix64(epoch)));
    rng.shuffle(std::span<std::size_t>(order));

    double loss_sum = 0.0;
    std::size_t correct = 0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size, ++batch_index) {
      const auto idx = std::span<const std::size_t>(order).subspan(
          start, std::min(config.batch_size, order.size() - start));
      const auto refs = gather(train_data, idx);
      const auto targets = gather_targets(train_data, idx);
      const std::uint64_t dropout_seed = mix64(config.seed + 0x5DEECE66DULL * epoch + batch_index);
      auto step = model.forward_backward(std::span<const SequenceRef>(refs), targets, dropout_seed);
      if (!std::isfinite(step.loss)) {
        throw Error(ErrorCode::kNonFiniteLoss, fmt::format("loss diverged in epoch {}", epoch));
      }
      optimizer.step(model.parameters(), step.gradients);
      model.update_moving_statistics(step.batch_mean, step.batch_variance);
      loss_sum += step.loss * static_cast<double>(idx.size());
      correct += step.correct;
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = loss_sum / static_cast<double>(train_data.size());
    record.train_accuracy = static_cast<double>(correct) / static_cast<double>(train_data.size());
    const auto val = evaluate_model(model, val_data);
    record.val_loss = hooks.val_loss_override ? hooks.val_loss_override(epoch, val.loss) : val.loss;
    record.val_accuracy = val.accuracy;
    if (!std::isfinite(record.train_loss) || !std::isfinite(record.val_loss)) {
      throw Error(ErrorCode::kNonFiniteLoss, fmt::format("loss diverged in epoch {}", epoch));
    }
    history.epochs.push_back(record);
    history.stopped_epoch = epoch;
    if (hooks.on_epoch_end) hooks.on_epoch_end(record, model);

    if (record.val_loss < best_val) {
      best_val = record.val_loss;
      history.best_epoch = epoch;
      best_params = model.parameters();
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  model.parameters() = std::move(best_params);
  return {std::move(model), std::move(history)};
}

void write_history(const std::filesystem::path& path, const TrainingHistory& history) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << "# best_epoch=" << history.best_epoch << '\n';
  out << "# stopped_epoch=" << history.stopped_epoch << '\n';
  out << "epoch\ttrain_loss\tval_loss\ttrain_accuracy\tval_accuracy\n";
  for (const auto& r : history.epochs) {
    out << fmt::format("{}\t{:.17g}\t{:.17g}\t{:.17g}\t{:.17g}\n", r.epoch, r.train_loss,
                       r.val_loss, r.train_accuracy, r.val_accuracy);
  }
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

TrainingHistory read_history(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingFile, path.string());
  auto bad = [&](std::size_t line_no, const std::string& why) {
    return Error(ErrorCode::kMalformedHistory,
                 path.string() + ":" + std::to_string(line_no) + ": " + why);
  };
  TrainingHistory history;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    if (line.starts_with("#")) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const auto key = trim(std::string_view(line).substr(1, eq - 1));
      const auto value = std::string(trim(std::string_view(line).substr(eq + 1)));
      try {
        if (key == "best_epoch") history.best_epoch = std::stoul(value);
        if (key == "stopped_epoch") history.stopped_epoch = std::stoul(value);
      } catch (const std::exception&) {
        throw bad(line_no, "bad value for " + std::string(key));
      }
      continue;
    }
    if (!saw_header) {
      if (!line.starts_with("epoch\t")) throw bad(line_no, "missing column header");
      saw_header = true;
      continue;
    }
    const auto fields = split(line, '\t');
    if (fields.size() != 5) throw bad(line_no, "expected 5 columns");
    EpochRecord r;
    try {
      r.epoch = std::stoul(std::string(fields[0]));
      r.train_loss = std::stod(std::string(fields[1]));
      r.val_loss = std::stod(std::string(fields[2]));
      r.train_accuracy = std::stod(std::string(fields[3]));
      r.val_accuracy = std::stod(std::string(fields[4]));
    } catch (const std::exception&) {
      throw bad(line_no, "non-numeric field");
    }
    if (r.epoch != history.epochs.size() + 1)
      throw bad(line_no, "epochs must be consecutive from 1");
    history.epochs.push_back(r);
  }
  if (history.epochs.empty()) throw bad(line_no, "no epoch records");
  if (history.stopped_epoch == 0) history.stopped_epoch = history.epochs.back().epoch;
  if (history.best_epoch == 0) {
    const auto best =
        std::min_element(history.epochs.begin(), history.epochs.end(),
                         [](const auto& a, const auto& b) { return a.val_loss < b.val_loss; });
    history.best_epoch = best->epoch;
  }
  if (history.best_epoch > history.epochs.size()) throw bad(line_no, "best_epoch out of range");
  return history;
}

}  // namespace kanglid
