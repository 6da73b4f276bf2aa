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

#include "kanglid/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <nlohmann/json.hpp>

#include "kanglid/error.hpp"

namespace kanglid {
namespace {

using nlohmann::json;

constexpr char kMagic[8] = {'K', 'L', 'I', 'D', 'C', 'K', 'P', 'T'};
static_assert(std::endian::native == std::endian::little, "little-endian hosts only");

std::uint64_t fnv1a(const char* data, std::size_t size) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= static_cast<unsigned char>(data[i]);
    h *= 0x100000001b3ULL;
  }
  return h;
}

struct TensorView {
  const char* name;
  Eigen::Index rows;
  Eigen::Index cols;
  double* data;
};

template <typename M>
TensorView view(const char* name, M& m) {
  return {name, m.rows(), m.cols(), m.data()};
}

// Matrices are stored column-major (Eigen's default); only the order matters
// for round-tripping, so it is recorded but never converted.
std::vector<TensorView> tensors(Parameters& p) {
  return {view("lstm/input_kernel", p.input_kernel),
          view("lstm/recurrent_kernel", p.recurrent_kernel),
          view("lstm/bias", p.lstm_bias),
          view("norm/gamma", p.gamma),
          view("norm/beta", p.beta),
          view("norm/moving_mean", p.moving_mean),
          view("norm/moving_variance", p.moving_variance),
          view("dense/kernel", p.dense_kernel),
          view("dense/bias", p.dense_bias)};
}

const char* placement_name(DropoutPlacement p) {
  return p == DropoutPlacement::kAfterNorm ? "after_norm" : "before_norm";
}

json spec_to_json(const ModelSpec& s) {
  return {
      {"input_size", s.input_size},     {"lstm_hidden", s.lstm_hidden},
      {"dropout_rate", s.dropout_rate}, {"num_classes", s.num_classes},
      {"batch_norm", s.batch_norm},     {"dropout_placement", placement_name(s.dropout_placement)},
      {"max_subwords", s.max_subwords}, {"norm_momentum", s.norm_momentum},
      {"norm_epsilon", s.norm_epsilon}};
}

ModelSpec spec_from_json(const json& j) {
  ModelSpec s;
  s.input_size = j.at("input_size").get<std::size_t>();
  s.lstm_hidden = j.at("lstm_hidden").get<std::size_t>();
  s.dropout_rate = j.at("dropout_rate").get<double>();
  s.num_classes = j.at("num_classes").get<std::size_t>();
  s.batch_norm = j.at("batch_norm").get<bool>();
  const auto placement = j.at("dropout_placement").get<std::string>();
  if (placement == "after_norm") {
    s.dropout_placement = DropoutPlacement::kAfterNorm;
  } else if (placement == "before_norm") {
    s.dropout_placement = DropoutPlacement::kBeforeNorm;
  } else {
    throw Error(ErrorCode::kCorruptCheckpoint, "unknown dropout placement " + placement);
  }
  s.max_subwords = j.at("max_subwords").get<std::size_t>();
  s.norm_momentum = j.at("norm_momentum").get<double>();
  s.norm_epsilon = j.at("norm_epsilon").get<double>();
  return s;
}

json training_to_json(const TrainingConfig& c) {
  return {{"learning_rate", c.learning_rate},
          {"batch_size", c.batch_size},
          {"max_epochs", c.max_epochs},
          {"patience", c.patience},
          {"seed", c.seed},
          {"adam_beta1", c.adam_beta1},
          {"adam_beta2", c.adam_beta2},
          {"adam_epsilon", c.adam_epsilon}};
}

TrainingConfig training_from_json(const json& j) {
  TrainingConfig c;
  c.learning_rate = j.at("learning_rate").get<double>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.max_epochs = j.at("max_epochs").get<std::size_t>();
  c.patience = j.at("patience").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.adam_beta1 = j.at("adam_beta1").get<double>();
  c.adam_beta2 = j.at("adam_beta2").get<double>();
  c.adam_epsilon = j.at("adam_epsilon").get<double>();
  return c;
}

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(const std::string& in, std::size_t& pos) {
  if (in.size() - pos < sizeof(T)) throw Error(ErrorCode::kCorruptCheckpoint, "file is truncated");
  T value;
  std::memcpy(&value, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const TrainedModel& trained) {
  Parameters params = trained.model.parameters();
  std::string payload;
  json directory = json::array();
  for (const auto& t : tensors(params)) {
    const auto count = static_cast<std::size_t>(t.rows * t.cols);
    directory.push_back(
        {{"name", t.name}, {"rows", t.rows}, {"cols", t.cols}, {"offset", payload.size()}});
    payload.append(reinterpret_cast<const char*>(t.data), count * sizeof(double));
  }
  const json header = {{"format", "kanglid-checkpoint"},
                       {"model", spec_to_json(trained.model.spec())},
                       {"training", training_to_json(trained.training)},
                       {"scheme", trained.scheme.names()},
                       {"backend", trained.backend},
                       {"backend_hidden_size", trained.backend_hidden_size},
                       {"seed", trained.training.seed},
                       {"layout", "column-major"},
                       {"tensors", directory},
                       {"payload_bytes", payload.size()},
                       {"checksum", fmt::format("{:016x}", fnv1a(payload.data(), payload.size()))}};
  const std::string header_text = header.dump();

  std::string out(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kCheckpointVersion);
  put<std::uint64_t>(out, header_text.size());
  out += header_text;
  out += payload;

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

TrainedModel load_checkpoint(const std::filesystem::path& path, const TagScheme& expected) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::kMissingFile, path.string());
  const std::string in((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
  const auto corrupt = [&](const std::string& why) {
    return Error(ErrorCode::kCorruptCheckpoint, path.string() + ": " + why);
  };

  if (in.size() < sizeof(kMagic) || std::memcmp(in.data(), kMagic, sizeof(kMagic)) != 0) {
    throw corrupt("not a checkpoint file");
  }
  std::size_t pos = sizeof(kMagic);
  json header;
  std::size_t payload_start = 0;
  try {
    const auto version = take<std::uint32_t>(in, pos);
    if (version != kCheckpointVersion)
      throw corrupt(fmt::format("unsupported version {}", version));
    const auto header_len = take<std::uint64_t>(in, pos);
    if (in.size() - pos < header_len) throw corrupt("file is truncated");
    header = json::parse(in.begin() + static_cast<std::ptrdiff_t>(pos),
                         in.begin() + static_cast<std::ptrdiff_t>(pos + header_len));
    payload_start = pos + header_len;
  } catch (const json::exception& e) {
    throw corrupt(std::string("bad header: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCorruptCheckpoint) throw corrupt(e.what());
    throw;
  }

  try {
    const auto payload_bytes = header.at("payload_bytes").get<std::size_t>();
    if (in.size() - payload_start != payload_bytes) throw corrupt("payload size mismatch");
    const char* payload = in.data() + payload_start;
    if (header.at("checksum").get<std::string>() !=
        fmt::format("{:016x}", fnv1a(payload, payload_bytes))) {
      throw corrupt("checksum mismatch");
    }

    const TagScheme scheme(header.at("scheme").get<std::vector<std::string>>());
    if (!(scheme == expected)) {
      throw Error(ErrorCode::kSchemeMismatch,
                  fmt::format("checkpoint has {} tags ({}), expected {} ({})", scheme.size(),
                              fmt::join(scheme.names(), ","), expected.size(),
                              fmt::join(expected.names(), ",")));
    }

    const ModelSpec spec = spec_from_json(header.at("model"));
    try {
      spec.validate();
    } catch (const Error& e) {
      throw corrupt(e.what());
    }
    Model model(spec, 0);
    auto views = tensors(model.parameters());
    const auto& directory = header.at("tensors");
    if (directory.size() != views.size()) throw corrupt("tensor directory size mismatch");
    for (std::size_t i = 0; i < views.size(); ++i) {
      const auto& entry = directory[i];
      auto& t = views[i];
      if (entry.at("name").get<std::string>() != t.name ||
          entry.at("rows").get<Eigen::Index>() != t.rows ||
          entry.at("cols").get<Eigen::Index>() != t.cols) {
        throw corrupt(fmt::format("tensor {} does not match the model spec", t.name));
      }
      const auto offset = entry.at("offset").get<std::size_t>();
      const auto bytes = static_cast<std::size_t>(t.rows * t.cols) * sizeof(double);
      if (offset > payload_bytes || payload_bytes - offset < bytes) {
        throw corrupt(fmt::format("tensor {} runs past the payload", t.name));
      }
      std::memcpy(t.data, payload + offset, bytes);
    }

    TrainedModel out{std::move(model), header.at("backend").get<std::string>(),
                     header.at("backend_hidden_size").get<std::size_t>(), scheme,
                     training_from_json(header.at("training"))};
    return out;
  } catch (const json::exception& e) {
    throw corrupt(std::string("bad header: ") + e.what());
  }
}

}  // namespace kanglid
