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

#include "run_config.hpp"

#include <charconv>
#include <fstream>
#include <functional>

#include <fmt/format.h>

#include "kanglid/error.hpp"
#include "kanglid/text.hpp"

namespace kanglid::cli {
namespace {

Error bad_value(const std::string& key, const std::string& value, const char* expected) {
  return Error(ErrorCode::kInvalidConfig,
               fmt::format("{}: expected {}, got '{}'", key, expected, value));
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw bad_value(key, v, "an unsigned integer");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used == v.size()) return out;
  } catch (const std::exception&) {
  }
  throw bad_value(key, v, "a number");
}

bool to_bool(const std::string& key, const std::string& v) {
  const auto lower = ascii_lower(v);
  if (lower == "true" || lower == "1" || lower == "yes" || lower == "on") return true;
  if (lower == "false" || lower == "0" || lower == "no" || lower == "off") return false;
  throw bad_value(key, v, "a boolean");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"train_file", [](RunConfig& c, auto&, auto& v) { c.train_file = v; }},
      {"test_file", [](RunConfig& c, auto&, auto& v) { c.test_file = v; }},
      {"output_dir", [](RunConfig& c, auto&, auto& v) { c.output_dir = v; }},
      {"weights_cache", [](RunConfig& c, auto&, auto& v) { c.weights_cache = v; }},
      {"backend", [](RunConfig& c, auto&, auto& v) { c.backend = v; }},
      {"seed", [](RunConfig& c, auto& k, auto& v) { c.training.seed = to_u64(k, v); }},
      {"val_fraction", [](RunConfig& c, auto& k, auto& v) { c.val_fraction = to_double(k, v); }},
      {"stratified", [](RunConfig& c, auto& k, auto& v) { c.stratified = to_bool(k, v); }},
      {"label_set",
       [](RunConfig& c, auto& k, auto& v) {
         try {
           c.label_set = parse_label_set(v);
         } catch (const Error&) {
           throw bad_value(k, v, "present-in-gold or all-six");
         }
       }},
      {"lstm_hidden", [](RunConfig& c, auto& k, auto& v) { c.model.lstm_hidden = to_u64(k, v); }},
      {"dropout_rate",
       [](RunConfig& c, auto& k, auto& v) { c.model.dropout_rate = to_double(k, v); }},
      {"batch_norm", [](RunConfig& c, auto& k, auto& v) { c.model.batch_norm = to_bool(k, v); }},
      {"dropout_placement",
       [](RunConfig& c, auto& k, auto& v) {
         if (v == "after_norm") {
           c.model.dropout_placement = DropoutPlacement::kAfterNorm;
         } else if (v == "before_norm") {
           c.model.dropout_placement = DropoutPlacement::kBeforeNorm;
         } else {
           throw bad_value(k, v, "after_norm or before_norm");
         }
       }},
      {"max_subwords", [](RunConfig& c, auto& k, auto& v) { c.model.max_subwords = to_u64(k, v); }},
      {"norm_momentum",
       [](RunConfig& c, auto& k, auto& v) { c.model.norm_momentum = to_double(k, v); }},
      {"norm_epsilon",
       [](RunConfig& c, auto& k, auto& v) { c.model.norm_epsilon = to_double(k, v); }},
      {"learning_rate",
       [](RunConfig& c, auto& k, auto& v) { c.training.learning_rate = to_double(k, v); }},
      {"batch_size", [](RunConfig& c, auto& k, auto& v) { c.training.batch_size = to_u64(k, v); }},
      {"max_epochs", [](RunConfig& c, auto& k, auto& v) { c.training.max_epochs = to_u64(k, v); }},
      {"patience", [](RunConfig& c, auto& k, auto& v) { c.training.patience = to_u64(k, v); }},
      {"adam_beta1",
       [](RunConfig& c, auto& k, auto& v) { c.training.adam_beta1 = to_double(k, v); }},
      {"adam_beta2",
       [](RunConfig& c, auto& k, auto& v) { c.training.adam_beta2 = to_double(k, v); }},
      {"adam_epsilon",
       [](RunConfig& c, auto& k, auto& v) { c.training.adam_epsilon = to_double(k, v); }},
  };
  return table;
}

}  // namespace

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kMissingFile, "config file " + path.string());
  KeyValues out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const auto body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::kInvalidConfig,
                  fmt::format("{}:{}: expected key = value", path.string(), line_no));
    }
    const std::string key(trim(body.substr(0, eq)));
    if (key.empty()) {
      throw Error(ErrorCode::kInvalidConfig,
                  fmt::format("{}:{}: empty key", path.string(), line_no));
    }
    out[key] = std::string(trim(body.substr(eq + 1)));
  }
  return out;
}

void apply_config(RunConfig& config, const KeyValues& values) {
  const auto& table = setters();
  for (const auto& [key, value] : values) {
    const auto it = table.find(key);
    if (it == table.end())
      throw Error(ErrorCode::kInvalidConfig, "unknown config key '" + key + "'");
    it->second(config, key, value);
  }
}

std::string to_text(const RunConfig& c) {
  const auto placement =
      c.model.dropout_placement == DropoutPlacement::kAfterNorm ? "after_norm" : "before_norm";
  std::string out = "# resolved run configuration\n";
  out += fmt::format("train_file = {}\n", c.train_file.string());
  out += fmt::format("test_file = {}\n", c.test_file.string());
  out += fmt::format("output_dir = {}\n", c.output_dir.string());
  out += fmt::format("weights_cache = {}\n", c.weights_cache.string());
  out += fmt::format("backend = {}\n", c.backend);
  out += fmt::format("seed = {}\n", c.training.seed);
  out += fmt::format("val_fraction = {:.17g}\n", c.val_fraction);
  out += fmt::format("stratified = {}\n", c.stratified);
  out += fmt::format("label_set = {}\n", label_set_name(c.label_set));
  out += fmt::format("lstm_hidden = {}\n", c.model.lstm_hidden);
  out += fmt::format("dropout_rate = {:.17g}\n", c.model.dropout_rate);
  out += fmt::format("batch_norm = {}\n", c.model.batch_norm);
  out += fmt::format("dropout_placement = {}\n", placement);
  out += fmt::format("max_subwords = {}\n", c.model.max_subwords);
  out += fmt::format("norm_momentum = {:.17g}\n", c.model.norm_momentum);
  out += fmt::format("norm_epsilon = {:.17g}\n", c.model.norm_epsilon);
  out += fmt::format("learning_rate = {:.17g}\n", c.training.learning_rate);
  out += fmt::format("batch_size = {}\n", c.training.batch_size);
  out += fmt::format("max_epochs = {}\n", c.training.max_epochs);
  out += fmt::format("patience = {}\n", c.training.patience);
  out += fmt::format("adam_beta1 = {:.17g}\n", c.training.adam_beta1);
  out += fmt::format("adam_beta2 = {:.17g}\n", c.training.adam_beta2);
  out += fmt::format("adam_epsilon = {:.17g}\n", c.training.adam_epsilon);
  return out;
}

}  // namespace kanglid::cli
