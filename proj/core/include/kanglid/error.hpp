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

#include <stdexcept>
#include <string>
#include <string_view>

namespace kanglid {

// Every failure the library reports carries one of these codes. The numeric
// values double as the CLI's process exit codes and must stay stable.
enum class ErrorCode : int {
  kInvalidArgument = 2,

  kMissingFile = 10,
  kMalformedLine = 11,
  kUnknownTag = 12,
  kEmptyCorpus = 13,
  kStratumTooSmall = 14,
  kInvalidOneHot = 15,
  kIoError = 16,

  kUnknownBackend = 20,
  kWeightsUnavailable = 21,
  kEmptyWord = 22,
  kTokenizerProducedNothing = 23,
  kEmptyBatch = 24,
  kBackendConfigMismatch = 25,

  kInvalidSpec = 30,
  kEmptyDataset = 31,
  kNonFiniteLoss = 32,
  kBackendMismatch = 33,
  kCorruptCheckpoint = 34,
  kSchemeMismatch = 35,

  kLengthMismatch = 40,
  kEmptyMatrix = 41,

  kMalformedHistory = 50,
  kInvalidConfig = 51,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  int exit_code() const noexcept { return static_cast<int>(code_); }

 private:
  ErrorCode code_;
};

}  // namespace kanglid
