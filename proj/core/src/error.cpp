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

#include "kanglid/error.hpp"

namespace kanglid {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return "InvalidArgument";
    case ErrorCode::kMissingFile:
      return "MissingFile";
    case ErrorCode::kMalformedLine:
      return "MalformedLine";
    case ErrorCode::kUnknownTag:
      return "UnknownTag";
    case ErrorCode::kEmptyCorpus:
      return "EmptyCorpus";
    case ErrorCode::kStratumTooSmall:
      return "StratumTooSmall";
    case ErrorCode::kInvalidOneHot:
      return "InvalidOneHot";
    case ErrorCode::kIoError:
      return "IoError";
    case ErrorCode::kUnknownBackend:
      return "UnknownBackend";
    case ErrorCode::kWeightsUnavailable:
      return "WeightsUnavailable";
    case ErrorCode::kEmptyWord:
      return "EmptyWord";
    case ErrorCode::kTokenizerProducedNothing:
      return "TokenizerProducedNothing";
    case ErrorCode::kEmptyBatch:
      return "EmptyBatch";
    case ErrorCode::kBackendConfigMismatch:
      return "BackendConfigMismatch";
    case ErrorCode::kInvalidSpec:
      return "InvalidSpec";
    case ErrorCode::kEmptyDataset:
      return "EmptyDataset";
    case ErrorCode::kNonFiniteLoss:
      return "NonFiniteLoss";
    case ErrorCode::kBackendMismatch:
      return "BackendMismatch";
    case ErrorCode::kCorruptCheckpoint:
      return "CorruptCheckpoint";
    case ErrorCode::kSchemeMismatch:
      return "SchemeMismatch";
    case ErrorCode::kLengthMismatch:
      return "LengthMismatch";
    case ErrorCode::kEmptyMatrix:
      return "EmptyMatrix";
    case ErrorCode::kMalformedHistory:
      return "MalformedHistory";
    case ErrorCode::kInvalidConfig:
      return "InvalidConfig";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

}  // namespace kanglid
