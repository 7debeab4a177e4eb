// Copyright 2026 The decompkit Authors
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

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace decompkit {

enum class ErrorCode {
  kMissingField,
  kUnparseableDate,
  kEmptyText,
  kDuplicateId,
  kMalformedJson,
  kIoError,
  kInvalidArgument,
  kDimensionMismatch,
  kZeroVector,
  kBackendUnavailable,
  kProtocolError,
  kEmptyCorpus,
  kTooFewTokens,
  kEmptyInput,
  kMissingVectors,
  kEmptyGeneration,
  kInvalidLabel,
  kChainFailed,
  kNoChains,
  kBadScript,
  kPortInUse,
};

inline constexpr std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingField: return "MissingField";
    case ErrorCode::kUnparseableDate: return "UnparseableDate";
    case ErrorCode::kEmptyText: return "EmptyText";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kMalformedJson: return "MalformedJson";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kProtocolError: return "ProtocolError";
    case ErrorCode::kEmptyCorpus: return "EmptyCorpus";
    case ErrorCode::kTooFewTokens: return "TooFewTokens";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kMissingVectors: return "MissingVectors";
    case ErrorCode::kEmptyGeneration: return "EmptyGeneration";
    case ErrorCode::kInvalidLabel: return "InvalidLabel";
    case ErrorCode::kChainFailed: return "ChainFailed";
    case ErrorCode::kNoChains: return "NoChains";
    case ErrorCode::kBadScript: return "BadScript";
    case ErrorCode::kPortInUse: return "PortInUse";
  }
  return "Unknown";
}

// Single exception type for the library. `field` names the offending input
// field for validation errors; `step` is set for ChainFailed.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::string field = {},
        std::optional<int> step = std::nullopt)
      : std::runtime_error(format(code, message, field)),
        code_(code),
        detail_(std::move(message)),
        field_(std::move(field)),
        step_(step) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view code_name() const noexcept { return error_code_name(code_); }
  const std::string& detail() const noexcept { return detail_; }
  const std::string& field() const noexcept { return field_; }
  std::optional<int> step() const noexcept { return step_; }

 private:
  static std::string format(ErrorCode code, const std::string& message,
                            const std::string& field) {
    std::string out(error_code_name(code));
    if (!field.empty()) out += "(" + field + ")";
    if (!message.empty()) out += ": " + message;
    return out;
  }

  ErrorCode code_;
  std::string detail_;
  std::string field_;
  std::optional<int> step_;
};

}  // namespace decompkit
