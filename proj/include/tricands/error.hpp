// Copyright 2026 The tricands Authors. All Rights Reserved.
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
// =============================================================================

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tricands {

enum class ErrorCode {
  DimensionTooSmall,
  DegenerateInput,
  TriangulationFailed,
  DegenerateSimplex,
  NormalDegenerate,
  BadIndex,
  TooFewPoints,
  SingularKernel,
  FitFailed,
  CovNotPSD,
  EmptyCandidates,
  DimensionMismatch,
  UnknownBenchmark,
  UnknownStrategy,
  MissingStrategy,
  ConfigError,
  IoError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::TriangulationFailed: return "TriangulationFailed";
    case ErrorCode::DegenerateSimplex: return "DegenerateSimplex";
    case ErrorCode::NormalDegenerate: return "NormalDegenerate";
    case ErrorCode::BadIndex: return "BadIndex";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::SingularKernel: return "SingularKernel";
    case ErrorCode::FitFailed: return "FitFailed";
    case ErrorCode::CovNotPSD: return "CovNotPSD";
    case ErrorCode::EmptyCandidates: return "EmptyCandidates";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::UnknownBenchmark: return "UnknownBenchmark";
    case ErrorCode::UnknownStrategy: return "UnknownStrategy";
    case ErrorCode::MissingStrategy: return "MissingStrategy";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI exit-code mapping) can dispatch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// The text without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace tricands
