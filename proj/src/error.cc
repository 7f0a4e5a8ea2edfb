//
// Copyright 2026 The divcap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "divcap/error.h"

namespace divcap {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kMalformedLine: return "MalformedLine";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kDuplicateId: return "DuplicateId";
    case ErrorCode::kEmptyParagraph: return "EmptyParagraph";
    case ErrorCode::kMissingLabel: return "MissingLabel";
    case ErrorCode::kEmptySection: return "EmptySection";
    case ErrorCode::kBackendExhausted: return "BackendExhausted";
    case ErrorCode::kUnrecognizedPrompt: return "UnrecognizedPrompt";
    case ErrorCode::kTransport: return "Transport";
    case ErrorCode::kMissingPool: return "MissingPool";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kMissingTruth: return "MissingTruth";
    case ErrorCode::kMissingKind: return "MissingKind";
    case ErrorCode::kZeroFullRecall: return "ZeroFullRecall";
    case ErrorCode::kUnknownVideo: return "UnknownVideo";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kTooFewRows: return "TooFewRows";
    case ErrorCode::kInsufficientVideos: return "InsufficientVideos";
    case ErrorCode::kNoProbeWords: return "NoProbeWords";
    case ErrorCode::kUnknownItem: return "UnknownItem";
    case ErrorCode::kIncompleteAnswer: return "IncompleteAnswer";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, std::string subject, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code),
      subject_(std::move(subject)) {}

}  // namespace divcap
