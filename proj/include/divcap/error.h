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

#ifndef DIVCAP_ERROR_H_
#define DIVCAP_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace divcap {

enum class ErrorCode {
  kInvalidArgument,
  kIo,
  // corpus
  kMalformedLine,
  kInvariantViolation,
  kDuplicateId,
  // augment
  kEmptyParagraph,
  kMissingLabel,
  kEmptySection,
  kBackendExhausted,
  kUnrecognizedPrompt,
  kTransport,
  kMissingPool,
  // retrieval
  kBadMagic,
  kDimMismatch,
  kTruncatedFile,
  kMissingTruth,
  kMissingKind,
  kZeroFullRecall,
  kUnknownVideo,
  // train
  kNonFiniteLoss,
  // survey
  kTooFewRows,
  kInsufficientVideos,
  kNoProbeWords,
  kUnknownItem,
  kIncompleteAnswer,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure the library reports carries a code and, where one applies, the
// subject it concerns (a video id, a label, a dataset name).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string subject, const std::string& message);
  Error(ErrorCode code, const std::string& message)
      : Error(code, std::string(), message) {}

  ErrorCode code() const { return code_; }
  const std::string& subject() const { return subject_; }

 private:
  ErrorCode code_;
  std::string subject_;
};

}  // namespace divcap

#endif  // DIVCAP_ERROR_H_
