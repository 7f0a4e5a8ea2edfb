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

#ifndef DIVCAP_PROMPTS_H_
#define DIVCAP_PROMPTS_H_

#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace divcap::augment {

enum class PromptFamily { kSummarization, kSimplification, kJoint };

std::string_view FamilyName(PromptFamily family);

// Requested lengths for the three summaries, at 1/7, 4/7 and 7/7 of the source
// word count.
struct WordTargets {
  std::size_t t1 = 0;
  std::size_t t4 = 0;
  std::size_t t7 = 0;

  bool operator==(const WordTargets&) const = default;
};

inline constexpr std::size_t kDefaultMinTarget = 5;

// t_l = max(min_target, floor(source_words * l / 7)) for l in {1, 4, 7}.
WordTargets ComputeWordTargets(std::size_t source_words,
                               std::size_t min_target = kDefaultMinTarget);

inline constexpr std::string_view kSummaryLabels[] = {"SUMMARY_1", "SUMMARY_4",
                                                      "SUMMARY_7"};
inline constexpr std::string_view kVersionLabels[] = {
    "VERSION_primary_school", "VERSION_secondary_school", "VERSION_university"};

std::vector<std::string> ExpectedLabels(PromptFamily family);

// Renders the batched prompt for one family. Summarization uses all three
// targets, simplification the full-length target t7, joint the short target
// t1. Throws Error(kEmptyParagraph).
std::string BuildPrompt(PromptFamily family, std::string_view paragraph,
                        const WordTargets& targets);

// Splits a labeled model response into sections. Labels may appear in any
// order and may be wrapped in markdown decoration; each section runs to the
// next expected label or the end of the body. Throws Error(kMissingLabel) or
// Error(kEmptySection) with the label as subject.
std::map<std::string, std::string> ParseLabeledResponse(
    std::string_view body, const std::vector<std::string>& expected_labels);

// What a prompt built by BuildPrompt asks for, recovered from its text.
struct PromptRequest {
  PromptFamily family;
  std::string paragraph;
  // Label -> requested word count, in prompt order.
  std::vector<std::pair<std::string, std::size_t>> sections;
};

// Throws Error(kUnrecognizedPrompt).
PromptRequest ParsePrompt(std::string_view prompt);

}  // namespace divcap::augment

#endif  // DIVCAP_PROMPTS_H_
