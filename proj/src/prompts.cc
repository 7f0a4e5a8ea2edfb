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

#include "divcap/prompts.h"

#include <algorithm>
#include <cctype>
#include <regex>

#include "divcap/error.h"
#include "divcap/text.h"

namespace divcap::augment {
namespace {

constexpr std::string_view kSummarizationIntro =
    "You are a helpful writing assistant, with a speciality in summarizing "
    "text-based scene descriptions. You will be asked to write 3 summaries of "
    "the scene described in the following paragraph, indicated by PARAGRAPH. ";

constexpr std::string_view kSimplificationIntro =
    "You are a helpful writing assistant, with a speciality in simplifying "
    "and rewriting descriptions for different age groups and reading levels. "
    "You will be asked to write 3 versions of the scene described in the "
    "following paragraph, indicated by PARAGRAPH. ";

constexpr std::string_view kJointIntroHead =
    "You are a helpful writing assistant, with a speciality in summarizing "
    "text-based scene descriptions. You also have a speciality in simplifying "
    "and rewriting descriptions for different age groups and reading levels. "
    "You will be asked to use ";
constexpr std::string_view kJointIntroTail =
    " words to write 3 summaries of the scene described in the following "
    "paragraph, indicated by PARAGRAPH. ";

constexpr std::string_view kRules =
    "Do not modify the indicated order of events. Prioritize visual details. "
    "Do not hallucinate. Do not describe objects or events that do not appear "
    "in the original paragraph. PARAGRAPH: ";

constexpr std::string_view kReadingLevels[] = {
    "primary school", "secondary school", "university"};

std::string LengthClause(std::size_t n) {
  const std::string w = std::to_string(n);
  return " Do not use more or less than " + w +
         " words. Without using more than " + w +
         " words, write complete sentences.";
}

bool IsLabelChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

// Position of `label` as a standalone token at or after `from`.
std::size_t FindLabel(std::string_view body, std::string_view label,
                      std::size_t from = 0) {
  while (true) {
    std::size_t pos = body.find(label, from);
    if (pos == std::string_view::npos) return pos;
    const bool left_ok = pos == 0 || !IsLabelChar(body[pos - 1]);
    const std::size_t end = pos + label.size();
    const bool right_ok = end == body.size() || !IsLabelChar(body[end]);
    if (left_ok && right_ok) return pos;
    from = pos + 1;
  }
}

bool IsSeparator(char c) {
  return std::isspace(static_cast<unsigned char>(c)) || c == ':' || c == '-' ||
         c == '*' || c == '#' || c == '=' || c == '>' || c == '_' || c == '`' ||
         c == '|';
}

bool IsTrailingDecoration(char c) {
  return std::isspace(static_cast<unsigned char>(c)) || c == '*' || c == '#' ||
         c == '`' || c == '|' || c == '-' || c == '=' || c == '>';
}

constexpr std::string_view kQuotePairs[][2] = {
    {"\"", "\""}, {"'", "'"}, {"\xE2\x80\x9C", "\xE2\x80\x9D"},
    {"\xE2\x80\x98", "\xE2\x80\x99"}};

std::string_view CleanSection(std::string_view s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && IsSeparator(s[begin])) ++begin;
  while (end > begin && IsTrailingDecoration(s[end - 1])) --end;
  s = s.substr(begin, end - begin);
  for (const auto& pair : kQuotePairs) {
    if (s.size() >= pair[0].size() + pair[1].size() &&
        s.starts_with(pair[0]) && s.ends_with(pair[1])) {
      s = Trim(s.substr(pair[0].size(),
                        s.size() - pair[0].size() - pair[1].size()));
      break;
    }
  }
  return s;
}

}  // namespace

std::string_view FamilyName(PromptFamily family) {
  switch (family) {
    case PromptFamily::kSummarization: return "summarization";
    case PromptFamily::kSimplification: return "simplification";
    case PromptFamily::kJoint: return "joint";
  }
  return "?";
}

WordTargets ComputeWordTargets(std::size_t source_words,
                               std::size_t min_target) {
  auto target = [&](std::size_t l) {
    return std::max(min_target, source_words * l / 7);
  };
  return {target(1), target(4), target(7)};
}

std::vector<std::string> ExpectedLabels(PromptFamily family) {
  std::vector<std::string> labels;
  if (family == PromptFamily::kSummarization) {
    for (auto l : kSummaryLabels) labels.emplace_back(l);
  } else {
    for (auto l : kVersionLabels) labels.emplace_back(l);
  }
  return labels;
}

std::string BuildPrompt(PromptFamily family, std::string_view paragraph,
                        const WordTargets& targets) {
  paragraph = Trim(paragraph);
  if (paragraph.empty()) {
    throw Error(ErrorCode::kEmptyParagraph, "paragraph is empty");
  }
  std::string prompt;
  switch (family) {
    case PromptFamily::kSummarization: {
      prompt.append(kSummarizationIntro).append(kRules).append(paragraph);
      prompt.append(".");
      const std::size_t counts[] = {targets.t1, targets.t4, targets.t7};
      for (int k = 0; k < 3; ++k) {
        const std::string n = std::to_string(counts[k]);
        prompt.append("\nLabel this summary as ")
            .append(kSummaryLabels[k])
            .append(". For this summary, please write ")
            .append(n)
            .append(" words which summarize the scene described by the "
                    "PARAGRAPH.")
            .append(LengthClause(counts[k]));
      }
      break;
    }
    case PromptFamily::kSimplification: {
      prompt.append(kSimplificationIntro).append(kRules).append(paragraph);
      prompt.append(".");
      for (int k = 0; k < 3; ++k) {
        prompt.append("\nLabel this version as ")
            .append(kVersionLabels[k])
            .append(". For this version, rewrite the PARAGRAPH with ")
            .append(std::to_string(targets.t7))
            .append(" words to make it suitable for a ")
            .append(kReadingLevels[k])
            .append(" reading level.");
      }
      break;
    }
    case PromptFamily::kJoint: {
      prompt.append(kJointIntroHead)
          .append(std::to_string(targets.t1))
          .append(kJointIntroTail)
          .append(kRules)
          .append(paragraph);
      prompt.append(".");
      for (int k = 0; k < 3; ++k) {
        prompt.append("\nLabel this version as ")
            .append(kVersionLabels[k])
            .append(". For this version, rewrite the PARAGRAPH with ")
            .append(std::to_string(targets.t1))
            .append(" words to make it suitable for a ")
            .append(kReadingLevels[k])
            .append(" reading level.")
            .append(LengthClause(targets.t1));
      }
      break;
    }
  }
  return prompt;
}

std::map<std::string, std::string> ParseLabeledResponse(
    std::string_view body, const std::vector<std::string>& expected_labels) {
  if (expected_labels.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no expected labels");
  }
  struct Marker {
    std::size_t pos;
    std::size_t end;
    const std::string* label;
  };
  std::vector<Marker> markers;
  for (const std::string& label : expected_labels) {
    std::size_t pos = FindLabel(body, label);
    if (pos == std::string_view::npos) {
      throw Error(ErrorCode::kMissingLabel, label,
                  "response lacks label " + label);
    }
    markers.push_back({pos, pos + label.size(), &label});
  }
  std::sort(markers.begin(), markers.end(),
            [](const Marker& a, const Marker& b) { return a.pos < b.pos; });
  std::map<std::string, std::string> sections;
  for (std::size_t k = 0; k < markers.size(); ++k) {
    const std::size_t stop =
        k + 1 < markers.size() ? markers[k + 1].pos : body.size();
    std::string_view text =
        CleanSection(body.substr(markers[k].end, stop - markers[k].end));
    if (text.empty()) {
      throw Error(ErrorCode::kEmptySection, *markers[k].label,
                  "section " + *markers[k].label + " is empty");
    }
    sections.emplace(*markers[k].label, std::string(text));
  }
  return sections;
}

PromptRequest ParsePrompt(std::string_view prompt) {
  PromptRequest request;
  if (prompt.starts_with(kSummarizationIntro)) {
    request.family = PromptFamily::kSummarization;
  } else if (prompt.starts_with(kSimplificationIntro)) {
    request.family = PromptFamily::kSimplification;
  } else if (prompt.starts_with(kJointIntroHead)) {
    request.family = PromptFamily::kJoint;
  } else {
    throw Error(ErrorCode::kUnrecognizedPrompt, "unknown prompt preamble");
  }
  const std::size_t para = prompt.find(kRules);
  const std::size_t first_label = prompt.find("\nLabel this ");
  if (para == std::string_view::npos || first_label == std::string_view::npos ||
      first_label < para + kRules.size() + 1) {
    throw Error(ErrorCode::kUnrecognizedPrompt, "no PARAGRAPH section");
  }
  const std::size_t begin = para + kRules.size();
  // The template closes the paragraph slot with a period.
  request.paragraph = std::string(prompt.substr(begin, first_label - begin - 1));

  static const std::regex kLine(
      R"(Label this (?:summary|version) as ([A-Za-z0-9_]+)\. For this )"
      R"((?:summary, please write|version, rewrite the PARAGRAPH with) )"
      R"((\d+) words)");
  const std::string tail(prompt.substr(first_label));
  for (auto it = std::sregex_iterator(tail.begin(), tail.end(), kLine);
       it != std::sregex_iterator(); ++it) {
    request.sections.emplace_back((*it)[1].str(),
                                  std::stoul((*it)[2].str()));
  }
  if (request.sections.size() != 3) {
    throw Error(ErrorCode::kUnrecognizedPrompt, "expected 3 labeled sections");
  }
  return request;
}

}  // namespace divcap::augment
