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

#ifndef DIVCAP_TEXTSTATS_H_
#define DIVCAP_TEXTSTATS_H_

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "divcap/caption.h"
#include "divcap/corpus.h"
#include "divcap/pool.h"
#include "divcap/text.h"
#include "json.hpp"

namespace divcap::textstats {

using divcap::Tokenize;

enum class PosTag { kNoun, kVerb, kOther };

std::string_view TagName(PosTag tag);

// Context-free tagger: exact word lookup, then the first matching suffix rule,
// then OTHER. Lookup is case-insensitive.
class PosLexicon {
 public:
  // Keeps an existing entry for the word.
  void AddWord(std::string_view word, PosTag tag);
  void AddSuffixRule(std::string_view suffix, PosTag tag);

  PosTag Tag(std::string_view word) const;
  std::size_t size() const { return words_.size(); }

  // Lexicon shipped with the library: a few thousand common caption words
  // with generated inflections, plus English derivational suffix rules.
  static const PosLexicon& Bundled();

  // TSV: "word<TAB>TAG" lines; a "#suffix" line switches to
  // "suffix<TAB>TAG" rules. Other lines starting with '#' are comments.
  // Throws Error(kMalformedLine).
  static PosLexicon FromTsv(std::istream& in);
  static PosLexicon LoadTsv(const std::string& path);

 private:
  std::unordered_map<std::string, PosTag> words_;
  std::vector<std::pair<std::string, PosTag>> suffix_rules_;
};

struct CaptionStats {
  std::size_t word_count = 0;
  double mean_word_len = 0.0;
  std::size_t unique_nouns = 0;
  std::size_t unique_verbs = 0;
};

CaptionStats ComputeCaptionStats(std::string_view text,
                                 const PosLexicon& lexicon);

struct KindRow {
  CaptionKind kind;
  double delta_nouns = 0.0;
  double delta_verbs = 0.0;
  double word_count = 0.0;
  double word_len = 0.0;
  std::size_t videos = 0;
};

struct DeltaReport {
  double source_word_count = 0.0;
  double source_word_len = 0.0;
  std::size_t source_videos = 0;
  std::vector<KindRow> rows;  // kGeneratedKinds order
  std::vector<std::string> missing_pools;
};

// Per generated kind, the mean over videos of the change in unique noun and
// verb counts relative to the source paragraph, plus mean word count and
// length. Videos are visited in id order, so the result does not depend on
// input order. Nouns and verbs are counted as surface forms.
DeltaReport ComputeDeltaReport(const std::vector<augment::CaptionPool>& pools,
                               const corpus::Dataset& dataset,
                               const PosLexicon& lexicon);

nlohmann::json DeltaReportToJson(const DeltaReport& report);

}  // namespace divcap::textstats

#endif  // DIVCAP_TEXTSTATS_H_
