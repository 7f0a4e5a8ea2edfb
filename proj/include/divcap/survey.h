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

#ifndef DIVCAP_SURVEY_H_
#define DIVCAP_SURVEY_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "divcap/caption.h"
#include "divcap/corpus.h"
#include "divcap/embeddings.h"
#include "divcap/pool.h"
#include "divcap/textstats.h"
#include "json.hpp"

namespace divcap::survey {

enum class Section { kMeaning, kSimplify, kHalluc };
std::string_view SectionName(Section s);
Section ParseSection(std::string_view name);  // Error(kInvalidArgument)

enum class Source { kActual, kNeighbor, kRandom };
std::string_view SourceName(Source s);

enum class Label { kDifferent, kUnsure, kMatches };
std::string_view LabelName(Label l);
std::optional<Label> ParseLabel(std::string_view name);

inline constexpr std::size_t kItemsPerSection = 5;
inline constexpr std::size_t kItemsPerVersion = 3 * kItemsPerSection;
inline constexpr std::size_t kMaxProbeWords = 3;

// What annotators see. Hidden tags live only in SurveyItem::key.
struct MeaningPayload {
  std::string paragraph;
  std::array<std::string, 3> candidates;
};

struct SimplifyPayload {
  std::string paragraph;
  std::array<std::string, 3> captions;
};

struct HallucPayload {
  std::string original;
  std::string generated;
  std::vector<std::string> probe_words;
};

// Hidden answer key of one item.
struct ItemKey {
  std::array<Source, 3> sources{};          // meaning, per candidate
  std::array<CaptionKind, 3> levels{};      // simplify, per caption
  CaptionKind generated_kind = CaptionKind::kL;  // meaning and halluc
  std::string neighbor_id;                  // meaning
  std::string random_id;                    // meaning
};

struct SurveyItem {
  std::string item_id;
  Section section = Section::kMeaning;
  std::string video_id;
  MeaningPayload meaning;
  SimplifyPayload simplify;
  HallucPayload halluc;
  ItemKey key;
};

struct SurveyDoc {
  int version_id = 1;
  std::vector<SurveyItem> items;
  bool has_keys = false;
};

// Nearest other row by cosine similarity; ties go to the lexicographically
// smallest id. Throws Error(kTooFewRows) for fewer than 2 rows and
// Error(kUnknownVideo) for an id not in the table.
std::string NearestNeighbor(const EmbeddingTable& table, std::string_view id);
std::map<std::string, std::string> NearestNeighbors(const EmbeddingTable& table);

// Distinct nouns and verbs of `generated`, in order of first appearance, whose
// tokens do not occur in `source`; at most `max` of them.
std::vector<std::string> ProbeWords(std::string_view source,
                                    std::string_view generated,
                                    const textstats::PosLexicon& lexicon,
                                    std::size_t max = kMaxProbeWords);

struct MakeOptions {
  int versions = 5;
  std::uint64_t seed = 0;
};

// Builds `versions` documents of 5 meaning, 5 simplify and 5 halluc items,
// each on a different video. Halluc candidates without probe words are
// replaced by another unused video. `gt_embeddings` holds one row per
// video_id. Throws Error(kInsufficientVideos).
std::vector<SurveyDoc> MakeSurveys(const corpus::Dataset& dataset,
                                   const std::vector<augment::CaptionPool>& pools,
                                   const EmbeddingTable& gt_embeddings,
                                   const textstats::PosLexicon& lexicon,
                                   const MakeOptions& options);

// Public form: {version_id, items: [{item_id, section, payload}]}.
nlohmann::json SurveyToPublicJson(const SurveyDoc& doc);
// Key form: {version_id, items: [{item_id, section, video_id, ...tags}]}.
nlohmann::json SurveyToKeyJson(const SurveyDoc& doc);
// Rebuilds a document from its public form and, when given, its key form.
SurveyDoc SurveyFromJson(const nlohmann::json& public_json,
                         const nlohmann::json* key_json);

// survey_v<N>.json files in `dir` (public) and key_v<N>.json (keys).
void WriteSurveys(const std::vector<SurveyDoc>& docs,
                  const std::string& survey_dir, const std::string& key_dir);
// Keys are attached when key_dir is non-empty.
std::vector<SurveyDoc> LoadSurveys(const std::string& survey_dir,
                                   const std::string& key_dir);

struct ResponseRecord {
  std::string annotator_id;
  int version_id = 0;
  std::string item_id;
  // Meaning and halluc: labels. Simplify: ranks, 1 = simplest.
  std::vector<Label> labels;
  std::vector<int> ranks;
  std::string timestamp;
};

// Parses and checks a record against the survey it names. Throws
// Error(kUnknownItem) or Error(kIncompleteAnswer); other shape problems are
// Error(kInvalidArgument).
ResponseRecord ParseResponse(const nlohmann::json& j,
                             const std::vector<SurveyDoc>& surveys);
nlohmann::json ResponseToJson(const ResponseRecord& r);
void ValidateResponse(const ResponseRecord& r,
                      const std::vector<SurveyDoc>& surveys);
std::vector<ResponseRecord> ReadResponses(const std::string& path,
                                          const std::vector<SurveyDoc>& surveys);

const SurveyItem* FindItem(const std::vector<SurveyDoc>& surveys,
                           int version_id, std::string_view item_id);

// Percentages over three columns, rounded to two decimals with the largest
// remainder method so a non-empty row sums to exactly 100.
struct Distribution {
  std::array<std::size_t, 3> counts{};
  std::size_t n() const { return counts[0] + counts[1] + counts[2]; }
  std::array<double, 3> Percent() const;
};

struct Unanimity {
  std::size_t items = 0;     // items with at least two responses
  std::size_t all = 0;       // every sub-answer identical across annotators
  std::size_t any = 0;       // at least one sub-answer identical
};

struct AgreementReport {
  std::size_t responses = 0;
  std::map<Source, Distribution> meaning;         // Different/Unsure/Matches
  std::map<CaptionKind, Distribution> simplify;   // Simplest/Middle/Most complex
  Distribution halluc_total;
  Distribution halluc_majority;  // one vote per word; ties count as Unsure
  std::map<Section, Unanimity> unanimous;
};

// Order of `responses` does not matter. Keys must be attached. Throws
// Error(kUnknownItem), Error(kIncompleteAnswer), and Error(kInvalidArgument)
// for a repeated (annotator, item) pair or missing keys.
AgreementReport Aggregate(const std::vector<ResponseRecord>& responses,
                          const std::vector<SurveyDoc>& surveys);

// Chance that `annotators` answering uniformly over three labels agree.
double RandomUnanimity(std::size_t annotators);

nlohmann::json ReportToJson(const AgreementReport& report);
// Two-space indented JSON with a trailing newline.
std::string ReportText(const AgreementReport& report);

}  // namespace divcap::survey

#endif  // DIVCAP_SURVEY_H_
