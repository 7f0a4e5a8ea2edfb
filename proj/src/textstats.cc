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

#include "divcap/textstats.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "divcap/error.h"

namespace divcap::textstats {
namespace internal {
extern const std::string_view kLexiconBase;
}  // namespace internal

namespace {

bool IsVowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

bool EndsWith(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.ends_with(suffix);
}

std::string PluralOrThirdPerson(const std::string& w) {
  if (EndsWith(w, "s") || EndsWith(w, "x") || EndsWith(w, "z") ||
      EndsWith(w, "ch") || EndsWith(w, "sh")) {
    return w + "es";
  }
  if (w.size() > 1 && w.back() == 'y' && !IsVowel(w[w.size() - 2])) {
    return w.substr(0, w.size() - 1) + "ies";
  }
  return w + "s";
}

// Short consonant-vowel-consonant stems double their final consonant
// (stop -> stopping).
bool DoublesFinal(const std::string& w) {
  if (w.size() < 3 || w.size() > 4) return false;
  const char a = w[w.size() - 3], b = w[w.size() - 2], c = w.back();
  return !IsVowel(a) && IsVowel(b) && !IsVowel(c) && c != 'w' && c != 'x' &&
         c != 'y';
}

std::string Gerund(const std::string& w) {
  if (EndsWith(w, "ie")) return w.substr(0, w.size() - 2) + "ying";
  if (EndsWith(w, "e") && !EndsWith(w, "ee") && !EndsWith(w, "ye") &&
      !EndsWith(w, "oe") && w.size() > 2) {
    return w.substr(0, w.size() - 1) + "ing";
  }
  if (DoublesFinal(w)) return w + w.back() + "ing";
  return w + "ing";
}

std::string Past(const std::string& w) {
  if (EndsWith(w, "e")) return w + "d";
  if (w.size() > 1 && w.back() == 'y' && !IsVowel(w[w.size() - 2])) {
    return w.substr(0, w.size() - 1) + "ied";
  }
  if (DoublesFinal(w)) return w + w.back() + "ed";
  return w + "ed";
}

std::optional<PosTag> ParseTag(std::string_view name) {
  const std::string upper = [&] {
    std::string s(name);
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
  }();
  if (upper == "NOUN") return PosTag::kNoun;
  if (upper == "VERB") return PosTag::kVerb;
  if (upper == "OTHER") return PosTag::kOther;
  return std::nullopt;
}

PosLexicon BuildBundled() {
  PosLexicon lexicon;
  std::vector<std::pair<PosTag, std::vector<std::string>>> sections;
  std::istringstream in{std::string(internal::kLexiconBase)};
  std::string line;
  while (std::getline(in, line)) {
    std::string_view trimmed = Trim(line);
    if (trimmed.empty() || trimmed.front() == '#') continue;
    if (trimmed.front() == '[' && trimmed.back() == ']') {
      sections.emplace_back(*ParseTag(trimmed.substr(1, trimmed.size() - 2)),
                            std::vector<std::string>{});
      continue;
    }
    for (std::string_view w : SplitWhitespace(trimmed)) {
      sections.back().second.push_back(ToLower(w));
    }
  }
  for (const auto& [tag, words] : sections) {
    for (const std::string& w : words) lexicon.AddWord(w, tag);
  }
  for (const auto& [tag, words] : sections) {
    for (const std::string& w : words) {
      if (tag == PosTag::kNoun) {
        lexicon.AddWord(PluralOrThirdPerson(w), tag);
      } else if (tag == PosTag::kVerb) {
        lexicon.AddWord(PluralOrThirdPerson(w), tag);
        lexicon.AddWord(Gerund(w), tag);
        lexicon.AddWord(Past(w), tag);
      }
    }
  }
  constexpr std::pair<const char*, PosTag> kSuffixes[] = {
      {"ings", PosTag::kNoun},  {"ing", PosTag::kVerb},
      {"izes", PosTag::kVerb},  {"ized", PosTag::kVerb},
      {"ize", PosTag::kVerb},   {"ified", PosTag::kVerb},
      {"ify", PosTag::kVerb},   {"ates", PosTag::kVerb},
      {"ated", PosTag::kVerb},  {"ed", PosTag::kVerb},
      {"tions", PosTag::kNoun}, {"tion", PosTag::kNoun},
      {"sions", PosTag::kNoun}, {"sion", PosTag::kNoun},
      {"ments", PosTag::kNoun}, {"ment", PosTag::kNoun},
      {"ness", PosTag::kNoun},  {"ities", PosTag::kNoun},
      {"ity", PosTag::kNoun},   {"ance", PosTag::kNoun},
      {"ence", PosTag::kNoun},  {"ists", PosTag::kNoun},
      {"ist", PosTag::kNoun},   {"ism", PosTag::kNoun},
      {"ship", PosTag::kNoun},  {"hood", PosTag::kNoun},
      {"ers", PosTag::kNoun},   {"er", PosTag::kNoun},
      {"ors", PosTag::kNoun},   {"or", PosTag::kNoun},
      {"ly", PosTag::kOther},   {"ful", PosTag::kOther},
      {"ous", PosTag::kOther},  {"ive", PosTag::kOther},
      {"able", PosTag::kOther}, {"ible", PosTag::kOther},
      {"less", PosTag::kOther}, {"est", PosTag::kOther},
      {"al", PosTag::kOther},   {"ic", PosTag::kOther},
  };
  for (const auto& [suffix, tag] : kSuffixes) lexicon.AddSuffixRule(suffix, tag);
  return lexicon;
}

std::set<std::string> UniqueTagged(const std::vector<std::string>& tokens,
                                   const PosLexicon& lexicon, PosTag tag) {
  std::set<std::string> out;
  for (const std::string& t : tokens) {
    if (lexicon.Tag(t) == tag) out.insert(t);
  }
  return out;
}

}  // namespace

std::string_view TagName(PosTag tag) {
  switch (tag) {
    case PosTag::kNoun: return "NOUN";
    case PosTag::kVerb: return "VERB";
    case PosTag::kOther: return "OTHER";
  }
  return "OTHER";
}

void PosLexicon::AddWord(std::string_view word, PosTag tag) {
  words_.emplace(ToLower(word), tag);
}

void PosLexicon::AddSuffixRule(std::string_view suffix, PosTag tag) {
  suffix_rules_.emplace_back(ToLower(suffix), tag);
}

PosTag PosLexicon::Tag(std::string_view word) const {
  const std::string key = ToLower(word);
  if (auto it = words_.find(key); it != words_.end()) return it->second;
  for (const auto& [suffix, tag] : suffix_rules_) {
    // A suffix rule needs at least a two-letter stem (so "red" is not a verb).
    if (key.size() >= suffix.size() + 2 && key.ends_with(suffix)) return tag;
  }
  return PosTag::kOther;
}

const PosLexicon& PosLexicon::Bundled() {
  static const PosLexicon lexicon = BuildBundled();
  return lexicon;
}

PosLexicon PosLexicon::FromTsv(std::istream& in) {
  PosLexicon lexicon;
  bool in_suffixes = false;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view trimmed = Trim(line);
    if (trimmed.empty()) continue;
    if (trimmed == "#suffix") {
      in_suffixes = true;
      continue;
    }
    if (trimmed.front() == '#') continue;
    const std::size_t tab = trimmed.find('\t');
    std::optional<PosTag> tag;
    if (tab != std::string_view::npos) tag = ParseTag(Trim(trimmed.substr(tab + 1)));
    if (!tag || tab == 0) {
      throw Error(ErrorCode::kMalformedLine, std::to_string(number),
                  "lexicon line " + std::to_string(number) +
                      ": expected word<TAB>NOUN|VERB|OTHER");
    }
    const std::string_view key = Trim(trimmed.substr(0, tab));
    if (in_suffixes) {
      lexicon.AddSuffixRule(key, *tag);
    } else {
      lexicon.AddWord(key, *tag);
    }
  }
  return lexicon;
}

PosLexicon PosLexicon::LoadTsv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, path, "cannot open " + path);
  return FromTsv(in);
}

CaptionStats ComputeCaptionStats(std::string_view text,
                                 const PosLexicon& lexicon) {
  const std::vector<std::string> tokens = Tokenize(text);
  CaptionStats stats;
  stats.word_count = tokens.size();
  if (!tokens.empty()) {
    std::size_t chars = 0;
    for (const std::string& t : tokens) chars += CharCount(t);
    stats.mean_word_len =
        static_cast<double>(chars) / static_cast<double>(tokens.size());
  }
  stats.unique_nouns = UniqueTagged(tokens, lexicon, PosTag::kNoun).size();
  stats.unique_verbs = UniqueTagged(tokens, lexicon, PosTag::kVerb).size();
  return stats;
}

DeltaReport ComputeDeltaReport(const std::vector<augment::CaptionPool>& pools,
                               const corpus::Dataset& dataset,
                               const PosLexicon& lexicon) {
  std::map<std::string, const augment::CaptionPool*> by_id;
  for (const auto& pool : pools) by_id[pool.video_id] = &pool;
  std::map<std::string, const corpus::Video*> videos;
  for (const auto& v : dataset.videos) videos[v.video_id] = &v;
  for (const auto& [id, _] : by_id) {
    if (!videos.contains(id)) {
      throw Error(ErrorCode::kUnknownVideo, id,
                  "pool for '" + id + "' has no source video");
    }
  }

  DeltaReport report;
  for (CaptionKind kind : kGeneratedKinds) report.rows.push_back({kind});
  for (const auto& [id, video] : videos) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      report.missing_pools.push_back(id);
      continue;
    }
    const CaptionStats source =
        ComputeCaptionStats(corpus::FullParagraph(*video), lexicon);
    report.source_word_count += static_cast<double>(source.word_count);
    report.source_word_len += source.mean_word_len;
    ++report.source_videos;
    for (KindRow& row : report.rows) {
      auto caption = it->second->captions.find(row.kind);
      if (caption == it->second->captions.end()) continue;
      const CaptionStats s = ComputeCaptionStats(caption->second, lexicon);
      row.delta_nouns += static_cast<double>(s.unique_nouns) -
                         static_cast<double>(source.unique_nouns);
      row.delta_verbs += static_cast<double>(s.unique_verbs) -
                         static_cast<double>(source.unique_verbs);
      row.word_count += static_cast<double>(s.word_count);
      row.word_len += s.mean_word_len;
      ++row.videos;
    }
  }
  if (report.source_videos > 0) {
    const auto n = static_cast<double>(report.source_videos);
    report.source_word_count /= n;
    report.source_word_len /= n;
  }
  for (KindRow& row : report.rows) {
    if (row.videos == 0) continue;
    const auto n = static_cast<double>(row.videos);
    row.delta_nouns /= n;
    row.delta_verbs /= n;
    row.word_count /= n;
    row.word_len /= n;
  }
  return report;
}

nlohmann::json DeltaReportToJson(const DeltaReport& report) {
  nlohmann::json columns = nlohmann::json::array();
  columns.push_back({{"kind", "source"},
                     {"word_count", report.source_word_count},
                     {"word_length", report.source_word_len},
                     {"videos", report.source_videos}});
  for (const KindRow& row : report.rows) {
    columns.push_back({{"kind", std::string(KindName(row.kind))},
                       {"delta_nouns", row.delta_nouns},
                       {"delta_verbs", row.delta_verbs},
                       {"word_count", row.word_count},
                       {"word_length", row.word_len},
                       {"videos", row.videos}});
  }
  return {{"pos_counting", "unique surface forms (not lemmatized)"},
          {"groups",
           {{"summarization", {"s", "m", "l"}},
            {"simplification", {"e", "i", "u"}},
            {"summarization_and_simplification", {"se", "si", "su"}}}},
          {"columns", std::move(columns)},
          {"missing_pools", report.missing_pools}};
}

}  // namespace divcap::textstats
