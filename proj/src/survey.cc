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

#include "divcap/survey.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "divcap/error.h"
#include "divcap/rng.h"
#include "divcap/text.h"

namespace divcap::survey {
namespace {

using nlohmann::json;

constexpr CaptionKind kLevels[] = {CaptionKind::kE, CaptionKind::kI,
                                   CaptionKind::kU};
constexpr CaptionKind kHallucKinds[] = {CaptionKind::kL, CaptionKind::kE,
                                        CaptionKind::kI, CaptionKind::kU};
constexpr Source kSources[] = {Source::kActual, Source::kNeighbor,
                               Source::kRandom};
constexpr Section kSections[] = {Section::kMeaning, Section::kSimplify,
                                 Section::kHalluc};

std::string_view LevelName(CaptionKind k) {
  switch (k) {
    case CaptionKind::kE: return "elementary";
    case CaptionKind::kI: return "intermediate";
    case CaptionKind::kU: return "university";
    default: return KindName(k);
  }
}

Source ParseSource(std::string_view name) {
  for (Source s : kSources) {
    if (SourceName(s) == name) return s;
  }
  throw Error(ErrorCode::kInvalidArgument, std::string(name),
              "unknown candidate source '" + std::string(name) + "'");
}

CaptionKind KindFromJson(const json& j) {
  const auto kind = ParseKind(j.get<std::string>());
  if (!kind) {
    throw Error(ErrorCode::kInvalidArgument, j.get<std::string>(),
                "unknown caption kind '" + j.get<std::string>() + "'");
  }
  return *kind;
}

// Cosine similarity of two rows in double precision.
double Cosine(std::span<const float> a, std::span<const float> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += double{a[k]} * b[k];
    na += double{a[k]} * a[k];
    nb += double{b[k]} * b[k];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

std::string ItemId(int version, Section section, std::size_t k) {
  return "v" + std::to_string(version) + "-" + std::string(SectionName(section)) +
         "-" + std::to_string(k + 1);
}

json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, path.string(), "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedLine, path.string(),
                path.string() + ": " + e.what());
  }
}

void WriteJsonFile(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << j.dump(2) << "\n";
  if (!out) throw Error(ErrorCode::kIo, path.string(), "cannot write " + path.string());
}

json PercentRow(const Distribution& d) {
  const auto p = d.Percent();
  return {{"n", d.n()}, {"percent", {p[0], p[1], p[2]}}};
}

double Round2(double x) { return std::round(x * 100.0) / 100.0; }

double Share(std::size_t k, std::size_t n) {
  return n == 0 ? 0.0 : Round2(100.0 * static_cast<double>(k) /
                               static_cast<double>(n));
}

}  // namespace

std::string_view SectionName(Section s) {
  switch (s) {
    case Section::kMeaning: return "meaning";
    case Section::kSimplify: return "simplify";
    case Section::kHalluc: return "halluc";
  }
  return "?";
}

Section ParseSection(std::string_view name) {
  for (Section s : kSections) {
    if (SectionName(s) == name) return s;
  }
  throw Error(ErrorCode::kInvalidArgument, std::string(name),
              "unknown survey section '" + std::string(name) + "'");
}

std::string_view SourceName(Source s) {
  switch (s) {
    case Source::kActual: return "actual";
    case Source::kNeighbor: return "neighbor";
    case Source::kRandom: return "random";
  }
  return "?";
}

std::string_view LabelName(Label l) {
  switch (l) {
    case Label::kDifferent: return "Different";
    case Label::kUnsure: return "Unsure";
    case Label::kMatches: return "Matches";
  }
  return "?";
}

std::optional<Label> ParseLabel(std::string_view name) {
  for (Label l : {Label::kDifferent, Label::kUnsure, Label::kMatches}) {
    if (LabelName(l) == name) return l;
  }
  return std::nullopt;
}

std::string NearestNeighbor(const EmbeddingTable& table, std::string_view id) {
  if (table.size() < 2) {
    throw Error(ErrorCode::kTooFewRows,
                "nearest neighbors need at least 2 rows, got " +
                    std::to_string(table.size()));
  }
  const auto self = table.Find(std::string(id));
  if (!self) {
    throw Error(ErrorCode::kUnknownVideo, std::string(id),
                "no embedding for '" + std::string(id) + "'");
  }
  const auto query = table.row(*self);
  std::size_t best = table.size();
  double best_sim = 0.0;
  for (std::size_t r = 0; r < table.size(); ++r) {
    if (r == *self) continue;
    const double sim = Cosine(query, table.row(r));
    if (best == table.size() || sim > best_sim ||
        (sim == best_sim && table.id(r) < table.id(best))) {
      best = r;
      best_sim = sim;
    }
  }
  return table.id(best);
}

std::map<std::string, std::string> NearestNeighbors(const EmbeddingTable& table) {
  if (table.size() < 2) {
    throw Error(ErrorCode::kTooFewRows,
                "nearest neighbors need at least 2 rows, got " +
                    std::to_string(table.size()));
  }
  std::map<std::string, std::string> out;
  for (const std::string& id : table.ids()) out[id] = NearestNeighbor(table, id);
  return out;
}

std::vector<std::string> ProbeWords(std::string_view source,
                                    std::string_view generated,
                                    const textstats::PosLexicon& lexicon,
                                    std::size_t max) {
  const std::vector<std::string> src = Tokenize(source);
  const std::set<std::string> seen_in_source(src.begin(), src.end());
  std::vector<std::string> out;
  for (const std::string& tok : Tokenize(generated)) {
    if (out.size() >= max) break;
    if (seen_in_source.count(tok) ||
        std::find(out.begin(), out.end(), tok) != out.end()) {
      continue;
    }
    const textstats::PosTag tag = lexicon.Tag(tok);
    if (tag == textstats::PosTag::kNoun || tag == textstats::PosTag::kVerb) {
      out.push_back(tok);
    }
  }
  return out;
}

std::vector<SurveyDoc> MakeSurveys(const corpus::Dataset& dataset,
                                   const std::vector<augment::CaptionPool>& pools,
                                   const EmbeddingTable& gt_embeddings,
                                   const textstats::PosLexicon& lexicon,
                                   const MakeOptions& options) {
  if (options.versions < 1) {
    throw Error(ErrorCode::kInvalidArgument, "versions", "versions must be >= 1");
  }
  std::unordered_map<std::string, const augment::CaptionPool*> by_id;
  for (const auto& pool : pools) by_id[pool.video_id] = &pool;

  // Videos with a complete pool and an embedding, in dataset order.
  std::vector<const augment::CaptionPool*> eligible;
  EmbeddingTable table(gt_embeddings.dim());
  for (const corpus::Video& v : dataset.videos) {
    auto it = by_id.find(v.video_id);
    const auto row = gt_embeddings.Find(v.video_id);
    if (it == by_id.end() || !row ||
        it->second->captions.size() != kAllKinds.size()) {
      continue;
    }
    eligible.push_back(it->second);
    table.Add(v.video_id, gt_embeddings.row(*row));
  }
  const std::size_t needed =
      static_cast<std::size_t>(options.versions) * kItemsPerVersion;
  if (eligible.size() < needed) {
    throw Error(ErrorCode::kInsufficientVideos,
                "surveys need " + std::to_string(needed) +
                    " videos with pools and embeddings, found " +
                    std::to_string(eligible.size()));
  }
  std::unordered_map<std::string, const augment::CaptionPool*> eligible_by_id;
  for (const auto* p : eligible) eligible_by_id[p->video_id] = p;

  Rng rng(DeriveSeed(options.seed, "survey"));
  std::vector<std::size_t> queue(eligible.size());
  for (std::size_t i = 0; i < queue.size(); ++i) queue[i] = i;
  rng.Shuffle(queue);
  std::size_t next = 0;
  auto take = [&]() -> const augment::CaptionPool& {
    if (next >= queue.size()) {
      throw Error(ErrorCode::kInsufficientVideos,
                  "ran out of videos with probe words after " +
                      std::to_string(next) + " draws");
    }
    return *eligible[queue[next++]];
  };

  std::vector<SurveyDoc> docs;
  for (int v = 1; v <= options.versions; ++v) {
    SurveyDoc doc;
    doc.version_id = v;
    doc.has_keys = true;
    for (std::size_t k = 0; k < kItemsPerSection; ++k) {
      const augment::CaptionPool& pool = take();
      SurveyItem item;
      item.item_id = ItemId(v, Section::kMeaning, k);
      item.section = Section::kMeaning;
      item.video_id = pool.video_id;
      const CaptionKind kind =
          kGeneratedKinds[rng.UniformIndex(kGeneratedKinds.size())];
      const std::string neighbor = NearestNeighbor(table, pool.video_id);
      std::string other;
      do {
        other = eligible[rng.UniformIndex(eligible.size())]->video_id;
      } while (other == pool.video_id || other == neighbor);
      std::vector<std::size_t> order = {0, 1, 2};
      rng.Shuffle(order);
      const std::array<std::string, 3> texts = {
          pool.captions.at(kind),
          eligible_by_id.at(neighbor)->captions.at(kind),
          eligible_by_id.at(other)->captions.at(kind)};
      item.meaning.paragraph = pool.captions.at(CaptionKind::kF);
      for (std::size_t c = 0; c < 3; ++c) {
        item.meaning.candidates[c] = texts[order[c]];
        item.key.sources[c] = kSources[order[c]];
      }
      item.key.generated_kind = kind;
      item.key.neighbor_id = neighbor;
      item.key.random_id = other;
      doc.items.push_back(std::move(item));
    }
    for (std::size_t k = 0; k < kItemsPerSection; ++k) {
      const augment::CaptionPool& pool = take();
      SurveyItem item;
      item.item_id = ItemId(v, Section::kSimplify, k);
      item.section = Section::kSimplify;
      item.video_id = pool.video_id;
      std::vector<std::size_t> order = {0, 1, 2};
      rng.Shuffle(order);
      item.simplify.paragraph = pool.captions.at(CaptionKind::kF);
      for (std::size_t c = 0; c < 3; ++c) {
        item.key.levels[c] = kLevels[order[c]];
        item.simplify.captions[c] = pool.captions.at(kLevels[order[c]]);
      }
      doc.items.push_back(std::move(item));
    }
    for (std::size_t k = 0; k < kItemsPerSection;) {
      const augment::CaptionPool& pool = take();
      const CaptionKind kind = kHallucKinds[rng.UniformIndex(4)];
      const std::string& original = pool.captions.at(CaptionKind::kF);
      const std::string& generated = pool.captions.at(kind);
      std::vector<std::string> probes = ProbeWords(original, generated, lexicon);
      if (probes.empty()) continue;  // resample with another video
      SurveyItem item;
      item.item_id = ItemId(v, Section::kHalluc, k);
      item.section = Section::kHalluc;
      item.video_id = pool.video_id;
      item.halluc = {original, generated, std::move(probes)};
      item.key.generated_kind = kind;
      doc.items.push_back(std::move(item));
      ++k;
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

json SurveyToPublicJson(const SurveyDoc& doc) {
  json items = json::array();
  for (const SurveyItem& item : doc.items) {
    json payload;
    switch (item.section) {
      case Section::kMeaning:
        payload = {{"paragraph", item.meaning.paragraph},
                   {"candidates", item.meaning.candidates}};
        break;
      case Section::kSimplify:
        payload = {{"paragraph", item.simplify.paragraph},
                   {"captions", item.simplify.captions}};
        break;
      case Section::kHalluc:
        payload = {{"original", item.halluc.original},
                   {"generated", item.halluc.generated},
                   {"probe_words", item.halluc.probe_words}};
        break;
    }
    items.push_back({{"item_id", item.item_id},
                     {"section", std::string(SectionName(item.section))},
                     {"payload", payload}});
  }
  return {{"version_id", doc.version_id}, {"items", items}};
}

json SurveyToKeyJson(const SurveyDoc& doc) {
  json items = json::array();
  for (const SurveyItem& item : doc.items) {
    json j = {{"item_id", item.item_id},
              {"section", std::string(SectionName(item.section))},
              {"video_id", item.video_id}};
    switch (item.section) {
      case Section::kMeaning: {
        json sources = json::array();
        for (Source s : item.key.sources) sources.push_back(std::string(SourceName(s)));
        j["sources"] = sources;
        j["kind"] = std::string(KindName(item.key.generated_kind));
        j["neighbor_id"] = item.key.neighbor_id;
        j["random_id"] = item.key.random_id;
        break;
      }
      case Section::kSimplify: {
        json levels = json::array();
        for (CaptionKind k : item.key.levels) levels.push_back(std::string(KindName(k)));
        j["levels"] = levels;
        break;
      }
      case Section::kHalluc:
        j["kind"] = std::string(KindName(item.key.generated_kind));
        break;
    }
    items.push_back(std::move(j));
  }
  return {{"version_id", doc.version_id}, {"items", items}};
}

SurveyDoc SurveyFromJson(const json& public_json, const json* key_json) {
  SurveyDoc doc;
  try {
    doc.version_id = public_json.at("version_id").get<int>();
    for (const json& j : public_json.at("items")) {
      SurveyItem item;
      item.item_id = j.at("item_id").get<std::string>();
      item.section = ParseSection(j.at("section").get<std::string>());
      const json& p = j.at("payload");
      switch (item.section) {
        case Section::kMeaning:
          item.meaning.paragraph = p.at("paragraph").get<std::string>();
          item.meaning.candidates =
              p.at("candidates").get<std::array<std::string, 3>>();
          break;
        case Section::kSimplify:
          item.simplify.paragraph = p.at("paragraph").get<std::string>();
          item.simplify.captions =
              p.at("captions").get<std::array<std::string, 3>>();
          break;
        case Section::kHalluc:
          item.halluc.original = p.at("original").get<std::string>();
          item.halluc.generated = p.at("generated").get<std::string>();
          item.halluc.probe_words =
              p.at("probe_words").get<std::vector<std::string>>();
          break;
      }
      doc.items.push_back(std::move(item));
    }
    if (key_json != nullptr) {
      if (key_json->at("version_id").get<int>() != doc.version_id) {
        throw Error(ErrorCode::kInvalidArgument, std::to_string(doc.version_id),
                    "key file belongs to a different survey version");
      }
      const json& keys = key_json->at("items");
      if (keys.size() != doc.items.size()) {
        throw Error(ErrorCode::kInvalidArgument, std::to_string(doc.version_id),
                    "key file item count differs from the survey");
      }
      for (std::size_t i = 0; i < keys.size(); ++i) {
        SurveyItem& item = doc.items[i];
        const json& k = keys[i];
        if (k.at("item_id").get<std::string>() != item.item_id) {
          throw Error(ErrorCode::kInvalidArgument, item.item_id,
                      "key file item order differs from the survey");
        }
        item.video_id = k.at("video_id").get<std::string>();
        switch (item.section) {
          case Section::kMeaning:
            for (std::size_t c = 0; c < 3; ++c) {
              item.key.sources[c] =
                  ParseSource(k.at("sources").at(c).get<std::string>());
            }
            item.key.generated_kind = KindFromJson(k.at("kind"));
            item.key.neighbor_id = k.at("neighbor_id").get<std::string>();
            item.key.random_id = k.at("random_id").get<std::string>();
            break;
          case Section::kSimplify:
            for (std::size_t c = 0; c < 3; ++c) {
              item.key.levels[c] = KindFromJson(k.at("levels").at(c));
            }
            break;
          case Section::kHalluc:
            item.key.generated_kind = KindFromJson(k.at("kind"));
            break;
        }
      }
      doc.has_keys = true;
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, "survey",
                std::string("malformed survey JSON: ") + e.what());
  }
  return doc;
}

void WriteSurveys(const std::vector<SurveyDoc>& docs,
                  const std::string& survey_dir, const std::string& key_dir) {
  std::filesystem::create_directories(survey_dir);
  std::filesystem::create_directories(key_dir);
  for (const SurveyDoc& doc : docs) {
    const std::string n = std::to_string(doc.version_id);
    WriteJsonFile(std::filesystem::path(survey_dir) / ("survey_v" + n + ".json"),
                  SurveyToPublicJson(doc));
    WriteJsonFile(std::filesystem::path(key_dir) / ("key_v" + n + ".json"),
                  SurveyToKeyJson(doc));
  }
}

std::vector<SurveyDoc> LoadSurveys(const std::string& survey_dir,
                                   const std::string& key_dir) {
  std::vector<SurveyDoc> docs;
  if (!std::filesystem::is_directory(survey_dir)) {
    throw Error(ErrorCode::kIo, survey_dir, "no survey directory " + survey_dir);
  }
  for (int v = 1;; ++v) {
    const std::string n = std::to_string(v);
    const auto path =
        std::filesystem::path(survey_dir) / ("survey_v" + n + ".json");
    if (!std::filesystem::exists(path)) break;
    const json pub = ReadJsonFile(path);
    if (key_dir.empty()) {
      docs.push_back(SurveyFromJson(pub, nullptr));
    } else {
      const json key =
          ReadJsonFile(std::filesystem::path(key_dir) / ("key_v" + n + ".json"));
      docs.push_back(SurveyFromJson(pub, &key));
    }
    if (docs.back().version_id != v) {
      throw Error(ErrorCode::kInvalidArgument, path.string(),
                  path.string() + " holds version " +
                      std::to_string(docs.back().version_id));
    }
  }
  if (docs.empty()) {
    throw Error(ErrorCode::kIo, survey_dir,
                "no survey_v1.json in " + survey_dir);
  }
  return docs;
}

const SurveyItem* FindItem(const std::vector<SurveyDoc>& surveys,
                           int version_id, std::string_view item_id) {
  for (const SurveyDoc& doc : surveys) {
    if (doc.version_id != version_id) continue;
    for (const SurveyItem& item : doc.items) {
      if (item.item_id == item_id) return &item;
    }
  }
  return nullptr;
}

namespace {

// Checks `r` against its item, which the caller has looked up (null when
// absent).
void ValidateAgainst(const ResponseRecord& r, const SurveyItem* item) {
  if (r.annotator_id.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "annotator_id",
                "annotator_id must be non-empty");
  }
  if (item == nullptr) {
    throw Error(ErrorCode::kUnknownItem, r.item_id,
                "no item '" + r.item_id + "' in survey version " +
                    std::to_string(r.version_id));
  }
  auto incomplete = [&](const std::string& why) {
    throw Error(ErrorCode::kIncompleteAnswer, r.item_id,
                "answers for '" + r.item_id + "' " + why);
  };
  switch (item->section) {
    case Section::kMeaning:
      if (r.labels.size() != 3 || !r.ranks.empty()) {
        incomplete("must be 3 labels");
      }
      break;
    case Section::kHalluc:
      if (r.labels.size() != item->halluc.probe_words.size() ||
          !r.ranks.empty()) {
        incomplete("must be one label per probe word (" +
                   std::to_string(item->halluc.probe_words.size()) + ")");
      }
      break;
    case Section::kSimplify: {
      std::vector<int> sorted = r.ranks;
      std::sort(sorted.begin(), sorted.end());
      if (sorted != std::vector<int>{1, 2, 3} || !r.labels.empty()) {
        incomplete("must be a permutation of the ranks 1, 2, 3");
      }
      break;
    }
  }
}

}  // namespace

void ValidateResponse(const ResponseRecord& r,
                      const std::vector<SurveyDoc>& surveys) {
  ValidateAgainst(r, FindItem(surveys, r.version_id, r.item_id));
}

ResponseRecord ParseResponse(const json& j,
                             const std::vector<SurveyDoc>& surveys) {
  auto bad = [](const std::string& field, const std::string& why) {
    throw Error(ErrorCode::kInvalidArgument, field, "'" + field + "' " + why);
  };
  if (!j.is_object()) bad("response", "must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key != "annotator_id" && key != "version_id" && key != "item_id" &&
        key != "answers" && key != "timestamp") {
      bad(key, "is not a response field");
    }
  }
  ResponseRecord r;
  if (!j.contains("annotator_id") || !j["annotator_id"].is_string()) {
    bad("annotator_id", "must be a string");
  }
  r.annotator_id = j["annotator_id"].get<std::string>();
  if (!j.contains("version_id") || !j["version_id"].is_number_integer()) {
    bad("version_id", "must be an integer");
  }
  r.version_id = j["version_id"].get<int>();
  if (!j.contains("item_id") || !j["item_id"].is_string()) {
    bad("item_id", "must be a string");
  }
  r.item_id = j["item_id"].get<std::string>();
  if (j.contains("timestamp")) {
    if (!j["timestamp"].is_string()) bad("timestamp", "must be a string");
    r.timestamp = j["timestamp"].get<std::string>();
  }
  if (!j.contains("answers") || !j["answers"].is_array()) {
    bad("answers", "must be an array");
  }
  const SurveyItem* item = FindItem(surveys, r.version_id, r.item_id);
  if (item == nullptr) {
    throw Error(ErrorCode::kUnknownItem, r.item_id,
                "no item '" + r.item_id + "' in survey version " +
                    std::to_string(r.version_id));
  }
  for (const json& a : j["answers"]) {
    if (item->section == Section::kSimplify) {
      if (!a.is_number_integer()) {
        throw Error(ErrorCode::kIncompleteAnswer, r.item_id,
                    "rank answers must be integers");
      }
      r.ranks.push_back(a.get<int>());
    } else {
      const auto label = a.is_string() ? ParseLabel(a.get<std::string>())
                                       : std::nullopt;
      if (!label) {
        throw Error(ErrorCode::kIncompleteAnswer, r.item_id,
                    "labels must be Different, Unsure or Matches");
      }
      r.labels.push_back(*label);
    }
  }
  ValidateResponse(r, surveys);
  return r;
}

json ResponseToJson(const ResponseRecord& r) {
  json answers = json::array();
  for (Label l : r.labels) answers.push_back(std::string(LabelName(l)));
  for (int k : r.ranks) answers.push_back(k);
  json j = {{"annotator_id", r.annotator_id},
            {"version_id", r.version_id},
            {"item_id", r.item_id},
            {"answers", answers}};
  if (!r.timestamp.empty()) j["timestamp"] = r.timestamp;
  return j;
}

std::vector<ResponseRecord> ReadResponses(const std::string& path,
                                          const std::vector<SurveyDoc>& surveys) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, path, "cannot open " + path);
  std::vector<ResponseRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kMalformedLine,
                  path + ":" + std::to_string(lineno), e.what());
    }
    out.push_back(ParseResponse(j, surveys));
  }
  return out;
}

std::array<double, 3> Distribution::Percent() const {
  const std::size_t total = n();
  std::array<double, 3> out{};
  if (total == 0) return out;
  // Hundredths of a percent, floored, then the remainder goes to the largest
  // fractional parts (earlier columns first on ties).
  std::array<std::size_t, 3> units{}, rem{};
  std::size_t assigned = 0;
  for (int c = 0; c < 3; ++c) {
    units[c] = counts[c] * 10000 / total;
    rem[c] = counts[c] * 10000 % total;
    assigned += units[c];
  }
  std::array<int, 3> order = {0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return rem[a] > rem[b]; });
  for (std::size_t k = 0; assigned + k < 10000; ++k) ++units[order[k]];
  for (int c = 0; c < 3; ++c) out[c] = static_cast<double>(units[c]) / 100.0;
  return out;
}

AgreementReport Aggregate(const std::vector<ResponseRecord>& responses,
                          const std::vector<SurveyDoc>& surveys) {
  for (const SurveyDoc& doc : surveys) {
    if (!doc.has_keys) {
      throw Error(ErrorCode::kInvalidArgument, std::to_string(doc.version_id),
                  "survey version " + std::to_string(doc.version_id) +
                      " has no answer key");
    }
  }
  AgreementReport report;
  for (Source s : kSources) report.meaning[s];
  for (CaptionKind k : kLevels) report.simplify[k];
  for (Section s : kSections) report.unanimous[s];

  // Responses grouped per item, keyed by (version, item) in sorted order.
  std::map<std::pair<int, std::string>, std::vector<const ResponseRecord*>> per_item;
  std::set<std::tuple<int, std::string, std::string>> seen;
  std::map<std::pair<int, std::string_view>, const SurveyItem*> items;
  for (const SurveyDoc& doc : surveys) {
    for (const SurveyItem& item : doc.items) {
      items.emplace(std::pair<int, std::string_view>(doc.version_id, item.item_id),
                    &item);
    }
  }
  auto find = [&](int version, std::string_view id) -> const SurveyItem* {
    auto it = items.find({version, id});
    return it == items.end() ? nullptr : it->second;
  };
  for (const ResponseRecord& r : responses) {
    ValidateAgainst(r, find(r.version_id, r.item_id));
    if (!seen.insert({r.version_id, r.item_id, r.annotator_id}).second) {
      throw Error(ErrorCode::kInvalidArgument, r.item_id,
                  "annotator '" + r.annotator_id + "' answered '" + r.item_id +
                      "' more than once");
    }
    per_item[{r.version_id, r.item_id}].push_back(&r);
  }
  report.responses = responses.size();

  for (const auto& [where, group] : per_item) {
    const SurveyItem& item = *find(where.first, where.second);
    std::size_t width = 0;
    for (const ResponseRecord* r : group) {
      switch (item.section) {
        case Section::kMeaning:
          for (std::size_t c = 0; c < 3; ++c) {
            ++report.meaning[item.key.sources[c]]
                  .counts[static_cast<int>(r->labels[c])];
          }
          width = 3;
          break;
        case Section::kSimplify:
          for (std::size_t c = 0; c < 3; ++c) {
            ++report.simplify[item.key.levels[c]].counts[r->ranks[c] - 1];
          }
          width = 3;
          break;
        case Section::kHalluc:
          for (Label l : r->labels) {
            ++report.halluc_total.counts[static_cast<int>(l)];
          }
          width = r->labels.size();
          break;
      }
    }
    auto answer = [&](const ResponseRecord* r, std::size_t c) {
      return item.section == Section::kSimplify
                 ? r->ranks[c]
                 : static_cast<int>(r->labels[c]);
    };
    if (item.section == Section::kHalluc) {
      for (std::size_t c = 0; c < width; ++c) {
        std::array<std::size_t, 3> votes{};
        for (const ResponseRecord* r : group) ++votes[answer(r, c)];
        const std::size_t top = *std::max_element(votes.begin(), votes.end());
        const auto winners = std::count(votes.begin(), votes.end(), top);
        const int label = winners > 1
                              ? static_cast<int>(Label::kUnsure)
                              : static_cast<int>(std::max_element(
                                                     votes.begin(), votes.end()) -
                                                 votes.begin());
        ++report.halluc_majority.counts[label];
      }
    }
    if (group.size() >= 2) {
      Unanimity& u = report.unanimous[item.section];
      ++u.items;
      bool all = true, any = false;
      for (std::size_t c = 0; c < width; ++c) {
        bool same = true;
        for (const ResponseRecord* r : group) {
          same = same && answer(r, c) == answer(group.front(), c);
        }
        all = all && same;
        any = any || same;
      }
      u.all += all;
      u.any += any;
    }
  }
  return report;
}

double RandomUnanimity(std::size_t annotators) {
  if (annotators < 2) return 1.0;
  return std::pow(1.0 / 3.0, static_cast<double>(annotators - 1));
}

json ReportToJson(const AgreementReport& report) {
  json meaning = json::array();
  for (const auto& [source, d] : report.meaning) {
    json row = PercentRow(d);
    row["source"] = std::string(SourceName(source));
    meaning.push_back(row);
  }
  json simplify = json::array();
  for (const auto& [level, d] : report.simplify) {
    json row = PercentRow(d);
    row["level"] = std::string(LevelName(level));
    simplify.push_back(row);
  }
  json total = PercentRow(report.halluc_total);
  total["row"] = "Total";
  json majority = PercentRow(report.halluc_majority);
  majority["row"] = "Majority (per-word)";
  json sections = json::array();
  for (const auto& [section, u] : report.unanimous) {
    sections.push_back({{"section", std::string(SectionName(section))},
                        {"items", u.items},
                        {"all_percent", Share(u.all, u.items)},
                        {"any_percent", Share(u.any, u.items)}});
  }
  const json labels = {"Different", "Unsure", "Matches"};
  return {
      {"responses", report.responses},
      {"meaning", {{"columns", labels}, {"rows", meaning}}},
      {"simplify",
       {{"columns", {"Simplest", "Middle", "Most Complex"}}, {"rows", simplify}}},
      {"halluc", {{"columns", labels}, {"rows", {total, majority}}}},
      {"unanimous",
       {{"definition",
         "items with at least two responses whose annotators agree on every "
         "sub-answer (all) or on at least one (any)"},
        {"random_percent", Round2(100.0 * RandomUnanimity(3))},
        {"random_annotators", 3},
        {"sections", sections}}}};
}

std::string ReportText(const AgreementReport& report) {
  return ReportToJson(report).dump(2) + "\n";
}

}  // namespace divcap::survey
