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

#include "divcap/backend.h"

#include <cctype>
#include <cstdlib>
#include <unordered_map>
#include <utility>
#include <vector>

#include "divcap/error.h"
#include "divcap/prompts.h"
#include "divcap/rng.h"
#include "divcap/text.h"
#include "httplib.h"
#include "json.hpp"

namespace divcap::augment {
namespace {

using SynonymTable = std::unordered_map<std::string, std::string>;

// Long word -> shorter synonym.
constexpr std::pair<const char*, const char*> kShorten[] = {
    {"individuals", "people"},  {"individual", "person"},
    {"automobile", "car"},      {"vehicle", "car"},
    {"purchase", "buy"},        {"assist", "help"},
    {"assistance", "help"},     {"commence", "start"},
    {"commences", "starts"},    {"commencing", "starting"},
    {"beneath", "under"},       {"substantial", "big"},
    {"large", "big"},           {"numerous", "many"},
    {"multiple", "many"},       {"various", "many"},
    {"demonstrate", "show"},    {"demonstrates", "shows"},
    {"demonstrating", "showing"}, {"utilize", "use"},
    {"utilizes", "uses"},       {"utilizing", "using"},
    {"approximately", "about"}, {"additional", "more"},
    {"construct", "build"},     {"assemble", "build"},
    {"observe", "watch"},       {"observes", "watches"},
    {"observing", "watching"},  {"proceed", "go"},
    {"proceeds", "goes"},       {"residence", "home"},
    {"attempt", "try"},         {"attempts", "tries"},
    {"attempting", "trying"},   {"navigate", "go"},
    {"navigates", "goes"},      {"navigating", "going"},
    {"maneuver", "move"},       {"maneuvers", "moves"},
    {"traverse", "cross"},      {"traverses", "crosses"},
    {"positioned", "placed"},   {"propelling", "pushing"},
    {"formation", "shape"},     {"structure", "shape"},
    {"venture", "go"},          {"ventures", "goes"},
    {"beverage", "drink"},      {"consume", "eat"},
    {"consumes", "eats"},       {"consuming", "eating"},
    {"subsequently", "then"},   {"afterwards", "later"},
    {"instructor", "teacher"},  {"perform", "do"},
    {"performs", "does"},       {"performing", "doing"},
    {"participate", "join"},    {"participates", "joins"},
    {"participants", "players"}, {"competition", "contest"},
    {"gymnasium", "gym"},       {"photograph", "photo"},
    {"bicycle", "bike"},        {"television", "tv"},
    {"telephone", "phone"},     {"children", "kids"},
    {"youngster", "kid"},       {"gentleman", "man"},
    {"gentlemen", "men"},       {"exhibit", "show"},
    {"exhibits", "shows"},      {"rapidly", "fast"},
    {"quickly", "fast"},        {"continues", "keeps"},
    {"continuing", "keeping"},  {"discusses", "talks"},
    {"explaining", "telling"},  {"explains", "tells"},
    {"entire", "whole"},        {"extremely", "very"},
    {"preparing", "making"},    {"prepares", "makes"},
    {"container", "box"},       {"applies", "puts"},
    {"applying", "putting"},    {"location", "place"},
    {"audience", "crowd"},      {"spectators", "crowd"},
    {"athlete", "player"},      {"athletes", "players"},
    {"equipment", "gear"},      {"approaches", "nears"},
};

// Short word -> longer synonym.
constexpr std::pair<const char*, const char*> kLengthen[] = {
    {"people", "individuals"},  {"person", "individual"},
    {"man", "gentleman"},       {"men", "gentlemen"},
    {"boy", "youngster"},       {"kids", "children"},
    {"kid", "youngster"},       {"car", "automobile"},
    {"bike", "bicycle"},        {"big", "substantial"},
    {"small", "diminutive"},    {"go", "proceed"},
    {"goes", "proceeds"},       {"going", "proceeding"},
    {"use", "utilize"},         {"uses", "utilizes"},
    {"using", "utilizing"},     {"show", "demonstrate"},
    {"shows", "demonstrates"},  {"showing", "demonstrating"},
    {"help", "assist"},         {"helps", "assists"},
    {"start", "commence"},      {"starts", "commences"},
    {"buy", "purchase"},        {"watch", "observe"},
    {"watches", "observes"},    {"watching", "observing"},
    {"try", "attempt"},         {"tries", "attempts"},
    {"trying", "attempting"},   {"move", "maneuver"},
    {"moves", "maneuvers"},     {"moving", "maneuvering"},
    {"cross", "traverse"},      {"crosses", "traverses"},
    {"under", "beneath"},       {"then", "subsequently"},
    {"also", "additionally"},   {"many", "numerous"},
    {"more", "additional"},     {"about", "approximately"},
    {"home", "residence"},      {"put", "position"},
    {"puts", "positions"},      {"make", "prepare"},
    {"makes", "prepares"},      {"making", "preparing"},
    {"eat", "consume"},         {"eats", "consumes"},
    {"eating", "consuming"},    {"drink", "beverage"},
    {"talk", "converse"},       {"talks", "converses"},
    {"talking", "conversing"},  {"tell", "explain"},
    {"tells", "explains"},      {"fast", "rapidly"},
    {"very", "extremely"},      {"whole", "entire"},
    {"rock", "boulder"},        {"boat", "vessel"},
    {"boats", "vessels"},       {"run", "sprint"},
    {"runs", "sprints"},        {"jumps", "vaults"},
    {"walk", "stroll"},         {"walks", "strolls"},
    {"get", "obtain"},          {"gets", "obtains"},
    {"hit", "strike"},          {"hits", "strikes"},
    {"top", "summit"},          {"end", "conclusion"},
    {"ends", "concludes"},      {"picks", "selects"},
    {"look", "observe"},        {"looks", "observes"},
};

template <std::size_t N>
SynonymTable BuildTable(const std::pair<const char*, const char*> (&rows)[N]) {
  SynonymTable table;
  for (const auto& [from, to] : rows) table.emplace(from, to);
  return table;
}

const SynonymTable& ShortenTable() {
  static const SynonymTable table = BuildTable(kShorten);
  return table;
}

const SynonymTable& LengthenTable() {
  static const SynonymTable table = BuildTable(kLengthen);
  return table;
}

bool IsAlnum(char c) { return std::isalnum(static_cast<unsigned char>(c)); }

struct WordParts {
  std::string_view lead, core, trail;
};

WordParts SplitWord(std::string_view word) {
  std::size_t b = 0;
  while (b < word.size() && !IsAlnum(word[b])) ++b;
  std::size_t e = word.size();
  while (e > b && !IsAlnum(word[e - 1])) --e;
  return {word.substr(0, b), word.substr(b, e - b), word.substr(e)};
}

std::string Layout(const std::vector<std::pair<std::string, std::string>>& in,
                   std::uint64_t seed) {
  Rng rng(seed);
  auto sections = in;
  const auto style = rng.UniformIndex(3);
  if (style != 0) rng.Shuffle(sections);
  std::string out;
  for (const auto& [label, text] : sections) {
    switch (style) {
      case 0: out += label + ": " + text + "\n"; break;
      case 1: out += "**" + label + "**\n\"" + text + "\"\n\n"; break;
      default: out += "### " + label + "\n\n" + text + "\n\n"; break;
    }
  }
  return out;
}

ReadingLevel LevelForLabel(std::string_view label) {
  if (label == kVersionLabels[0]) return ReadingLevel::kElementary;
  if (label == kVersionLabels[1]) return ReadingLevel::kIntermediate;
  if (label == kVersionLabels[2]) return ReadingLevel::kUniversity;
  throw Error(ErrorCode::kUnrecognizedPrompt, std::string(label),
              "unknown version label");
}

}  // namespace

void ValidateBackendConfig(const BackendConfig& config) {
  if (config.max_in_flight < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_in_flight must be >= 1");
  }
  if (config.timeout_s <= 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "timeout_s must be positive");
  }
}

std::string RewriteForLevel(std::string_view text, ReadingLevel level) {
  const SynonymTable* table = nullptr;
  if (level == ReadingLevel::kElementary) table = &ShortenTable();
  if (level == ReadingLevel::kUniversity) table = &LengthenTable();
  std::vector<std::string> out;
  for (std::string_view word : SplitWhitespace(text)) {
    if (table == nullptr) {
      out.emplace_back(word);
      continue;
    }
    WordParts parts = SplitWord(word);
    auto it = table->find(ToLower(parts.core));
    if (it == table->end()) {
      out.emplace_back(word);
      continue;
    }
    std::string replacement = it->second;
    if (!parts.core.empty() &&
        std::isupper(static_cast<unsigned char>(parts.core[0]))) {
      replacement[0] = static_cast<char>(
          std::toupper(static_cast<unsigned char>(replacement[0])));
    }
    out.push_back(std::string(parts.lead) + replacement +
                  std::string(parts.trail));
  }
  return Join(out, " ");
}

bool HasSynonym(std::string_view word) {
  const std::string key = ToLower(SplitWord(word).core);
  return ShortenTable().contains(key) || LengthenTable().contains(key);
}

std::string ExtractiveSummary(std::string_view text, std::size_t n) {
  const auto words = SplitWhitespace(text);
  if (words.empty() || n == 0) return {};
  std::vector<std::string> picked;
  picked.reserve(n);
  for (std::size_t k = 0; k < n; ++k) picked.emplace_back(words[k % words.size()]);
  std::string& last = picked.back();
  while (!last.empty() && !IsAlnum(last.back())) last.pop_back();
  last.push_back('.');
  return Join(picked, " ");
}

std::string MockBackend::Complete(const std::string& prompt,
                                  std::uint64_t seed) {
  const PromptRequest request = ParsePrompt(prompt);
  std::vector<std::pair<std::string, std::string>> sections;
  for (const auto& [label, words] : request.sections) {
    std::string text;
    switch (request.family) {
      case PromptFamily::kSummarization:
        text = ExtractiveSummary(request.paragraph, words);
        break;
      case PromptFamily::kSimplification:
        text = RewriteForLevel(request.paragraph, LevelForLabel(label));
        break;
      case PromptFamily::kJoint:
        text = RewriteForLevel(ExtractiveSummary(request.paragraph, words),
                               LevelForLabel(label));
        break;
    }
    sections.emplace_back(label, std::move(text));
  }
  return Layout(sections, seed);
}

ChatCompletionBackend::ChatCompletionBackend(BackendConfig config)
    : config_(std::move(config)) {
  ValidateBackendConfig(config_);
  const std::string& url = config_.endpoint;
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, url, "endpoint must be a URL");
  }
  const std::size_t path_start = url.find('/', scheme_end + 3);
  scheme_host_port_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
}

std::string ChatCompletionBackend::id() const {
  return "api:" + config_.model_name;
}

std::string ChatCompletionBackend::Complete(const std::string& prompt,
                                            std::uint64_t seed) {
  httplib::Client client(scheme_host_port_);
  const auto seconds = static_cast<time_t>(config_.timeout_s);
  const auto micros = static_cast<time_t>(
      (config_.timeout_s - static_cast<double>(seconds)) * 1e6);
  client.set_connection_timeout(seconds, micros);
  client.set_read_timeout(seconds, micros);
  client.set_write_timeout(seconds, micros);

  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str())) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  nlohmann::json body = {
      {"model", config_.model_name},
      {"messages", {{{"role", "user"}, {"content", prompt}}}},
      {"temperature", 0},
      {"seed", seed & 0x7fffffffffffffffULL},
  };
  auto result = client.Post(path_, headers, body.dump(), "application/json");
  if (!result) {
    throw Error(ErrorCode::kTransport, config_.endpoint,
                "request failed: " + httplib::to_string(result.error()));
  }
  if (result->status < 200 || result->status >= 300) {
    throw Error(ErrorCode::kTransport, config_.endpoint,
                "HTTP " + std::to_string(result->status));
  }
  try {
    auto reply = nlohmann::json::parse(result->body);
    return reply.at("choices").at(0).at("message").at("content")
        .get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kTransport, config_.endpoint,
                std::string("malformed reply: ") + e.what());
  }
}

}  // namespace divcap::augment
