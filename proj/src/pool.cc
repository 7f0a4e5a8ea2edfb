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

#include "divcap/pool.h"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <thread>

#include "divcap/error.h"
#include "divcap/text.h"

namespace divcap::augment {
namespace {

using nlohmann::json;

struct FamilyPlan {
  PromptFamily family;
  CaptionKind kinds[3];  // in ExpectedLabels order
};

constexpr FamilyPlan kPlans[] = {
    {PromptFamily::kSummarization,
     {CaptionKind::kS, CaptionKind::kM, CaptionKind::kL}},
    {PromptFamily::kSimplification,
     {CaptionKind::kE, CaptionKind::kI, CaptionKind::kU}},
    {PromptFamily::kJoint,
     {CaptionKind::kSE, CaptionKind::kSI, CaptionKind::kSU}},
};

bool Retryable(ErrorCode code) {
  return code == ErrorCode::kTransport || code == ErrorCode::kMissingLabel ||
         code == ErrorCode::kEmptySection;
}

[[noreturn]] void PoolViolation(const std::string& video_id,
                                const std::string& rule) {
  throw Error(ErrorCode::kInvariantViolation, video_id,
              "pool '" + video_id + "' violates rule '" + rule + "'");
}

}  // namespace

PartialCaption DurationSubset(const corpus::Video& video, Rng& rng) {
  const std::size_t n = video.events.size();
  if (n <= 1) return {0, 0, corpus::FullParagraph(video)};
  std::size_t first;
  std::size_t last;
  do {
    first = rng.UniformIndex(n);
    last = rng.UniformRange(first, n - 1);
  } while (first == 0 && last == n - 1);
  return {first, last, corpus::JoinEventRange(video, first, last)};
}

RetryPolicy RetryPolicyFrom(const BackendConfig& config) {
  RetryPolicy policy;
  policy.retries = config.retries;
  policy.initial_backoff_s = config.initial_backoff_s;
  policy.max_backoff_s = config.max_backoff_s;
  return policy;
}

CaptionPool GeneratePool(const corpus::Video& video, Backend& backend,
                         const RetryPolicy& policy, std::uint64_t seed,
                         std::size_t min_target) {
  CaptionPool pool;
  pool.video_id = video.video_id;
  pool.provenance.backend_id = backend.id();

  const std::string paragraph = corpus::FullParagraph(video);
  const WordTargets targets =
      ComputeWordTargets(CountWords(paragraph), min_target);
  pool.provenance.targets = targets;
  pool.captions[CaptionKind::kF] = paragraph;

  Rng partial_rng(DeriveSeed(seed, video.video_id + "/partial"));
  PartialCaption partial = DurationSubset(video, partial_rng);
  pool.partial_first = partial.first;
  pool.partial_last = partial.last;
  pool.captions[CaptionKind::kP] = std::move(partial.text);

  std::string all_prompts;
  for (const FamilyPlan& plan : kPlans) {
    const std::string family(FamilyName(plan.family));
    const std::string prompt = BuildPrompt(plan.family, paragraph, targets);
    all_prompts += prompt;
    all_prompts += '\x1f';
    const std::vector<std::string> labels = ExpectedLabels(plan.family);

    std::map<std::string, std::string> sections;
    std::size_t attempt = 0;
    std::string last_error;
    const std::size_t max_attempts = policy.retries + 1;
    while (true) {
      ++attempt;
      try {
        const std::uint64_t call_seed = DeriveSeed(
            seed, video.video_id + "/" + family + "/" + std::to_string(attempt));
        sections = ParseLabeledResponse(backend.Complete(prompt, call_seed),
                                        labels);
        break;
      } catch (const Error& e) {
        if (!Retryable(e.code())) throw;
        last_error = e.what();
      }
      if (attempt >= max_attempts) {
        throw Error(ErrorCode::kBackendExhausted, family,
                    video.video_id + ": " + family + " failed after " +
                        std::to_string(attempt) + " attempts: " + last_error);
      }
      const double backoff =
          std::min(policy.max_backoff_s,
                   policy.initial_backoff_s *
                       static_cast<double>(1ULL << std::min<std::size_t>(
                                               attempt - 1, 30)));
      if (backoff > 0.0) {
        if (policy.sleep) {
          policy.sleep(backoff);
        } else {
          std::this_thread::sleep_for(std::chrono::duration<double>(backoff));
        }
      }
    }
    pool.provenance.attempts_by_family[family] = attempt;
    pool.provenance.attempts = std::max(pool.provenance.attempts, attempt);
    for (std::size_t k = 0; k < labels.size(); ++k) {
      pool.captions[plan.kinds[k]] = sections.at(labels[k]);
    }
  }
  pool.provenance.prompt_hash = Hex64(Fnv1a64(all_prompts));
  ValidatePool(pool, &video);
  return pool;
}

void ValidatePool(const CaptionPool& pool, const corpus::Video* video) {
  for (CaptionKind kind : kAllKinds) {
    auto it = pool.captions.find(kind);
    if (it == pool.captions.end() || Trim(it->second).empty()) {
      PoolViolation(pool.video_id, "kind_" + std::string(KindName(kind)));
    }
  }
  if (pool.partial_first > pool.partial_last) {
    PoolViolation(pool.video_id, "partial_range_order");
  }
  if (video == nullptr) return;
  if (video->video_id != pool.video_id) PoolViolation(pool.video_id, "video_id");
  if (pool.partial_last >= video->events.size()) {
    PoolViolation(pool.video_id, "partial_range_bounds");
  }
  if (pool.captions.at(CaptionKind::kP) !=
      corpus::JoinEventRange(*video, pool.partial_first, pool.partial_last)) {
    PoolViolation(pool.video_id, "partial_text");
  }
}

json PoolToJson(const CaptionPool& pool) {
  json captions = json::object();
  for (const auto& [kind, text] : pool.captions) {
    captions[std::string(KindName(kind))] = text;
  }
  const Provenance& p = pool.provenance;
  json provenance = {
      {"backend_id", p.backend_id},
      {"attempts", p.attempts},
      {"attempts_by_family", p.attempts_by_family},
      {"prompt_hash", p.prompt_hash},
      {"word_targets", {p.targets.t1, p.targets.t4, p.targets.t7}},
  };
  return {{"video_id", pool.video_id},
          {"captions", std::move(captions)},
          {"partial_range", {pool.partial_first, pool.partial_last}},
          {"provenance", std::move(provenance)}};
}

CaptionPool PoolFromJson(const json& obj) {
  CaptionPool pool;
  try {
    pool.video_id = obj.at("video_id").get<std::string>();
    for (const auto& [name, text] : obj.at("captions").items()) {
      auto kind = ParseKind(name);
      if (!kind) {
        throw Error(ErrorCode::kInvariantViolation, pool.video_id,
                    "unknown caption kind '" + name + "'");
      }
      pool.captions[*kind] = text.get<std::string>();
    }
    const json& range = obj.at("partial_range");
    pool.partial_first = range.at(0).get<std::size_t>();
    pool.partial_last = range.at(1).get<std::size_t>();
    if (auto it = obj.find("provenance"); it != obj.end()) {
      Provenance& p = pool.provenance;
      p.backend_id = it->value("backend_id", "");
      p.attempts = it->value("attempts", std::size_t{0});
      if (auto f = it->find("attempts_by_family"); f != it->end()) {
        p.attempts_by_family = f->get<std::map<std::string, std::size_t>>();
      }
      p.prompt_hash = it->value("prompt_hash", "");
      if (auto w = it->find("word_targets"); w != it->end() && w->size() == 3) {
        p.targets = {(*w)[0].get<std::size_t>(), (*w)[1].get<std::size_t>(),
                     (*w)[2].get<std::size_t>()};
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kMalformedLine, pool.video_id,
                std::string("bad pool record: ") + e.what());
  }
  ValidatePool(pool);
  return pool;
}

std::string SerializePool(const CaptionPool& pool) {
  ValidatePool(pool);
  return PoolToJson(pool).dump();
}

std::vector<CaptionPool> ReadPools(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, path, "cannot open " + path);
  std::vector<CaptionPool> pools;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (Trim(line).empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::kMalformedLine, std::to_string(number),
                  path + " line " + std::to_string(number) + ": " + e.what());
    }
    pools.push_back(PoolFromJson(obj));
  }
  return pools;
}

void WritePools(const std::vector<CaptionPool>& pools, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, path, "cannot write " + path);
  for (const CaptionPool& pool : pools) out << SerializePool(pool) << '\n';
}

}  // namespace divcap::augment
