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

#ifndef DIVCAP_POOL_H_
#define DIVCAP_POOL_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "divcap/backend.h"
#include "divcap/caption.h"
#include "divcap/corpus.h"
#include "divcap/prompts.h"
#include "divcap/rng.h"
#include "json.hpp"

namespace divcap::augment {

struct Provenance {
  std::string backend_id;
  // Most attempts any single prompt needed before a usable reply.
  std::size_t attempts = 0;
  std::map<std::string, std::size_t> attempts_by_family;
  std::string prompt_hash;
  WordTargets targets;

  bool operator==(const Provenance&) const = default;
};

struct CaptionPool {
  std::string video_id;
  std::map<CaptionKind, std::string> captions;
  std::size_t partial_first = 0;
  std::size_t partial_last = 0;
  Provenance provenance;

  bool operator==(const CaptionPool&) const = default;
};

struct PartialCaption {
  std::size_t first;
  std::size_t last;
  std::string text;
};

// Picks a contiguous event range [first, last]. With a single event the range
// is the whole video; otherwise the full range is resampled away.
PartialCaption DurationSubset(const corpus::Video& video, Rng& rng);

struct RetryPolicy {
  std::size_t retries = 3;
  double initial_backoff_s = 1.0;
  double max_backoff_s = 30.0;
  // Replaceable for tests; defaults to sleeping the calling thread.
  std::function<void(double seconds)> sleep;
};

RetryPolicy RetryPolicyFrom(const BackendConfig& config);

// Issues the summarization, simplification and joint prompts (retrying each on
// transport or parse failure) and assembles all eleven captions. Per-video
// randomness is derived from `seed` and the video id. Throws
// Error(kBackendExhausted) with the family name as subject.
CaptionPool GeneratePool(const corpus::Video& video, Backend& backend,
                         const RetryPolicy& policy, std::uint64_t seed,
                         std::size_t min_target = kDefaultMinTarget);

// Throws Error(kInvariantViolation). When `video` is given the partial caption
// and range are checked against its events.
void ValidatePool(const CaptionPool& pool,
                  const corpus::Video* video = nullptr);

nlohmann::json PoolToJson(const CaptionPool& pool);
CaptionPool PoolFromJson(const nlohmann::json& obj);
std::string SerializePool(const CaptionPool& pool);  // one line, no newline

// Reads a pool JSONL file, validating every record.
std::vector<CaptionPool> ReadPools(const std::string& path);
void WritePools(const std::vector<CaptionPool>& pools, const std::string& path);

}  // namespace divcap::augment

#endif  // DIVCAP_POOL_H_
