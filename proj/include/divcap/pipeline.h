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

#ifndef DIVCAP_PIPELINE_H_
#define DIVCAP_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "divcap/backend.h"
#include "divcap/corpus.h"
#include "divcap/pool.h"

namespace divcap::augment {

struct PipelineOptions {
  std::string out_path;
  // Completed pools are appended here as they finish; on restart, videos
  // already present are not regenerated. Empty disables checkpointing.
  std::string checkpoint_path;
  // Per-video failures, one JSON object per line. Defaults to
  // "<out_path>.errors.jsonl".
  std::string errors_path;
  std::uint64_t seed = 0;
  std::size_t max_in_flight = 1;
  RetryPolicy retry;
  std::size_t min_target = kDefaultMinTarget;
  // Generate at most this many new pools and stop before writing out_path, as
  // if the process had been killed. Used to exercise resumption.
  std::optional<std::size_t> stop_after;
};

struct PipelineReport {
  std::size_t total = 0;
  std::size_t resumed = 0;    // taken from the checkpoint
  std::size_t generated = 0;  // produced by this run
  std::size_t failed = 0;
  bool interrupted = false;
};

// Writes one pool per line to out_path in video_id order. Output bytes depend
// only on the dataset, the backend's replies and the seed, not on
// max_in_flight or on how many restarts it took.
PipelineReport RunPipeline(const corpus::Dataset& dataset, Backend& backend,
                           const PipelineOptions& options);

}  // namespace divcap::augment

#endif  // DIVCAP_PIPELINE_H_
