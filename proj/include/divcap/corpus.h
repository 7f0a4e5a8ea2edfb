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

#ifndef DIVCAP_CORPUS_H_
#define DIVCAP_CORPUS_H_

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace divcap::corpus {

// One timestamped event of a long video and its caption.
struct EventSegment {
  double start_s = 0.0;
  double end_s = 0.0;
  std::string caption;

  bool operator==(const EventSegment&) const = default;
};

struct Video {
  std::string video_id;
  double duration_s = 0.0;
  std::vector<EventSegment> events;
  // Optional row id into a table of precomputed video features.
  std::optional<std::string> feature_ref;

  bool operator==(const Video&) const = default;
};

struct Dataset {
  std::string name;
  std::string split;
  std::vector<Video> videos;

  bool operator==(const Dataset&) const = default;
};

// Checks the per-video invariants and throws Error(kInvariantViolation) naming
// the first broken rule: "events_nonempty", "nonnegative_start",
// "start_before_end", "caption_nonempty", "sorted", "end_within_duration".
void ValidateVideo(const Video& video);

// Reads Dataset JSONL. Blank lines are skipped. Errors carry 1-based line
// numbers in their message; the subject is the video id when known.
Dataset ParseDataset(const std::string& path, std::string name = {},
                     std::string split = {});
Dataset ParseDatasetStream(std::istream& in, std::string name = {},
                           std::string split = {});

// One JSON object per video, LF-terminated.
std::string SerializeVideo(const Video& video);
void WriteDataset(const Dataset& dataset, std::ostream& out);
void WriteDatasetFile(const Dataset& dataset, const std::string& path);

// Segment captions, each trimmed, joined by a single space (caption kind f).
std::string FullParagraph(const Video& video);

// Space-joined trimmed captions of events [first, last].
std::string JoinEventRange(const Video& video, std::size_t first,
                           std::size_t last);

inline constexpr std::size_t kDefaultMaxWords = 512;

struct FilterResult {
  Dataset kept;
  std::vector<std::string> removed;
};

// Drops videos whose full paragraph has more than max_words words.
FilterResult FilterOutliers(const Dataset& dataset,
                            std::size_t max_words = kDefaultMaxWords);

const Video* FindVideo(const Dataset& dataset, const std::string& video_id);

}  // namespace divcap::corpus

#endif  // DIVCAP_CORPUS_H_
