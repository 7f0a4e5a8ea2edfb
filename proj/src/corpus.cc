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

#include "divcap/corpus.h"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "divcap/error.h"
#include "divcap/text.h"
#include "json.hpp"

namespace divcap::corpus {
namespace {

using nlohmann::json;

[[noreturn]] void Malformed(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kMalformedLine, std::to_string(line),
              "line " + std::to_string(line) + ": " + what);
}

[[noreturn]] void Violation(const std::string& video_id,
                            const std::string& rule) {
  throw Error(ErrorCode::kInvariantViolation, video_id,
              "video '" + video_id + "' violates rule '" + rule + "'");
}

double RequireNumber(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    Malformed(line, std::string("field '") + key + "' must be a number");
  }
  return it->get<double>();
}

EventSegment ParseEvent(const json& obj, std::size_t line) {
  if (!obj.is_object()) Malformed(line, "event must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (key != "start_s" && key != "end_s" && key != "caption") {
      Malformed(line, "unknown event field '" + key + "'");
    }
  }
  EventSegment event;
  event.start_s = RequireNumber(obj, "start_s", line);
  event.end_s = RequireNumber(obj, "end_s", line);
  auto it = obj.find("caption");
  if (it == obj.end() || !it->is_string()) {
    Malformed(line, "field 'caption' must be a string");
  }
  event.caption = it->get<std::string>();
  return event;
}

Video ParseVideoLine(const std::string& text, std::size_t line) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::parse_error& e) {
    Malformed(line, e.what());
  }
  if (!obj.is_object()) Malformed(line, "record must be a JSON object");
  for (const auto& [key, _] : obj.items()) {
    if (key != "video_id" && key != "duration_s" && key != "events" &&
        key != "feature_ref") {
      Malformed(line, "unknown field '" + key + "'");
    }
  }
  Video video;
  auto id = obj.find("video_id");
  if (id == obj.end() || !id->is_string()) {
    Malformed(line, "field 'video_id' must be a string");
  }
  video.video_id = id->get<std::string>();
  video.duration_s = RequireNumber(obj, "duration_s", line);
  auto events = obj.find("events");
  if (events == obj.end() || !events->is_array()) {
    Malformed(line, "field 'events' must be an array");
  }
  for (const auto& e : *events) video.events.push_back(ParseEvent(e, line));
  if (auto ref = obj.find("feature_ref"); ref != obj.end()) {
    if (!ref->is_string()) Malformed(line, "field 'feature_ref' must be a string");
    video.feature_ref = ref->get<std::string>();
  }
  return video;
}

}  // namespace

void ValidateVideo(const Video& video) {
  if (video.events.empty()) Violation(video.video_id, "events_nonempty");
  for (std::size_t i = 0; i < video.events.size(); ++i) {
    const EventSegment& e = video.events[i];
    if (e.start_s < 0.0) Violation(video.video_id, "nonnegative_start");
    if (!(e.start_s < e.end_s)) Violation(video.video_id, "start_before_end");
    if (Trim(e.caption).empty()) Violation(video.video_id, "caption_nonempty");
    if (i > 0 && e.start_s < video.events[i - 1].start_s) {
      Violation(video.video_id, "sorted");
    }
    if (e.end_s > video.duration_s) {
      Violation(video.video_id, "end_within_duration");
    }
  }
}

Dataset ParseDatasetStream(std::istream& in, std::string name,
                           std::string split) {
  Dataset dataset{std::move(name), std::move(split), {}};
  std::unordered_set<std::string> seen;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (Trim(text).empty()) continue;
    Video video = ParseVideoLine(text, line);
    try {
      ValidateVideo(video);
    } catch (const Error& e) {
      throw Error(e.code(), e.subject(),
                  "line " + std::to_string(line) + ": " + e.what());
    }
    if (!seen.insert(video.video_id).second) {
      throw Error(ErrorCode::kDuplicateId, video.video_id,
                  "line " + std::to_string(line) + ": duplicate video_id '" +
                      video.video_id + "'");
    }
    dataset.videos.push_back(std::move(video));
  }
  return dataset;
}

Dataset ParseDataset(const std::string& path, std::string name,
                     std::string split) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, path, "cannot open " + path);
  return ParseDatasetStream(in, std::move(name), std::move(split));
}

std::string SerializeVideo(const Video& video) {
  json obj;
  obj["video_id"] = video.video_id;
  obj["duration_s"] = video.duration_s;
  json events = json::array();
  for (const EventSegment& e : video.events) {
    events.push_back(
        {{"start_s", e.start_s}, {"end_s", e.end_s}, {"caption", e.caption}});
  }
  obj["events"] = std::move(events);
  if (video.feature_ref) obj["feature_ref"] = *video.feature_ref;
  return obj.dump();
}

void WriteDataset(const Dataset& dataset, std::ostream& out) {
  for (const Video& v : dataset.videos) out << SerializeVideo(v) << '\n';
}

void WriteDatasetFile(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, path, "cannot write " + path);
  WriteDataset(dataset, out);
}

std::string JoinEventRange(const Video& video, std::size_t first,
                           std::size_t last) {
  std::string out;
  for (std::size_t i = first; i <= last && i < video.events.size(); ++i) {
    if (!out.empty()) out.push_back(' ');
    out.append(Trim(video.events[i].caption));
  }
  return out;
}

std::string FullParagraph(const Video& video) {
  if (video.events.empty()) return {};
  return JoinEventRange(video, 0, video.events.size() - 1);
}

FilterResult FilterOutliers(const Dataset& dataset, std::size_t max_words) {
  if (max_words < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_words must be >= 1");
  }
  FilterResult result{Dataset{dataset.name, dataset.split, {}}, {}};
  for (const Video& v : dataset.videos) {
    if (CountWords(FullParagraph(v)) > max_words) {
      result.removed.push_back(v.video_id);
    } else {
      result.kept.videos.push_back(v);
    }
  }
  return result;
}

const Video* FindVideo(const Dataset& dataset, const std::string& video_id) {
  for (const Video& v : dataset.videos) {
    if (v.video_id == video_id) return &v;
  }
  return nullptr;
}

}  // namespace divcap::corpus
