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

#include "divcap/pipeline.h"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>
#include <vector>

#include "divcap/error.h"
#include "divcap/text.h"
#include "json.hpp"

namespace divcap::augment {
namespace {

using nlohmann::json;

// Loads completed pools keyed by video id. A torn final line from an
// interrupted write is ignored, as is anything that no longer validates
// against the dataset.
std::map<std::string, std::string> LoadCheckpoint(
    const std::string& path,
    const std::map<std::string, const corpus::Video*>& videos) {
  std::map<std::string, std::string> done;
  if (path.empty()) return done;
  std::ifstream in(path);
  if (!in) return done;
  std::string line;
  while (std::getline(in, line)) {
    if (Trim(line).empty()) continue;
    try {
      CaptionPool pool = PoolFromJson(json::parse(line));
      auto it = videos.find(pool.video_id);
      if (it == videos.end()) continue;
      ValidatePool(pool, it->second);
      done[pool.video_id] = SerializePool(pool);
    } catch (const std::exception&) {
      continue;
    }
  }
  return done;
}

bool EndsMidLine(const std::string& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in || in.tellg() <= 0) return false;
  in.seekg(-1, std::ios::end);
  return in.get() != '\n';
}

struct Slot {
  enum class State { kPending, kDone, kFailed } state = State::kPending;
  std::string line;
  std::string code;
  std::string subject;
  std::string error;
};

}  // namespace

PipelineReport RunPipeline(const corpus::Dataset& dataset, Backend& backend,
                           const PipelineOptions& options) {
  if (options.max_in_flight < 1) {
    throw Error(ErrorCode::kInvalidArgument, "max_in_flight must be >= 1");
  }
  std::map<std::string, const corpus::Video*> videos;
  for (const corpus::Video& v : dataset.videos) videos[v.video_id] = &v;

  PipelineReport report;
  report.total = videos.size();
  std::map<std::string, std::string> done =
      LoadCheckpoint(options.checkpoint_path, videos);
  report.resumed = done.size();

  std::vector<const corpus::Video*> todo;
  for (const auto& [id, video] : videos) {
    if (!done.contains(id)) todo.push_back(video);
  }
  if (options.stop_after && *options.stop_after < todo.size()) {
    todo.resize(*options.stop_after);
    report.interrupted = true;
  }

  std::ofstream checkpoint;
  if (!options.checkpoint_path.empty()) {
    const bool torn_tail = EndsMidLine(options.checkpoint_path);
    checkpoint.open(options.checkpoint_path, std::ios::binary | std::ios::app);
    if (!checkpoint) {
      throw Error(ErrorCode::kIo, options.checkpoint_path,
                  "cannot open checkpoint " + options.checkpoint_path);
    }
    // Terminate a torn record so the next append starts on its own line.
    if (torn_tail) checkpoint << '\n';
  }
  const std::string errors_path = options.errors_path.empty()
                                      ? options.out_path + ".errors.jsonl"
                                      : options.errors_path;
  std::ofstream errors(errors_path, std::ios::binary | std::ios::trunc);

  std::vector<Slot> slots(todo.size());
  std::mutex mu;
  std::size_t next_flush = 0;
  std::atomic<std::size_t> next_claim{0};

  // Results are committed in video_id order regardless of which worker
  // finishes first.
  auto flush_ready = [&]() {
    while (next_flush < slots.size() &&
           slots[next_flush].state != Slot::State::kPending) {
      Slot& slot = slots[next_flush];
      if (slot.state == Slot::State::kDone) {
        if (checkpoint.is_open()) {
          checkpoint << slot.line << '\n';
          checkpoint.flush();
        }
        done[todo[next_flush]->video_id] = std::move(slot.line);
        ++report.generated;
      } else {
        json record = {{"video_id", todo[next_flush]->video_id},
                       {"code", slot.code},
                       {"subject", slot.subject},
                       {"error", slot.error}};
        errors << record.dump() << '\n';
        errors.flush();
        ++report.failed;
      }
      ++next_flush;
    }
  };

  auto worker = [&]() {
    while (true) {
      const std::size_t k = next_claim.fetch_add(1);
      if (k >= todo.size()) return;
      Slot result;
      try {
        CaptionPool pool = GeneratePool(*todo[k], backend, options.retry,
                                        options.seed, options.min_target);
        result.line = SerializePool(pool);
        result.state = Slot::State::kDone;
      } catch (const Error& e) {
        result.code = ErrorCodeName(e.code());
        result.subject = e.subject();
        result.error = e.what();
        result.state = Slot::State::kFailed;
      } catch (const std::exception& e) {
        result.code = "Internal";
        result.error = e.what();
        result.state = Slot::State::kFailed;
      }
      std::lock_guard<std::mutex> lock(mu);
      slots[k] = std::move(result);
      flush_ready();
    }
  };

  const std::size_t n_workers =
      std::min<std::size_t>(options.max_in_flight, std::max<std::size_t>(todo.size(), 1));
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (std::size_t w = 0; w < n_workers; ++w) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  if (report.interrupted) return report;

  const std::string tmp = options.out_path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, tmp, "cannot write " + tmp);
    for (const auto& [id, line] : done) out << line << '\n';
  }
  std::filesystem::rename(tmp, options.out_path);
  return report;
}

}  // namespace divcap::augment
