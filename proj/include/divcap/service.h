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

#ifndef DIVCAP_SERVICE_H_
#define DIVCAP_SERVICE_H_

#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "divcap/survey.h"

namespace httplib {
class Server;
}

namespace divcap::service {

// Append-only JSONL store of survey responses with one record per
// (annotator, version, item). Appends are serialized and reach the disk
// (flush + fsync) before Append returns.
class ResponseLog {
 public:
  enum class AppendResult { kAppended, kDuplicate };

  // Replays an existing file. A final line without a newline is the remnant
  // of an interrupted write that was never acknowledged; it is cut off.
  ResponseLog(const std::string& path,
              const std::vector<survey::SurveyDoc>& surveys);
  ~ResponseLog();
  ResponseLog(const ResponseLog&) = delete;
  ResponseLog& operator=(const ResponseLog&) = delete;

  AppendResult Append(const survey::ResponseRecord& record);

  // Immutable view of the records appended so far, in log order.
  std::shared_ptr<const std::vector<survey::ResponseRecord>> Snapshot() const;
  std::size_t size() const { return Snapshot()->size(); }

 private:
  std::string path_;
  int fd_ = -1;
  mutable std::mutex mu_;
  std::set<std::tuple<int, std::string, std::string>> index_;
  std::shared_ptr<const std::vector<survey::ResponseRecord>> records_;
};

struct ServiceOptions {
  std::string survey_dir;
  std::string key_dir;  // empty: aggregates are unavailable
  std::string log_path;
  std::string static_dir;  // empty: no static files
};

struct Reply {
  int status = 200;
  std::string body;  // JSON
};

// Request handlers, independent of the transport.
class SurveyService {
 public:
  explicit SurveyService(const ServiceOptions& options);

  Reply GetSurvey(const std::string& version) const;
  Reply PostResponse(const std::string& body);
  Reply GetAggregate() const;
  Reply Health() const;

  // Routes: GET /api/surveys/{v}, POST /api/responses, GET /api/aggregate,
  // GET /healthz, and the static directory at / when configured.
  void Mount(httplib::Server& server);

  const ResponseLog& log() const { return *log_; }

 private:
  ServiceOptions options_;
  std::vector<survey::SurveyDoc> surveys_;
  bool has_keys_ = false;
  std::unique_ptr<ResponseLog> log_;
};

// Blocks serving on host:port until the process is stopped.
void Serve(const ServiceOptions& options, const std::string& host, int port);

}  // namespace divcap::service

#endif  // DIVCAP_SERVICE_H_
