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

#include "divcap/service.h"

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "divcap/error.h"
#include "httplib.h"
#include "json.hpp"

namespace divcap::service {
namespace {

using nlohmann::json;

Reply ErrorReply(int status, std::string_view code, const std::string& message) {
  return {status, json{{"error", {{"code", code}, {"message", message}}}}.dump()};
}

int StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownItem: return 404;
    default: return 400;
  }
}

std::string UtcNow() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void WriteAll(int fd, const std::string& data, const std::string& path) {
  std::size_t done = 0;
  while (done < data.size()) {
    const ssize_t n = ::write(fd, data.data() + done, data.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kIo, path, "write to " + path + " failed");
    }
    done += static_cast<std::size_t>(n);
  }
}

}  // namespace

ResponseLog::ResponseLog(const std::string& path,
                         const std::vector<survey::SurveyDoc>& surveys)
    : path_(path) {
  auto records = std::make_shared<std::vector<survey::ResponseRecord>>();
  if (std::filesystem::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    std::string content((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
    const std::size_t complete = content.rfind('\n') == std::string::npos
                                     ? 0
                                     : content.rfind('\n') + 1;
    if (complete < content.size()) {
      std::cerr << "divcap serve: dropping an unterminated final line of "
                << path << "\n";
      std::filesystem::resize_file(path, complete);
    }
    std::istringstream lines(content.substr(0, complete));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
      ++lineno;
      if (line.empty()) continue;
      json j;
      try {
        j = json::parse(line);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kMalformedLine, path + ":" + std::to_string(lineno),
                    e.what());
      }
      survey::ResponseRecord r = survey::ParseResponse(j, surveys);
      if (!index_.insert({r.version_id, r.item_id, r.annotator_id}).second) {
        throw Error(ErrorCode::kDuplicateId, path + ":" + std::to_string(lineno),
                    "repeated response for '" + r.item_id + "' by '" +
                        r.annotator_id + "'");
      }
      records->push_back(std::move(r));
    }
  }
  fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) throw Error(ErrorCode::kIo, path, "cannot open " + path);
  records_ = std::move(records);
}

ResponseLog::~ResponseLog() {
  if (fd_ >= 0) ::close(fd_);
}

ResponseLog::AppendResult ResponseLog::Append(
    const survey::ResponseRecord& record) {
  std::lock_guard<std::mutex> lock(mu_);
  if (index_.count({record.version_id, record.item_id, record.annotator_id})) {
    return AppendResult::kDuplicate;
  }
  WriteAll(fd_, survey::ResponseToJson(record).dump() + "\n", path_);
  if (::fsync(fd_) != 0) throw Error(ErrorCode::kIo, path_, "fsync failed");
  index_.insert({record.version_id, record.item_id, record.annotator_id});
  auto next = std::make_shared<std::vector<survey::ResponseRecord>>(*records_);
  next->push_back(record);
  records_ = std::move(next);
  return AppendResult::kAppended;
}

std::shared_ptr<const std::vector<survey::ResponseRecord>> ResponseLog::Snapshot()
    const {
  std::lock_guard<std::mutex> lock(mu_);
  return records_;
}

SurveyService::SurveyService(const ServiceOptions& options)
    : options_(options),
      surveys_(survey::LoadSurveys(options.survey_dir, options.key_dir)),
      has_keys_(!options.key_dir.empty()),
      log_(std::make_unique<ResponseLog>(options.log_path, surveys_)) {}

Reply SurveyService::GetSurvey(const std::string& version) const {
  for (const survey::SurveyDoc& doc : surveys_) {
    if (std::to_string(doc.version_id) == version) {
      return {200, survey::SurveyToPublicJson(doc).dump()};
    }
  }
  return ErrorReply(404, "UnknownVersion", "no survey version '" + version + "'");
}

Reply SurveyService::PostResponse(const std::string& body) {
  json j;
  try {
    j = json::parse(body);
  } catch (const json::exception& e) {
    return ErrorReply(400, "MalformedJson", e.what());
  }
  survey::ResponseRecord record;
  try {
    record = survey::ParseResponse(j, surveys_);
  } catch (const Error& e) {
    return ErrorReply(StatusFor(e.code()), ErrorCodeName(e.code()), e.what());
  }
  if (record.timestamp.empty()) record.timestamp = UtcNow();
  if (log_->Append(record) == ResponseLog::AppendResult::kDuplicate) {
    return ErrorReply(409, "Duplicate",
                      "annotator '" + record.annotator_id +
                          "' already answered '" + record.item_id + "'");
  }
  return {201, survey::ResponseToJson(record).dump()};
}

Reply SurveyService::GetAggregate() const {
  if (!has_keys_) {
    return ErrorReply(409, "NoKeys", "the server was started without answer keys");
  }
  const auto records = log_->Snapshot();
  return {200, survey::ReportText(survey::Aggregate(*records, surveys_))};
}

Reply SurveyService::Health() const {
  return {200, json{{"status", "ok"},
                    {"versions", surveys_.size()},
                    {"responses", log_->size()},
                    {"aggregate", has_keys_}}
                   .dump()};
}

void SurveyService::Mount(httplib::Server& server) {
  auto send = [](httplib::Response& res, const Reply& reply) {
    res.status = reply.status;
    res.set_content(reply.body, "application/json; charset=utf-8");
  };
  server.Get(R"(/api/surveys/([^/]+))",
             [this, send](const httplib::Request& req, httplib::Response& res) {
               send(res, GetSurvey(req.matches[1]));
             });
  server.Post("/api/responses",
              [this, send](const httplib::Request& req, httplib::Response& res) {
                send(res, PostResponse(req.body));
              });
  server.Get("/api/aggregate",
             [this, send](const httplib::Request&, httplib::Response& res) {
               send(res, GetAggregate());
             });
  server.Get("/healthz",
             [this, send](const httplib::Request&, httplib::Response& res) {
               send(res, Health());
             });
  server.set_exception_handler(
      [send](const httplib::Request&, httplib::Response& res,
             std::exception_ptr ep) {
        try {
          std::rethrow_exception(ep);
        } catch (const std::exception& e) {
          send(res, ErrorReply(500, "Internal", e.what()));
        }
      });
  if (!options_.static_dir.empty() &&
      !server.set_mount_point("/", options_.static_dir)) {
    throw Error(ErrorCode::kIo, options_.static_dir,
                "cannot serve static files from " + options_.static_dir);
  }
}

void Serve(const ServiceOptions& options, const std::string& host, int port) {
  SurveyService service(options);
  httplib::Server server;
  service.Mount(server);
  std::cerr << "divcap serve: listening on " << host << ":" << port << "\n";
  if (!server.listen(host, port)) {
    throw Error(ErrorCode::kIo, host + ":" + std::to_string(port),
                "cannot listen on " + host + ":" + std::to_string(port));
  }
}

}  // namespace divcap::service
