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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "divcap/error.h"
#include "divcap/train.h"
#include "toml_util.h"

namespace divcap::train {
namespace internal {

toml::table ParseToml(std::string_view text, std::string_view source) {
  try {
    return toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << source << ":" << e.source().begin.line << ": "
        << e.description();
    throw Error(ErrorCode::kInvalidArgument, std::string(source), msg.str());
  }
}

double GetDouble(const toml::node& node, std::string_view key) {
  if (auto v = node.value<double>()) return *v;
  throw Error(ErrorCode::kInvalidArgument, std::string(key),
              "'" + std::string(key) + "' must be a number");
}

std::uint64_t GetUnsigned(const toml::node& node, std::string_view key) {
  auto v = node.value<std::int64_t>();
  if (!v || *v < 0) {
    throw Error(ErrorCode::kInvalidArgument, std::string(key),
                "'" + std::string(key) + "' must be a non-negative integer");
  }
  return static_cast<std::uint64_t>(*v);
}

std::vector<CaptionKind> GetKinds(const toml::node& node,
                                  std::string_view key) {
  const toml::array* arr = node.as_array();
  if (arr == nullptr) {
    throw Error(ErrorCode::kInvalidArgument, std::string(key),
                "'" + std::string(key) + "' must be an array of kind names");
  }
  std::vector<CaptionKind> kinds;
  for (const toml::node& item : *arr) {
    auto name = item.value<std::string>();
    auto kind = name ? ParseKind(*name) : std::nullopt;
    if (!kind) {
      throw Error(ErrorCode::kInvalidArgument, std::string(key),
                  "'" + std::string(key) + "' has an unknown kind");
    }
    kinds.push_back(*kind);
  }
  return kinds;
}

void ApplyTrainConfig(const toml::table& table, TrainConfig* config,
                      std::initializer_list<std::string_view> skip) {
  for (const auto& [key_node, node] : table) {
    const std::string_view key = key_node.str();
    if (std::find(skip.begin(), skip.end(), key) != skip.end()) continue;
    if (key == "eta") {
      config->eta = GetDouble(node, key);
    } else if (key == "alpha_t2t") {
      config->alpha_t2t = GetDouble(node, key);
    } else if (key == "alpha_proj") {
      config->alpha_proj = GetDouble(node, key);
    } else if (key == "tau") {
      config->tau = GetDouble(node, key);
    } else if (key == "lr") {
      config->lr = GetDouble(node, key);
    } else if (key == "batch_n") {
      config->batch_n = GetUnsigned(node, key);
    } else if (key == "epochs") {
      config->epochs = GetUnsigned(node, key);
    } else if (key == "seed") {
      config->seed = GetUnsigned(node, key);
    } else if (key == "workers") {
      config->workers = GetUnsigned(node, key);
    } else if (key == "unigram_only") {
      auto v = node.value<bool>();
      if (!v) {
        throw Error(ErrorCode::kInvalidArgument, "unigram_only",
                    "'unigram_only' must be a boolean");
      }
      config->unigram_only = *v;
    } else if (key == "allowed_kinds") {
      config->allowed_kinds = GetKinds(node, key);
    } else if (key == "dims") {
      const toml::table* dims = node.as_table();
      if (dims == nullptr) {
        throw Error(ErrorCode::kInvalidArgument, "dims", "'dims' must be a table");
      }
      for (const auto& [dkey_node, dnode] : *dims) {
        const std::string_view dkey = dkey_node.str();
        if (dkey == "hash_buckets") {
          config->dims.hash_buckets = GetUnsigned(dnode, dkey);
        } else if (dkey == "embed") {
          config->dims.embed = GetUnsigned(dnode, dkey);
        } else if (dkey == "video_feat") {
          config->dims.video_feat = GetUnsigned(dnode, dkey);
        } else {
          throw Error(ErrorCode::kInvalidArgument, std::string(dkey),
                      "unknown dims key '" + std::string(dkey) + "'");
        }
      }
    } else {
      throw Error(ErrorCode::kInvalidArgument, std::string(key),
                  "unknown config key '" + std::string(key) + "'");
    }
  }
}

}  // namespace internal

void ValidateConfig(const TrainConfig& c) {
  auto fail = [](const std::string& field, const std::string& why) {
    throw Error(ErrorCode::kInvalidArgument, field, field + " " + why);
  };
  if (!(c.eta >= 0.0 && c.eta <= 1.0)) fail("eta", "must be in [0, 1]");
  if (!(c.alpha_t2t >= 0.0) || !std::isfinite(c.alpha_t2t)) {
    fail("alpha_t2t", "must be >= 0");
  }
  if (!(c.alpha_proj >= 0.0) || !std::isfinite(c.alpha_proj)) {
    fail("alpha_proj", "must be >= 0");
  }
  if (!(c.tau > 0.0) || !std::isfinite(c.tau)) fail("tau", "must be > 0");
  if (!(c.lr > 0.0) || !std::isfinite(c.lr)) fail("lr", "must be > 0");
  if (c.batch_n < 2) fail("batch_n", "must be >= 2");
  if (c.allowed_kinds.empty()) fail("allowed_kinds", "must not be empty");
  for (CaptionKind k : c.allowed_kinds) {
    if (std::find(std::begin(kTrainableKinds), std::end(kTrainableKinds), k) ==
        std::end(kTrainableKinds)) {
      fail("allowed_kinds", "may not contain '" + std::string(KindName(k)) + "'");
    }
  }
  if (c.dims.hash_buckets < 1 || c.dims.hash_buckets > (std::size_t{1} << 31)) {
    fail("dims.hash_buckets", "must be in [1, 2^31]");
  }
  if (c.dims.embed < 1) fail("dims.embed", "must be >= 1");
  if (c.dims.video_feat < 1) fail("dims.video_feat", "must be >= 1");
  if (c.workers < 1) fail("workers", "must be >= 1");
}

TrainConfig ParseTrainConfig(std::string_view toml_text) {
  TrainConfig config;
  internal::ApplyTrainConfig(internal::ParseToml(toml_text, "train config"),
                             &config);
  ValidateConfig(config);
  return config;
}

TrainConfig LoadTrainConfig(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, path, "cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  TrainConfig config;
  internal::ApplyTrainConfig(internal::ParseToml(text.str(), path), &config);
  ValidateConfig(config);
  return config;
}

nlohmann::json ConfigToJson(const TrainConfig& c) {
  nlohmann::json kinds = nlohmann::json::array();
  for (CaptionKind k : c.allowed_kinds) kinds.push_back(std::string(KindName(k)));
  return {{"eta", c.eta},
          {"alpha_t2t", c.alpha_t2t},
          {"alpha_proj", c.alpha_proj},
          {"tau", c.tau},
          {"lr", c.lr},
          {"batch_n", c.batch_n},
          {"epochs", c.epochs},
          {"seed", c.seed},
          {"allowed_kinds", kinds},
          {"unigram_only", c.unigram_only},
          {"workers", c.workers},
          {"dims",
           {{"hash_buckets", c.dims.hash_buckets},
            {"embed", c.dims.embed},
            {"video_feat", c.dims.video_feat}}}};
}

}  // namespace divcap::train
