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

#include "divcap/sweep.h"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "divcap/error.h"
#include "toml_util.h"

namespace divcap::train {
namespace {

using internal::GetDouble;
using internal::GetKinds;

std::vector<double> GetDoubles(const toml::node& node, std::string_view key) {
  const toml::array* arr = node.as_array();
  if (arr == nullptr || arr->empty()) {
    throw Error(ErrorCode::kInvalidArgument, std::string(key),
                "'" + std::string(key) + "' must be a non-empty number list");
  }
  std::vector<double> out;
  for (const toml::node& item : *arr) out.push_back(GetDouble(item, key));
  return out;
}

bool HasAny(const std::vector<CaptionKind>& kinds,
            std::initializer_list<CaptionKind> wanted) {
  for (CaptionKind k : wanted) {
    if (std::find(kinds.begin(), kinds.end(), k) != kinds.end()) return true;
  }
  return false;
}

std::string TomlText(const toml::table& table) {
  std::ostringstream out;
  out << table;
  return out.str();
}

}  // namespace

GroupRecall GroupRecallOf(const retrieval::EvalReport& report) {
  if (!report.has_groups) {
    throw Error(ErrorCode::kMissingKind, "evaluation lacks caption kinds");
  }
  using retrieval::Group;
  const auto& g = report.groups.groups;
  return {g.at(Group::kFull).r1, g.at(Group::kAll).r1,
          g.at(Group::kShort).r1, g.at(Group::kLong).r1,
          g.at(Group::kPartial).r1};
}

SeedData MakeSeedData(const SyntheticSpec& spec, std::uint64_t seed) {
  return {seed, GenerateSynthetic(spec, seed),
          GenerateSynthetic(spec, DeriveSeed(seed, "held-out"))};
}

retrieval::EvalReport TrainAndEvaluate(const TrainConfig& config,
                                       const SeedData& data) {
  TrainConfig cfg = config;
  cfg.seed = data.seed;
  const auto examples = PrepareExamples(data.train.dataset, data.train.pools,
                                        data.train.video, cfg);
  const FitResult fit = Fit(examples, cfg);
  const EncodedCorpus encoded = EncodeCorpus(
      fit.params, cfg, data.eval.dataset, data.eval.pools, data.eval.video);
  std::vector<std::string> ids;
  for (const auto& v : data.eval.dataset.videos) ids.push_back(v.video_id);
  return retrieval::Evaluate(encoded.text, encoded.video, ids, {});
}

GroupRecall MeanGroupRecall(const TrainConfig& config,
                            const std::vector<SeedData>& seeds) {
  GroupRecall mean;
  for (const SeedData& data : seeds) {
    const GroupRecall r = GroupRecallOf(TrainAndEvaluate(config, data));
    mean.full += r.full;
    mean.all += r.all;
    mean.shorts += r.shorts;
    mean.longs += r.longs;
    mean.partial += r.partial;
  }
  const double n = static_cast<double>(seeds.size());
  mean.full /= n;
  mean.all /= n;
  mean.shorts /= n;
  mean.longs /= n;
  mean.partial /= n;
  return mean;
}

SweepGrid ParseSweepGrid(std::string_view toml_text) {
  const toml::table root = internal::ParseToml(toml_text, "sweep grid");
  SweepGrid grid;
  if (const toml::table* base = root["base"].as_table()) {
    internal::ApplyTrainConfig(*base, &grid.base);
  }
  if (const toml::table* synthetic = root["synthetic"].as_table()) {
    grid.spec = ParseSyntheticSpec(TomlText(*synthetic));
  }
  if (const toml::node* seeds = root.get("seeds")) {
    const toml::array* arr = seeds->as_array();
    if (arr == nullptr || arr->empty()) {
      throw Error(ErrorCode::kInvalidArgument, "seeds",
                  "'seeds' must be a non-empty integer list");
    }
    grid.seeds.clear();
    for (const toml::node& s : *arr) {
      grid.seeds.push_back(internal::GetUnsigned(s, "seeds"));
    }
  }
  for (const auto& [key, node] : root) {
    const std::string_view k = key.str();
    if (k != "base" && k != "synthetic" && k != "seeds" && k != "grid" &&
        k != "cell") {
      throw Error(ErrorCode::kInvalidArgument, std::string(k),
                  "unknown sweep key '" + std::string(k) + "'");
    }
  }

  const SweepCell defaults{grid.base.eta, grid.base.alpha_t2t,
                           grid.base.alpha_proj, grid.base.allowed_kinds};
  if (const toml::array* cells = root["cell"].as_array()) {
    for (const toml::node& node : *cells) {
      const toml::table* t = node.as_table();
      if (t == nullptr) {
        throw Error(ErrorCode::kInvalidArgument, "cell", "cells must be tables");
      }
      SweepCell cell = defaults;
      for (const auto& [key, value] : *t) {
        const std::string_view k = key.str();
        if (k == "eta") {
          cell.eta = GetDouble(value, k);
        } else if (k == "alpha_t2t") {
          cell.alpha_t2t = GetDouble(value, k);
        } else if (k == "alpha_proj") {
          cell.alpha_proj = GetDouble(value, k);
        } else if (k == "allowed_kinds") {
          cell.allowed_kinds = GetKinds(value, k);
        } else {
          throw Error(ErrorCode::kInvalidArgument, std::string(k),
                      "unknown cell key '" + std::string(k) + "'");
        }
      }
      grid.cells.push_back(cell);
    }
  } else if (const toml::table* axes = root["grid"].as_table()) {
    std::vector<double> etas = {defaults.eta};
    std::vector<double> t2ts = {defaults.alpha_t2t};
    std::vector<double> projs = {defaults.alpha_proj};
    std::vector<std::vector<CaptionKind>> kinds = {defaults.allowed_kinds};
    for (const auto& [key, value] : *axes) {
      const std::string_view k = key.str();
      if (k == "eta") {
        etas = GetDoubles(value, k);
      } else if (k == "alpha_t2t") {
        t2ts = GetDoubles(value, k);
      } else if (k == "alpha_proj") {
        projs = GetDoubles(value, k);
      } else if (k == "allowed_kinds") {
        const toml::array* arr = value.as_array();
        if (arr == nullptr || arr->empty()) {
          throw Error(ErrorCode::kInvalidArgument, "allowed_kinds",
                      "'allowed_kinds' must be a list of kind lists");
        }
        kinds.clear();
        for (const toml::node& item : *arr) kinds.push_back(GetKinds(item, k));
      } else {
        throw Error(ErrorCode::kInvalidArgument, std::string(k),
                    "unknown grid axis '" + std::string(k) + "'");
      }
    }
    for (double eta : etas) {
      for (double proj : projs) {
        for (double t2t : t2ts) {
          for (const auto& ks : kinds) grid.cells.push_back({eta, t2t, proj, ks});
        }
      }
    }
  } else {
    grid.cells.push_back(defaults);
  }
  return grid;
}

SweepGrid LoadSweepGrid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, path, "cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return ParseSweepGrid(text.str());
}

nlohmann::json RunSweep(
    const SweepGrid& grid,
    const std::function<void(std::size_t, std::size_t)>& progress) {
  std::vector<SeedData> seeds;
  for (std::uint64_t s : grid.seeds) seeds.push_back(MakeSeedData(grid.spec, s));

  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    const SweepCell& cell = grid.cells[i];
    TrainConfig config = grid.base;
    config.eta = cell.eta;
    config.alpha_t2t = cell.alpha_t2t;
    config.alpha_proj = cell.alpha_proj;
    config.allowed_kinds = cell.allowed_kinds;
    nlohmann::json kinds = nlohmann::json::array();
    for (CaptionKind k : cell.allowed_kinds) kinds.push_back(std::string(KindName(k)));
    using K = CaptionKind;
    nlohmann::json row = {
        {"eta", cell.eta},
        {"alpha_proj", cell.alpha_proj},
        {"alpha_t2t", cell.alpha_t2t},
        {"allowed_kinds", kinds},
        {"sampled_types",
         {{"simplification", HasAny(cell.allowed_kinds, {K::kE, K::kI, K::kU})},
          {"joint", HasAny(cell.allowed_kinds, {K::kSE, K::kSI, K::kSU})},
          {"partial", HasAny(cell.allowed_kinds, {K::kP})}}}};
    try {
      const GroupRecall r = MeanGroupRecall(config, seeds);
      row["status"] = "ok";
      row["Full"] = r.full;
      row["All"] = r.all;
      row["Short"] = r.shorts;
      row["Long"] = r.longs;
    } catch (const Error& e) {
      row["status"] = "failed";
      row["error"] = {{"code", std::string(ErrorCodeName(e.code()))},
                      {"subject", e.subject()},
                      {"message", e.what()}};
    }
    rows.push_back(std::move(row));
    if (progress) progress(i + 1, grid.cells.size());
  }
  return {{"metric", "R@1 on a held-out synthetic corpus, mean over seeds"},
          {"seeds", grid.seeds},
          {"rows", rows}};
}

}  // namespace divcap::train
