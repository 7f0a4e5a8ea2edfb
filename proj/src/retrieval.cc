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

#include "divcap/retrieval.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "divcap/error.h"

namespace divcap::retrieval {
namespace {

std::vector<double> NormalizedRows(const EmbeddingTable& table) {
  const std::size_t d = table.dim();
  std::vector<double> out(table.size() * d);
  for (std::size_t i = 0; i < table.size(); ++i) {
    auto row = table.row(i);
    double norm = 0.0;
    for (float v : row) norm += static_cast<double>(v) * v;
    norm = std::sqrt(norm);
    for (std::size_t k = 0; k < d; ++k) {
      out[i * d + k] = norm > 0.0 ? row[k] / norm : 0.0;
    }
  }
  return out;
}

nlohmann::json MetricsToJson(const Metrics& m) {
  return {{"R@1", m.r1}, {"R@5", m.r5}, {"R@10", m.r10}, {"AvgR", m.avg_r}};
}

Metrics MeanOf(const std::vector<Metrics>& items) {
  Metrics out;
  for (const auto& m : items) {
    out.r1 += m.r1;
    out.r5 += m.r5;
    out.r10 += m.r10;
    out.avg_r += m.avg_r;
  }
  const double n = static_cast<double>(items.size());
  out.r1 /= n;
  out.r5 /= n;
  out.r10 /= n;
  out.avg_r /= n;
  return out;
}

}  // namespace

SimilarityMatrix Similarity(const EmbeddingTable& queries,
                            const EmbeddingTable& targets) {
  if (queries.dim() != targets.dim() && queries.size() && targets.size()) {
    throw Error(ErrorCode::kDimMismatch,
                "query dim " + std::to_string(queries.dim()) +
                    " != target dim " + std::to_string(targets.dim()));
  }
  SimilarityMatrix s{queries.ids(), targets.ids(), {}};
  s.scores.assign(s.rows() * s.cols(), 0.0);
  const std::size_t d = queries.dim();
  const auto q = NormalizedRows(queries);
  const auto t = NormalizedRows(targets);
  for (std::size_t i = 0; i < s.rows(); ++i) {
    for (std::size_t j = 0; j < s.cols(); ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < d; ++k) dot += q[i * d + k] * t[j * d + k];
      s.at(i, j) = dot;
    }
  }
  return s;
}

SimilarityMatrix DualSoftmax(const SimilarityMatrix& s, double lambda) {
  if (!(lambda > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "lambda must be positive");
  }
  const std::size_t rows = s.rows();
  const std::size_t cols = s.cols();
  std::vector<double> row_max(rows, -INFINITY), row_sum(rows, 0.0);
  std::vector<double> col_max(cols, -INFINITY), col_sum(cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double v = lambda * s.at(i, j);
      row_max[i] = std::max(row_max[i], v);
      col_max[j] = std::max(col_max[j], v);
    }
  }
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double v = lambda * s.at(i, j);
      row_sum[i] += std::exp(v - row_max[i]);
      col_sum[j] += std::exp(v - col_max[j]);
    }
  }
  SimilarityMatrix out = s;
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const double v = lambda * s.at(i, j);
      out.at(i, j) = std::exp(v - row_max[i]) / row_sum[i] *
                     (std::exp(v - col_max[j]) / col_sum[j]);
    }
  }
  return out;
}

std::vector<std::size_t> TruthRanks(
    const SimilarityMatrix& s,
    const std::map<std::string, std::string>& truth) {
  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t j = 0; j < s.cols(); ++j) column.emplace(s.target_ids[j], j);
  std::vector<std::size_t> ranks(s.rows());
  for (std::size_t i = 0; i < s.rows(); ++i) {
    const std::string& qid = s.query_ids[i];
    auto t = truth.find(qid);
    if (t == truth.end()) {
      throw Error(ErrorCode::kMissingTruth, qid, "no truth for query " + qid);
    }
    auto c = column.find(t->second);
    if (c == column.end()) {
      throw Error(ErrorCode::kMissingTruth, qid,
                  "truth target '" + t->second + "' of query " + qid +
                      " is not a target");
    }
    const std::size_t truth_col = c->second;
    const double score = s.at(i, truth_col);
    std::size_t rank = 1;
    for (std::size_t j = 0; j < s.cols(); ++j) {
      const double v = s.at(i, j);
      if (v > score || (v == score && j < truth_col)) ++rank;
    }
    ranks[i] = rank;
  }
  return ranks;
}

RecallResult RecallAtK(const SimilarityMatrix& s,
                       const std::map<std::string, std::string>& truth,
                       const std::vector<int>& ks) {
  RecallResult result;
  result.ranks = TruthRanks(s, truth);
  const double q = static_cast<double>(s.rows());
  auto recall = [&](int k) {
    if (q == 0) return 0.0;
    std::size_t hits = 0;
    for (std::size_t r : result.ranks) hits += r <= static_cast<std::size_t>(k);
    return 100.0 * static_cast<double>(hits) / q;
  };
  for (int k : ks) result.at_k[k] = recall(k);
  result.avg_r = (recall(1) + recall(5) + recall(10)) / 3.0;
  return result;
}

Metrics ToMetrics(const RecallResult& result) {
  auto get = [&](int k) {
    auto it = result.at_k.find(k);
    if (it == result.at_k.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "recall at " + std::to_string(k) + " was not computed");
    }
    return it->second;
  };
  return {get(1), get(5), get(10), result.avg_r};
}

const char* GroupName(Group group) {
  switch (group) {
    case Group::kFull:
      return "FULL";
    case Group::kShort:
      return "SHORT";
    case Group::kLong:
      return "LONG";
    case Group::kPartial:
      return "PARTIAL";
    case Group::kAll:
      return "ALL";
  }
  return "?";
}

const std::vector<CaptionKind>& GroupKinds(Group group) {
  using K = CaptionKind;
  static const std::vector<K> kFull = {K::kF};
  static const std::vector<K> kShort = {K::kS, K::kSE, K::kSI, K::kSU};
  static const std::vector<K> kLong = {K::kL, K::kE, K::kI, K::kU};
  static const std::vector<K> kPartial = {K::kP};
  static const std::vector<K> kAll = {K::kS, K::kSE, K::kSI, K::kSU, K::kL,
                                      K::kE, K::kI,  K::kU,  K::kP};
  switch (group) {
    case Group::kFull:
      return kFull;
    case Group::kShort:
      return kShort;
    case Group::kLong:
      return kLong;
    case Group::kPartial:
      return kPartial;
    case Group::kAll:
      return kAll;
  }
  return kAll;
}

Metrics CombineAll(const Metrics& s, const Metrics& l, const Metrics& p) {
  auto mix = [](double a, double b, double c) {
    return (4.0 * a + 4.0 * b + c) / 9.0;
  };
  return {mix(s.r1, l.r1, p.r1), mix(s.r5, l.r5, p.r5),
          mix(s.r10, l.r10, p.r10), mix(s.avg_r, l.avg_r, p.avg_r)};
}

GroupReport MakeGroupReport(const std::map<CaptionKind, Metrics>& per_kind) {
  for (CaptionKind kind : kAllKinds) {
    if (!per_kind.count(kind)) {
      throw Error(ErrorCode::kMissingKind, std::string(KindName(kind)),
                  "no metrics for kind " + std::string(KindName(kind)));
    }
  }
  GroupReport report;
  report.per_kind = per_kind;
  for (Group g : {Group::kFull, Group::kShort, Group::kLong, Group::kPartial}) {
    std::vector<Metrics> members;
    for (CaptionKind k : GroupKinds(g)) members.push_back(per_kind.at(k));
    report.groups[g] = MeanOf(members);
  }
  report.groups[Group::kAll] =
      CombineAll(report.groups[Group::kShort], report.groups[Group::kLong],
                 report.groups[Group::kPartial]);
  return report;
}

std::vector<DeltaSeries> DeltaChart(const std::vector<DatasetRecall>& reports) {
  std::map<CaptionKind, DeltaSeries> by_kind;
  for (const auto& report : reports) {
    auto full = report.r1.find(CaptionKind::kF);
    if (full == report.r1.end()) {
      throw Error(ErrorCode::kMissingKind, report.dataset,
                  "dataset " + report.dataset + " has no f recall");
    }
    if (full->second == 0.0) {
      throw Error(ErrorCode::kZeroFullRecall, report.dataset,
                  "dataset " + report.dataset + " has zero f recall");
    }
    for (const auto& [kind, r1] : report.r1) {
      if (kind == CaptionKind::kF) continue;
      auto& series = by_kind.try_emplace(kind, DeltaSeries{kind, 0.0, {}})
                         .first->second;
      series.per_dataset[report.dataset] =
          100.0 * (r1 - full->second) / full->second;
    }
  }
  std::vector<DeltaSeries> out;
  for (CaptionKind kind : kAllKinds) {
    auto it = by_kind.find(kind);
    if (it == by_kind.end()) continue;
    double sum = 0.0;
    for (const auto& [name, v] : it->second.per_dataset) sum += v;
    it->second.mean_delta_pct =
        sum / static_cast<double>(it->second.per_dataset.size());
    out.push_back(it->second);
  }
  return out;
}

std::vector<std::size_t> OverlapHistogram(
    const std::vector<std::set<std::string>>& rank1_sets,
    const std::vector<std::string>& universe) {
  std::unordered_map<std::string, std::size_t> hits;
  for (const auto& id : universe) hits.emplace(id, 0);
  for (const auto& set : rank1_sets) {
    for (const auto& id : set) {
      auto it = hits.find(id);
      if (it == hits.end()) {
        throw Error(ErrorCode::kUnknownVideo, id,
                    "video " + id + " is not in the universe");
      }
      ++it->second;
    }
  }
  std::vector<std::size_t> counts(rank1_sets.size() + 1, 0);
  for (const auto& [id, n] : hits) ++counts[n];
  return counts;
}

EvalReport Evaluate(const EmbeddingTable& text, const EmbeddingTable& video,
                    const std::vector<std::string>& video_ids,
                    const EvalOptions& options) {
  EvalReport report;
  report.options = options;
  report.videos = video_ids;
  std::sort(report.videos.begin(), report.videos.end());
  report.videos.erase(std::unique(report.videos.begin(), report.videos.end()),
                      report.videos.end());

  EmbeddingTable targets(video.dim());
  for (const auto& id : report.videos) {
    auto row = video.Find(id);
    if (!row) {
      throw Error(ErrorCode::kMissingTruth, id,
                  "no video embedding for " + id);
    }
    targets.Add(id, video.row(*row));
  }

  for (CaptionKind kind : kAllKinds) {
    const std::string suffix = "#" + std::string(KindName(kind));
    EmbeddingTable queries(text.dim());
    std::map<std::string, std::string> truth;
    std::string missing;
    for (const auto& id : report.videos) {
      auto row = text.Find(id + suffix);
      if (!row) {
        if (missing.empty()) missing = id + suffix;
        continue;
      }
      queries.Add(id + suffix, text.row(*row));
      truth[id + suffix] = id;
    }
    if (queries.size() == 0) continue;
    if (!missing.empty()) {
      throw Error(ErrorCode::kMissingKind, missing,
                  "no text embedding for " + missing);
    }
    SimilarityMatrix s = Similarity(queries, targets);
    if (options.dual_softmax) s = DualSoftmax(s, options.lambda);
    RecallResult recall = RecallAtK(s, truth);
    KindEval eval;
    eval.metrics = ToMetrics(recall);
    eval.queries = queries.size();
    for (std::size_t i = 0; i < recall.ranks.size(); ++i) {
      if (recall.ranks[i] == 1) eval.rank1.insert(truth[s.query_ids[i]]);
    }
    report.per_kind[kind] = std::move(eval);
  }

  if (report.per_kind.size() == kAllKinds.size()) {
    std::map<CaptionKind, Metrics> metrics;
    for (const auto& [kind, eval] : report.per_kind) metrics[kind] = eval.metrics;
    report.groups = MakeGroupReport(metrics);
    report.has_groups = true;
  }
  return report;
}

nlohmann::json EvalReportToJson(const EvalReport& report) {
  nlohmann::json j;
  j["dataset"] = report.options.dataset;
  j["model"] = report.options.model;
  j["scoring"] = report.options.dual_softmax
                     ? nlohmann::json{{"method", "dual_softmax"},
                                      {"lambda", report.options.lambda}}
                     : nlohmann::json{{"method", "cosine"}};
  j["tie_break"] = "ascending target index";
  j["videos"] = report.videos;
  nlohmann::json per_kind = nlohmann::json::object();
  nlohmann::json rank1 = nlohmann::json::object();
  for (const auto& [kind, eval] : report.per_kind) {
    const std::string name(KindName(kind));
    per_kind[name] = MetricsToJson(eval.metrics);
    per_kind[name]["queries"] = eval.queries;
    rank1[name] = eval.rank1;
  }
  j["per_kind"] = per_kind;
  j["rank1"] = rank1;
  if (report.has_groups) {
    nlohmann::json groups = nlohmann::json::object();
    for (Group g : kAllGroups) {
      groups[GroupName(g)] = MetricsToJson(report.groups.groups.at(g));
    }
    j["groups"] = groups;
    j["aggregation"] =
        "SHORT and LONG are unweighted means over their four kinds; "
        "ALL = (4*SHORT + 4*LONG + PARTIAL) / 9; m is reported but not grouped";
  } else {
    j["groups"] = nullptr;
  }
  return j;
}

DatasetRecall DatasetRecallFromJson(const nlohmann::json& report) {
  DatasetRecall out;
  out.dataset = report.value("dataset", std::string());
  for (const auto& [name, metrics] : report.at("per_kind").items()) {
    auto kind = ParseKind(name);
    if (!kind) {
      throw Error(ErrorCode::kInvalidArgument, name, "unknown kind " + name);
    }
    out.r1[*kind] = metrics.at("R@1").get<double>();
  }
  return out;
}

void Rank1SetsFromJson(const nlohmann::json& report,
                       std::vector<std::set<std::string>>* sets,
                       std::set<std::string>* universe) {
  for (const auto& id : report.at("videos")) universe->insert(id.get<std::string>());
  for (CaptionKind kind : kAllKinds) {
    if (kind == CaptionKind::kP) continue;
    const std::string name(KindName(kind));
    if (!report.at("rank1").contains(name)) continue;
    sets->push_back(report.at("rank1").at(name).get<std::set<std::string>>());
  }
}

nlohmann::json DeltaChartToJson(const std::vector<DeltaSeries>& series) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& s : series) {
    out.push_back({{"kind", std::string(KindName(s.kind))},
                   {"delta_pct", s.mean_delta_pct},
                   {"per_dataset", s.per_dataset}});
  }
  return out;
}

nlohmann::json OverlapToJson(const std::vector<std::size_t>& counts) {
  std::size_t total = 0;
  for (auto c : counts) total += c;
  return {{"pairs", counts.empty() ? 0 : counts.size() - 1},
          {"videos", total},
          {"counts", counts}};
}

}  // namespace divcap::retrieval
