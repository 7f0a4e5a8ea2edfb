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

#ifndef DIVCAP_RETRIEVAL_H_
#define DIVCAP_RETRIEVAL_H_

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "divcap/caption.h"
#include "divcap/embeddings.h"
#include "json.hpp"

namespace divcap::retrieval {

// Dense Q x T score matrix, row-major.
struct SimilarityMatrix {
  std::vector<std::string> query_ids;
  std::vector<std::string> target_ids;
  std::vector<double> scores;

  std::size_t rows() const { return query_ids.size(); }
  std::size_t cols() const { return target_ids.size(); }
  double at(std::size_t q, std::size_t t) const { return scores[q * cols() + t]; }
  double& at(std::size_t q, std::size_t t) { return scores[q * cols() + t]; }
};

// Cosine scores between every query row and every target row, computed in
// double. Throws Error(kDimMismatch).
SimilarityMatrix Similarity(const EmbeddingTable& queries,
                            const EmbeddingTable& targets);

inline constexpr double kDefaultDualSoftmaxLambda = 100.0;

// rowsoftmax(lambda * S) * colsoftmax(lambda * S), elementwise.
SimilarityMatrix DualSoftmax(const SimilarityMatrix& s, double lambda);

struct Metrics {
  double r1 = 0.0;
  double r5 = 0.0;
  double r10 = 0.0;
  double avg_r = 0.0;  // mean of r1, r5, r10

  bool operator==(const Metrics&) const = default;
};

// 1-based rank of each query's truth target: one plus the number of targets
// scoring strictly higher, plus tied targets at a lower column index.
// Throws Error(kMissingTruth, query_id).
std::vector<std::size_t> TruthRanks(
    const SimilarityMatrix& s,
    const std::map<std::string, std::string>& truth);

struct RecallResult {
  std::map<int, double> at_k;  // k -> percentage of queries with rank <= k
  double avg_r = 0.0;          // mean of R@1, R@5, R@10
  std::vector<std::size_t> ranks;
};

RecallResult RecallAtK(const SimilarityMatrix& s,
                       const std::map<std::string, std::string>& truth,
                       const std::vector<int>& ks = {1, 5, 10});

Metrics ToMetrics(const RecallResult& result);

enum class Group { kFull, kShort, kLong, kPartial, kAll };

inline constexpr Group kAllGroups[] = {Group::kFull, Group::kShort,
                                       Group::kLong, Group::kPartial,
                                       Group::kAll};

const char* GroupName(Group group);

// Membership of the caption-kind groups; m belongs to none.
const std::vector<CaptionKind>& GroupKinds(Group group);

// ALL = (4 * SHORT + 4 * LONG + PARTIAL) / 9, per metric.
Metrics CombineAll(const Metrics& short_group, const Metrics& long_group,
                   const Metrics& partial);

struct GroupReport {
  std::map<CaptionKind, Metrics> per_kind;
  std::map<Group, Metrics> groups;
};

// Requires all eleven kinds; throws Error(kMissingKind, kind).
GroupReport MakeGroupReport(const std::map<CaptionKind, Metrics>& per_kind);

struct DatasetRecall {
  std::string dataset;
  std::map<CaptionKind, double> r1;
};

struct DeltaSeries {
  CaptionKind kind;
  double mean_delta_pct = 0.0;
  std::map<std::string, double> per_dataset;
};

// Per kind (other than f) and dataset: 100 * (R@1_k - R@1_f) / R@1_f,
// averaged over the datasets carrying that kind. Throws
// Error(kZeroFullRecall, dataset) or Error(kMissingKind, dataset).
std::vector<DeltaSeries> DeltaChart(const std::vector<DatasetRecall>& reports);

// counts[x] = number of universe videos found in exactly x of the sets.
// Throws Error(kUnknownVideo, id) for a set member outside the universe.
std::vector<std::size_t> OverlapHistogram(
    const std::vector<std::set<std::string>>& rank1_sets,
    const std::vector<std::string>& universe);

struct EvalOptions {
  bool dual_softmax = false;
  double lambda = kDefaultDualSoftmaxLambda;
  std::string dataset;
  std::string model;
};

struct KindEval {
  Metrics metrics;
  std::size_t queries = 0;
  std::set<std::string> rank1;  // videos whose query ranked them first
};

struct EvalReport {
  EvalOptions options;
  std::vector<std::string> videos;
  std::map<CaptionKind, KindEval> per_kind;
  bool has_groups = false;
  GroupReport groups;
};

// Text rows are named "<video_id>#<kind>"; video rows by video id. Every kind
// that appears for any of `video_ids` must appear for all of them.
EvalReport Evaluate(const EmbeddingTable& text, const EmbeddingTable& video,
                    const std::vector<std::string>& video_ids,
                    const EvalOptions& options);

nlohmann::json EvalReportToJson(const EvalReport& report);

// Reads back the per-kind R@1 and the dataset label of a report.
DatasetRecall DatasetRecallFromJson(const nlohmann::json& report);

// Rank-1 sets of every kind except p, plus the evaluated videos.
void Rank1SetsFromJson(const nlohmann::json& report,
                       std::vector<std::set<std::string>>* sets,
                       std::set<std::string>* universe);

nlohmann::json DeltaChartToJson(const std::vector<DeltaSeries>& series);
nlohmann::json OverlapToJson(const std::vector<std::size_t>& counts);

}  // namespace divcap::retrieval

#endif  // DIVCAP_RETRIEVAL_H_
