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

#ifndef DIVCAP_TRAIN_H_
#define DIVCAP_TRAIN_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "divcap/caption.h"
#include "divcap/corpus.h"
#include "divcap/embeddings.h"
#include "divcap/pool.h"
#include "divcap/rng.h"
#include "json.hpp"

namespace divcap::train {

using Eigen::MatrixXd;
using Eigen::VectorXd;

struct Dims {
  std::size_t hash_buckets = std::size_t{1} << 15;
  std::size_t embed = 32;
  std::size_t video_feat = 32;

  bool operator==(const Dims&) const = default;
};

// Kinds that may be drawn as a video's generated caption during training.
inline constexpr CaptionKind kTrainableKinds[] = {
    CaptionKind::kE,  CaptionKind::kI,  CaptionKind::kU, CaptionKind::kSE,
    CaptionKind::kSI, CaptionKind::kSU, CaptionKind::kP, CaptionKind::kS,
    CaptionKind::kM,  CaptionKind::kL};

struct TrainConfig {
  double eta = 0.75;        // share of a batch whose primary text is generated
  double alpha_t2t = 0.1;   // weight of the projected-text vs paragraph loss
  double alpha_proj = 0.1;  // weight of the projected-text vs video loss
  double tau = 0.07;
  double lr = 1e-3;
  std::size_t batch_n = 32;
  std::size_t epochs = 30;
  std::uint64_t seed = 0;
  std::vector<CaptionKind> allowed_kinds{std::begin(kTrainableKinds),
                                         std::end(kTrainableKinds)};
  Dims dims;
  // Hash only unigrams; makes the text encoder order-invariant.
  bool unigram_only = false;
  // Threads for per-item encoding and the optimizer update. Results do not
  // depend on this value.
  std::size_t workers = 1;

  bool operator==(const TrainConfig&) const = default;
};

// Throws Error(kInvalidArgument).
void ValidateConfig(const TrainConfig& config);

// TOML keys mirror the field names; dims live in a [dims] table with keys
// hash_buckets, embed and video_feat. Missing keys keep their defaults.
TrainConfig ParseTrainConfig(std::string_view toml_text);
TrainConfig LoadTrainConfig(const std::string& path);
nlohmann::json ConfigToJson(const TrainConfig& config);

// L2-normalized sparse input vector: (bucket, value) sorted by bucket.
using SparseVec = std::vector<std::pair<std::uint32_t, double>>;

// Hashed bag of unigrams and adjacent-token bigrams (64-bit FNV-1a, modulo the
// bucket count), L2-normalized.
class TextFeaturizer {
 public:
  TextFeaturizer(std::size_t buckets, bool unigram_only)
      : buckets_(buckets), unigram_only_(unigram_only) {}
  SparseVec Featurize(std::string_view text) const;
  std::size_t buckets() const { return buckets_; }

 private:
  std::size_t buckets_;
  bool unigram_only_;
};

struct ModelParams {
  MatrixXd w_t;  // embed x hash_buckets
  VectorXd b_t;
  MatrixXd w_v;  // embed x video_feat
  VectorXd b_v;
  MatrixXd w_p;  // embed x embed
  VectorXd b_p;

  static ModelParams Zeros(const Dims& dims);
  Dims dims() const;
  bool AllFinite() const;
  bool operator==(const ModelParams& other) const;
};

ModelParams InitParams(const Dims& dims, std::uint64_t seed);

// Affine map of the input followed by L2 normalization. Empty text maps to
// the normalized bias.
VectorXd EncodeText(const SparseVec& x, const ModelParams& params);
VectorXd EncodeVideo(const VectorXd& features, const ModelParams& params);
// Projection head applied to an encoded text vector.
VectorXd Project(const VectorXd& text, const ModelParams& params);

struct InfoNceResult {
  double loss = 0.0;
  MatrixXd d_a;
  MatrixXd d_b;
};

// Symmetric cross-entropy over S = A B^T / tau with matched rows as
// positives, and its gradients with respect to A and B.
InfoNceResult InfoNce(const MatrixXd& a, const MatrixXd& b, double tau);

struct BatchItem {
  std::size_t example = 0;
  const SparseVec* gt = nullptr;
  const SparseVec* tenk = nullptr;
  CaptionKind tenk_kind = CaptionKind::kS;
  const VectorXd* video = nullptr;
  bool mixed = false;  // the generated caption is this item's primary text
};

using Batch = std::vector<BatchItem>;

// Featurized training data for one video.
struct TrainingExample {
  std::string video_id;
  SparseVec gt;
  std::map<CaptionKind, SparseVec> captions;  // empty when the pool is missing
  VectorXd features;
};

// Video features are looked up by feature_ref, falling back to video_id.
// Throws Error(kUnknownVideo) for a video without features and
// Error(kDimMismatch) when the feature size differs from dims.video_feat.
std::vector<TrainingExample> PrepareExamples(
    const corpus::Dataset& dataset,
    const std::vector<augment::CaptionPool>& pools,
    const EmbeddingTable& video_features, const TrainConfig& config);

// Number of mixed items in a batch of n: eta * n rounded half up.
std::size_t MixedCount(double eta, std::size_t n);

// Samples one generated caption per item uniformly from allowed_kinds and
// marks exactly MixedCount(eta, n) items, chosen uniformly, as mixed. Throws
// Error(kMissingPool, video_id).
Batch MixBatch(const std::vector<TrainingExample>& examples,
               const std::vector<std::size_t>& indices,
               const TrainConfig& config, Rng& rng);

struct LossResult {
  double total = 0.0;
  double itc = 0.0;
  double t2t = 0.0;
  double proj = 0.0;
  ModelParams grads;
};

// total = itc + alpha_t2t * t2t + alpha_proj * proj, where itc pairs primary
// texts with videos, t2t pairs projected generated texts with paragraphs and
// proj pairs projected generated texts with videos. Gradients reach both
// sides of every term. A zero weight drops its term from the sum entirely.
LossResult CombinedLoss(const Batch& batch, const ModelParams& params,
                        const TrainConfig& config, bool with_grads = true);

struct EpochStats {
  std::size_t epoch = 0;
  double loss = 0.0;
  double itc = 0.0;
  double t2t = 0.0;
  double proj = 0.0;

  bool operator==(const EpochStats&) const = default;
};

struct FitResult {
  ModelParams params;
  std::vector<EpochStats> history;
};

// Adam (beta1 0.9, beta2 0.999, eps 1e-8) at a constant learning rate.
// Each epoch shuffles the examples and walks them in batches of batch_n; a
// trailing batch of one item is dropped. Throws Error(kNonFiniteLoss) naming
// the epoch.
FitResult Fit(const std::vector<TrainingExample>& examples,
              const TrainConfig& config);

nlohmann::json HistoryToJson(const std::vector<EpochStats>& history,
                             const TrainConfig& config);

// Text rows "<video_id>#<kind>" for every pool caption (f taken from the
// dataset) and video rows keyed by video_id, all unit norm.
struct EncodedCorpus {
  EmbeddingTable text;
  EmbeddingTable video;
};

EncodedCorpus EncodeCorpus(const ModelParams& params,
                           const TrainConfig& config,
                           const corpus::Dataset& dataset,
                           const std::vector<augment::CaptionPool>& pools,
                           const EmbeddingTable& video_features);

// Three DVEC sections back to back: "text", "video", "proj". Row r of a
// section is row r of its weight matrix with the bias entry appended, under
// the id "<section>:<r>".
void SaveParams(const ModelParams& params, const std::string& path);
ModelParams LoadParams(const std::string& path);

}  // namespace divcap::train

#endif  // DIVCAP_TRAIN_H_
