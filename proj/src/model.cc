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

#include <cmath>
#include <fstream>
#include <map>

#include "divcap/error.h"
#include "divcap/text.h"
#include "divcap/train.h"

namespace divcap::train {
namespace {

VectorXd Normalized(const VectorXd& z) { return z / z.norm(); }

void FillNormal(MatrixXd& m, double stddev, Rng& rng) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = stddev * rng.Normal();
  }
}

void FillNormal(VectorXd& v, double stddev, Rng& rng) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = stddev * rng.Normal();
}

EmbeddingTable SectionTable(const std::string& name, const MatrixXd& w,
                            const VectorXd& b) {
  EmbeddingTable table(static_cast<std::size_t>(w.cols()) + 1);
  std::vector<float> row(table.dim());
  for (Eigen::Index r = 0; r < w.rows(); ++r) {
    for (Eigen::Index c = 0; c < w.cols(); ++c) {
      row[c] = static_cast<float>(w(r, c));
    }
    row.back() = static_cast<float>(b(r));
    table.Add(name + ":" + std::to_string(r), std::span<const float>(row));
  }
  return table;
}

void ReadSection(std::istream& in, const std::string& name, MatrixXd* w,
                 VectorXd* b) {
  const EmbeddingTable table = ReadDvec(in);
  if (table.dim() < 1) {
    throw Error(ErrorCode::kDimMismatch, name, "params section '" + name +
                                                   "' has no columns");
  }
  w->resize(static_cast<Eigen::Index>(table.size()),
            static_cast<Eigen::Index>(table.dim() - 1));
  b->resize(static_cast<Eigen::Index>(table.size()));
  for (std::size_t r = 0; r < table.size(); ++r) {
    if (table.id(r) != name + ":" + std::to_string(r)) {
      throw Error(ErrorCode::kBadMagic, name,
                  "expected params row '" + name + ":" + std::to_string(r) +
                      "', found '" + table.id(r) + "'");
    }
    auto row = table.row(r);
    for (std::size_t c = 0; c + 1 < table.dim(); ++c) (*w)(r, c) = row[c];
    (*b)(r) = row[table.dim() - 1];
  }
}

}  // namespace

SparseVec TextFeaturizer::Featurize(std::string_view text) const {
  const std::vector<std::string> tokens = Tokenize(text);
  std::map<std::uint32_t, double> counts;
  auto bucket = [&](const std::string& key) {
    return static_cast<std::uint32_t>(Fnv1a64(key) % buckets_);
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    counts[bucket("u:" + tokens[i])] += 1.0;
    if (!unigram_only_ && i + 1 < tokens.size()) {
      counts[bucket("b:" + tokens[i] + " " + tokens[i + 1])] += 1.0;
    }
  }
  double norm = 0.0;
  for (const auto& [k, v] : counts) norm += v * v;
  norm = std::sqrt(norm);
  SparseVec out;
  out.reserve(counts.size());
  for (const auto& [k, v] : counts) out.emplace_back(k, v / norm);
  return out;
}

ModelParams ModelParams::Zeros(const Dims& dims) {
  const auto d = static_cast<Eigen::Index>(dims.embed);
  ModelParams p;
  p.w_t = MatrixXd::Zero(d, static_cast<Eigen::Index>(dims.hash_buckets));
  p.b_t = VectorXd::Zero(d);
  p.w_v = MatrixXd::Zero(d, static_cast<Eigen::Index>(dims.video_feat));
  p.b_v = VectorXd::Zero(d);
  p.w_p = MatrixXd::Zero(d, d);
  p.b_p = VectorXd::Zero(d);
  return p;
}

Dims ModelParams::dims() const {
  return {static_cast<std::size_t>(w_t.cols()),
          static_cast<std::size_t>(w_t.rows()),
          static_cast<std::size_t>(w_v.cols())};
}

bool ModelParams::AllFinite() const {
  return w_t.allFinite() && b_t.allFinite() && w_v.allFinite() &&
         b_v.allFinite() && w_p.allFinite() && b_p.allFinite();
}

bool ModelParams::operator==(const ModelParams& o) const {
  auto same = [](const auto& a, const auto& b) {
    return a.rows() == b.rows() && a.cols() == b.cols() && a == b;
  };
  return same(w_t, o.w_t) && same(b_t, o.b_t) && same(w_v, o.w_v) &&
         same(b_v, o.b_v) && same(w_p, o.w_p) && same(b_p, o.b_p);
}

ModelParams InitParams(const Dims& dims, std::uint64_t seed) {
  Rng rng(DeriveSeed(seed, "init"));
  ModelParams p = ModelParams::Zeros(dims);
  const double scale = 1.0 / std::sqrt(static_cast<double>(dims.embed));
  // Inputs to all three maps are unit vectors, so this keeps outputs near unit
  // norm before normalization.
  FillNormal(p.w_t, scale, rng);
  FillNormal(p.w_v, scale, rng);
  // Nonzero biases keep the empty-text embedding well defined.
  FillNormal(p.b_t, 0.01, rng);
  FillNormal(p.b_v, 0.01, rng);
  FillNormal(p.w_p, scale, rng);
  FillNormal(p.b_p, 0.01, rng);
  return p;
}

VectorXd EncodeText(const SparseVec& x, const ModelParams& params) {
  VectorXd z = params.b_t;
  for (const auto& [k, v] : x) z.noalias() += v * params.w_t.col(k);
  return Normalized(z);
}

VectorXd EncodeVideo(const VectorXd& features, const ModelParams& params) {
  if (features.size() != params.w_v.cols()) {
    throw Error(ErrorCode::kDimMismatch, "video features have " +
                                             std::to_string(features.size()) +
                                             " values, expected " +
                                             std::to_string(params.w_v.cols()));
  }
  return Normalized(params.w_v * features + params.b_v);
}

VectorXd Project(const VectorXd& text, const ModelParams& params) {
  return Normalized(params.w_p * text + params.b_p);
}

std::vector<TrainingExample> PrepareExamples(
    const corpus::Dataset& dataset,
    const std::vector<augment::CaptionPool>& pools,
    const EmbeddingTable& video_features, const TrainConfig& config) {
  const TextFeaturizer featurizer(config.dims.hash_buckets,
                                  config.unigram_only);
  std::map<std::string, const augment::CaptionPool*> by_id;
  for (const auto& pool : pools) by_id[pool.video_id] = &pool;
  std::vector<const corpus::Video*> videos;
  for (const auto& v : dataset.videos) videos.push_back(&v);
  std::sort(videos.begin(), videos.end(),
            [](auto* a, auto* b) { return a->video_id < b->video_id; });

  std::vector<TrainingExample> examples;
  for (const corpus::Video* v : videos) {
    TrainingExample ex;
    ex.video_id = v->video_id;
    ex.gt = featurizer.Featurize(corpus::FullParagraph(*v));
    if (auto it = by_id.find(v->video_id); it != by_id.end()) {
      for (const auto& [kind, text] : it->second->captions) {
        ex.captions[kind] = featurizer.Featurize(text);
      }
    }
    const std::string key = v->feature_ref.value_or(v->video_id);
    auto row = video_features.Find(key);
    if (!row) {
      throw Error(ErrorCode::kUnknownVideo, v->video_id,
                  "no video features for '" + key + "'");
    }
    auto values = video_features.row(*row);
    if (values.size() != config.dims.video_feat) {
      throw Error(ErrorCode::kDimMismatch, v->video_id,
                  "video features for '" + key + "' have " +
                      std::to_string(values.size()) + " values, config says " +
                      std::to_string(config.dims.video_feat));
    }
    ex.features.resize(static_cast<Eigen::Index>(values.size()));
    for (std::size_t k = 0; k < values.size(); ++k) ex.features(k) = values[k];
    examples.push_back(std::move(ex));
  }
  return examples;
}

EncodedCorpus EncodeCorpus(const ModelParams& params,
                           const TrainConfig& config,
                           const corpus::Dataset& dataset,
                           const std::vector<augment::CaptionPool>& pools,
                           const EmbeddingTable& video_features) {
  const std::vector<TrainingExample> examples =
      PrepareExamples(dataset, pools, video_features, config);
  const auto d = static_cast<std::size_t>(params.w_t.rows());
  EncodedCorpus out{EmbeddingTable(d), EmbeddingTable(d)};
  auto add = [](EmbeddingTable& table, const std::string& id,
                const VectorXd& v) {
    table.Add(id, std::span<const double>(v.data(), v.size()));
  };
  for (const TrainingExample& ex : examples) {
    add(out.video, ex.video_id, EncodeVideo(ex.features, params));
    add(out.text, ex.video_id + "#f", EncodeText(ex.gt, params));
    for (const auto& [kind, x] : ex.captions) {
      if (kind == CaptionKind::kF) continue;
      add(out.text, ex.video_id + "#" + std::string(KindName(kind)),
          EncodeText(x, params));
    }
  }
  return out;
}

void SaveParams(const ModelParams& params, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, path, "cannot write " + path);
  WriteDvec(SectionTable("text", params.w_t, params.b_t), out);
  WriteDvec(SectionTable("video", params.w_v, params.b_v), out);
  WriteDvec(SectionTable("proj", params.w_p, params.b_p), out);
  if (!out) throw Error(ErrorCode::kIo, path, "write failed for " + path);
}

ModelParams LoadParams(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, path, "cannot open " + path);
  ModelParams p;
  ReadSection(in, "text", &p.w_t, &p.b_t);
  ReadSection(in, "video", &p.w_v, &p.b_v);
  ReadSection(in, "proj", &p.w_p, &p.b_p);
  if (p.w_v.rows() != p.w_t.rows() || p.w_p.rows() != p.w_t.rows() ||
      p.w_p.cols() != p.w_t.rows()) {
    throw Error(ErrorCode::kDimMismatch, path,
                "params sections disagree on the embedding size");
  }
  return p;
}

}  // namespace divcap::train
