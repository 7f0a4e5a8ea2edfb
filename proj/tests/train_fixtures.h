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

#ifndef DIVCAP_TESTS_TRAIN_FIXTURES_H_
#define DIVCAP_TESTS_TRAIN_FIXTURES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "divcap/rng.h"
#include "divcap/train.h"

namespace divcap::testing {

inline train::SparseVec RandomSparse(std::size_t buckets, std::size_t nnz,
                                     Rng& rng) {
  std::vector<std::uint32_t> keys;
  while (keys.size() < nnz) {
    const auto k = static_cast<std::uint32_t>(rng.UniformIndex(buckets));
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
  }
  std::sort(keys.begin(), keys.end());
  train::SparseVec x;
  double norm = 0.0;
  for (std::uint32_t k : keys) {
    const double v = rng.UniformDouble() + 0.1;
    x.emplace_back(k, v);
    norm += v * v;
  }
  for (auto& [k, v] : x) v /= std::sqrt(norm);
  return x;
}

inline std::vector<train::TrainingExample> RandomExamples(
    std::size_t n, const train::Dims& dims, Rng& rng) {
  std::vector<train::TrainingExample> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].video_id = "v" + std::to_string(i);
    out[i].gt = RandomSparse(dims.hash_buckets, 6, rng);
    for (CaptionKind k : train::kTrainableKinds) {
      out[i].captions[k] = RandomSparse(dims.hash_buckets, 1 + rng.UniformIndex(5), rng);
    }
    out[i].features = train::VectorXd(dims.video_feat);
    for (auto& x : out[i].features) x = rng.Normal();
  }
  return out;
}

// A random batch with its own storage; the batch points into `examples`.
struct LossProblem {
  train::TrainConfig config;
  std::vector<train::TrainingExample> examples;
  train::Batch batch;
  train::ModelParams params;
};

// N=8 items, d=16, eta 0.75 and both projection weights 0.1 unless changed
// after the call and before MixBatch is rerun.
inline void MakeLossProblem(std::uint64_t seed, LossProblem* p,
                            double alpha = 0.1) {
  p->config = train::TrainConfig{};
  p->config.dims = {64, 16, 16};
  p->config.batch_n = 8;
  p->config.eta = 0.75;
  p->config.alpha_t2t = alpha;
  p->config.alpha_proj = alpha;
  p->config.seed = seed;
  Rng rng(DeriveSeed(seed, "loss-problem"));
  p->examples = RandomExamples(8, p->config.dims, rng);
  std::vector<std::size_t> idx(8);
  std::iota(idx.begin(), idx.end(), 0);
  p->batch = train::MixBatch(p->examples, idx, p->config, rng);
  p->params = train::InitParams(p->config.dims, seed);
}

// Largest |analytic - numeric| / max(|analytic|, |numeric|, floor) over every
// parameter, with central differences of step h.
inline double MaxGradRelError(const LossProblem& p, double h, double floor) {
  const train::LossResult base =
      train::CombinedLoss(p.batch, p.params, p.config, true);
  train::ModelParams params = p.params;
  double worst = 0.0;
  auto check = [&](auto& value, double analytic) {
    const double saved = value;
    value = saved + h;
    const double up = train::CombinedLoss(p.batch, params, p.config, false).total;
    value = saved - h;
    const double down =
        train::CombinedLoss(p.batch, params, p.config, false).total;
    value = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double denom =
        std::max({std::abs(analytic), std::abs(numeric), floor});
    worst = std::max(worst, std::abs(analytic - numeric) / denom);
  };
  auto walk = [&](auto& m, const auto& g) {
    for (Eigen::Index i = 0; i < m.size(); ++i) check(m.data()[i], g.data()[i]);
  };
  walk(params.w_t, base.grads.w_t);
  walk(params.b_t, base.grads.b_t);
  walk(params.w_v, base.grads.w_v);
  walk(params.b_v, base.grads.b_v);
  walk(params.w_p, base.grads.w_p);
  walk(params.b_p, base.grads.b_p);
  return worst;
}

}  // namespace divcap::testing

#endif  // DIVCAP_TESTS_TRAIN_FIXTURES_H_
