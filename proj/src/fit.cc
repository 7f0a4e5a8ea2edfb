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
#include <thread>

#include "divcap/error.h"
#include "divcap/train.h"

namespace divcap::train {
namespace {

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-8;

class Adam {
 public:
  Adam(const Dims& dims, double lr, std::size_t workers)
      : m_(ModelParams::Zeros(dims)),
        v_(ModelParams::Zeros(dims)),
        lr_(lr),
        workers_(workers) {}

  void Step(ModelParams& p, const ModelParams& g) {
    ++t_;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    Update(p.w_t.data(), m_.w_t.data(), v_.w_t.data(), g.w_t.data(),
           p.w_t.size(), c1, c2);
    Update(p.b_t.data(), m_.b_t.data(), v_.b_t.data(), g.b_t.data(),
           p.b_t.size(), c1, c2);
    Update(p.w_v.data(), m_.w_v.data(), v_.w_v.data(), g.w_v.data(),
           p.w_v.size(), c1, c2);
    Update(p.b_v.data(), m_.b_v.data(), v_.b_v.data(), g.b_v.data(),
           p.b_v.size(), c1, c2);
    Update(p.w_p.data(), m_.w_p.data(), v_.w_p.data(), g.w_p.data(),
           p.w_p.size(), c1, c2);
    Update(p.b_p.data(), m_.b_p.data(), v_.b_p.data(), g.b_p.data(),
           p.b_p.size(), c1, c2);
  }

 private:
  void Update(double* p, double* m, double* v, const double* g,
              Eigen::Index size, double c1, double c2) const {
    auto range = [&](Eigen::Index lo, Eigen::Index hi) {
      for (Eigen::Index k = lo; k < hi; ++k) {
        m[k] = kBeta1 * m[k] + (1.0 - kBeta1) * g[k];
        v[k] = kBeta2 * v[k] + (1.0 - kBeta2) * g[k] * g[k];
        p[k] -= lr_ * (m[k] / c1) / (std::sqrt(v[k] / c2) + kEps);
      }
    };
    // Elementwise, so splitting the range cannot change the result.
    const auto workers = static_cast<Eigen::Index>(workers_);
    if (workers <= 1 || size < 4096) {
      range(0, size);
      return;
    }
    std::vector<std::thread> threads;
    const Eigen::Index chunk = (size + workers - 1) / workers;
    for (Eigen::Index lo = 0; lo < size; lo += chunk) {
      threads.emplace_back(range, lo, std::min(size, lo + chunk));
    }
    for (auto& t : threads) t.join();
  }

  ModelParams m_;
  ModelParams v_;
  double lr_;
  std::size_t workers_;
  std::uint64_t t_ = 0;
};

}  // namespace

FitResult Fit(const std::vector<TrainingExample>& examples,
              const TrainConfig& config) {
  ValidateConfig(config);
  if (examples.size() < 2) {
    throw Error(ErrorCode::kTooFewRows,
                "training needs at least 2 videos, got " +
                    std::to_string(examples.size()));
  }
  for (const TrainingExample& ex : examples) {
    if (static_cast<std::size_t>(ex.features.size()) != config.dims.video_feat) {
      throw Error(ErrorCode::kDimMismatch, ex.video_id,
                  "video features of '" + ex.video_id + "' do not match dims");
    }
  }

  FitResult result;
  result.params = InitParams(config.dims, config.seed);
  Adam adam(config.dims, config.lr, config.workers);
  Rng rng(DeriveSeed(config.seed, "batches"));
  std::vector<std::size_t> order(examples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.Shuffle(order);
    EpochStats stats{epoch, 0.0, 0.0, 0.0, 0.0};
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_n) {
      const std::size_t end = std::min(order.size(), start + config.batch_n);
      if (end - start < 2) break;
      const std::vector<std::size_t> indices(order.begin() + start,
                                             order.begin() + end);
      const Batch batch = MixBatch(examples, indices, config, rng);
      const LossResult loss = CombinedLoss(batch, result.params, config);
      if (!std::isfinite(loss.total) || !loss.grads.AllFinite()) {
        throw Error(ErrorCode::kNonFiniteLoss, "epoch " + std::to_string(epoch),
                    "loss became non-finite in epoch " + std::to_string(epoch));
      }
      adam.Step(result.params, loss.grads);
      stats.loss += loss.total;
      stats.itc += loss.itc;
      stats.t2t += loss.t2t;
      stats.proj += loss.proj;
      ++batches;
    }
    if (!result.params.AllFinite()) {
      throw Error(ErrorCode::kNonFiniteLoss, "epoch " + std::to_string(epoch),
                  "parameters became non-finite in epoch " +
                      std::to_string(epoch));
    }
    const double nb = static_cast<double>(std::max<std::size_t>(batches, 1));
    stats.loss /= nb;
    stats.itc /= nb;
    stats.t2t /= nb;
    stats.proj /= nb;
    result.history.push_back(stats);
  }
  return result;
}

nlohmann::json HistoryToJson(const std::vector<EpochStats>& history,
                             const TrainConfig& config) {
  nlohmann::json epochs = nlohmann::json::array();
  for (const EpochStats& s : history) {
    epochs.push_back({{"epoch", s.epoch},
                      {"L", s.loss},
                      {"l_itc", s.itc},
                      {"l_t2t", s.t2t},
                      {"l_proj", s.proj}});
  }
  return {{"config", ConfigToJson(config)},
          {"metadata",
           {{"optimizer", "adam(beta1=0.9, beta2=0.999, eps=1e-8), constant lr"},
            {"t2t_gradient", "propagated to both the projected text and the "
                             "paragraph features"},
            {"temperature", "fixed"},
            {"epoch_values", "means over the epoch's batches"}}},
          {"epochs", epochs}};
}

}  // namespace divcap::train
