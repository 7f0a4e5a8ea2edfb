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

#include "divcap/error.h"
#include "divcap/train.h"

namespace divcap::train {
namespace {

struct Encoded {
  VectorXd out;   // unit vector
  double norm;    // norm of the pre-normalization vector
};

Encoded Normalize(VectorXd z) {
  const double n = z.norm();
  return {z / n, n};
}

// Gradient with respect to z of a loss whose gradient with respect to
// y = z / |z| is dy.
VectorXd NormalizeBackward(const Encoded& e, const VectorXd& dy) {
  return (dy - e.out * e.out.dot(dy)) / e.norm;
}

Encoded ForwardText(const SparseVec& x, const ModelParams& p) {
  VectorXd z = p.b_t;
  for (const auto& [k, v] : x) z.noalias() += v * p.w_t.col(k);
  return Normalize(std::move(z));
}

void BackwardText(const SparseVec& x, const Encoded& e, const VectorXd& dy,
                  ModelParams& g) {
  const VectorXd dz = NormalizeBackward(e, dy);
  for (const auto& [k, v] : x) g.w_t.col(k).noalias() += v * dz;
  g.b_t += dz;
}

}  // namespace

InfoNceResult InfoNce(const MatrixXd& a, const MatrixXd& b, double tau) {
  const Eigen::Index n = a.rows();
  const MatrixXd s = (a * b.transpose()) / tau;
  VectorXd row_lse(n), col_lse(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double m = s.row(i).maxCoeff();
    row_lse(i) = m + std::log((s.row(i).array() - m).exp().sum());
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const double m = s.col(j).maxCoeff();
    col_lse(j) = m + std::log((s.col(j).array() - m).exp().sum());
  }
  double row_ce = 0.0;
  double col_ce = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    row_ce += row_lse(i) - s(i, i);
    col_ce += col_lse(i) - s(i, i);
  }
  const double nd = static_cast<double>(n);
  InfoNceResult result;
  result.loss = 0.5 * (row_ce / nd + col_ce / nd);

  MatrixXd ds(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double eye = i == j ? 1.0 : 0.0;
      const double p_row = std::exp(s(i, j) - row_lse(i));
      const double p_col = std::exp(s(i, j) - col_lse(j));
      ds(i, j) = 0.5 * ((p_row - eye) / nd + (p_col - eye) / nd);
    }
  }
  result.d_a = ds * b / tau;
  result.d_b = ds.transpose() * a / tau;
  return result;
}

std::size_t MixedCount(double eta, std::size_t n) {
  return static_cast<std::size_t>(std::floor(eta * static_cast<double>(n) + 0.5));
}

Batch MixBatch(const std::vector<TrainingExample>& examples,
               const std::vector<std::size_t>& indices,
               const TrainConfig& config, Rng& rng) {
  if (config.allowed_kinds.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "allowed_kinds is empty");
  }
  Batch batch(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const TrainingExample& ex = examples.at(indices[i]);
    const CaptionKind kind =
        config.allowed_kinds[rng.UniformIndex(config.allowed_kinds.size())];
    auto caption = ex.captions.find(kind);
    if (caption == ex.captions.end()) {
      throw Error(ErrorCode::kMissingPool, ex.video_id,
                  "no " + std::string(KindName(kind)) + " caption for '" +
                      ex.video_id + "'");
    }
    batch[i] = {indices[i], &ex.gt, &caption->second, kind, &ex.features,
                false};
  }
  std::vector<std::size_t> order(batch.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  rng.Shuffle(order);
  const std::size_t mixed = std::min(MixedCount(config.eta, batch.size()),
                                     batch.size());
  for (std::size_t k = 0; k < mixed; ++k) batch[order[k]].mixed = true;
  return batch;
}

LossResult CombinedLoss(const Batch& batch, const ModelParams& params,
                        const TrainConfig& config, bool with_grads) {
  const auto n = static_cast<Eigen::Index>(batch.size());
  const Eigen::Index d = params.w_t.rows();
  std::vector<Encoded> gt(n), tenk(n), video(n), proj(n);
  MatrixXd f_t(n, d), f_gt(n, d), f_v(n, d), f_10k(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const BatchItem& item = batch[i];
    gt[i] = ForwardText(*item.gt, params);
    tenk[i] = ForwardText(*item.tenk, params);
    if (item.video->size() != params.w_v.cols()) {
      throw Error(ErrorCode::kDimMismatch, "video feature size mismatch");
    }
    video[i] = Normalize(params.w_v * *item.video + params.b_v);
    proj[i] = Normalize(params.w_p * tenk[i].out + params.b_p);
    f_gt.row(i) = gt[i].out.transpose();
    f_t.row(i) = (item.mixed ? tenk[i].out : gt[i].out).transpose();
    f_v.row(i) = video[i].out.transpose();
    f_10k.row(i) = proj[i].out.transpose();
  }

  const InfoNceResult itc = InfoNce(f_t, f_v, config.tau);
  const InfoNceResult t2t = InfoNce(f_10k, f_gt, config.tau);
  const InfoNceResult prj = InfoNce(f_10k, f_v, config.tau);

  LossResult result;
  result.itc = itc.loss;
  result.t2t = t2t.loss;
  result.proj = prj.loss;
  result.total = itc.loss;
  if (config.alpha_t2t != 0.0) result.total += config.alpha_t2t * t2t.loss;
  if (config.alpha_proj != 0.0) result.total += config.alpha_proj * prj.loss;
  if (!with_grads) return result;

  // Gradients with respect to the unit-norm features.
  MatrixXd d_v = itc.d_b;
  MatrixXd d_10k = MatrixXd::Zero(n, d);
  MatrixXd d_gt = MatrixXd::Zero(n, d);
  if (config.alpha_t2t != 0.0) {
    d_10k += config.alpha_t2t * t2t.d_a;
    d_gt += config.alpha_t2t * t2t.d_b;
  }
  if (config.alpha_proj != 0.0) {
    d_10k += config.alpha_proj * prj.d_a;
    d_v += config.alpha_proj * prj.d_b;
  }

  ModelParams& g = result.grads;
  g = ModelParams::Zeros(params.dims());
  for (Eigen::Index i = 0; i < n; ++i) {
    const BatchItem& item = batch[i];
    VectorXd d_tenk = VectorXd::Zero(d);
    VectorXd d_gt_i = d_gt.row(i).transpose();
    if (item.mixed) {
      d_tenk += itc.d_a.row(i).transpose();
    } else {
      d_gt_i += itc.d_a.row(i).transpose();
    }
    const VectorXd dz_p =
        NormalizeBackward(proj[i], d_10k.row(i).transpose());
    g.w_p.noalias() += dz_p * tenk[i].out.transpose();
    g.b_p += dz_p;
    d_tenk.noalias() += params.w_p.transpose() * dz_p;

    BackwardText(*item.tenk, tenk[i], d_tenk, g);
    BackwardText(*item.gt, gt[i], d_gt_i, g);

    const VectorXd dz_v = NormalizeBackward(video[i], d_v.row(i).transpose());
    g.w_v.noalias() += dz_v * item.video->transpose();
    g.b_v += dz_v;
  }
  return result;
}

}  // namespace divcap::train
