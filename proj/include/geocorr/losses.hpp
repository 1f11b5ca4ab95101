// Copyright (c) 2026 The geocorr Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include "geocorr/field.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace geocorr {

/// Soft cross-entropy between softmax(A_i / tau) and the field row of each
/// augmented vertex, averaged over rows. When `columns` is given, the
/// softmax denominator runs over those template columns plus the row's own
/// targets. Writes dL/dA into `grad` when non-null.
template <typename Derived>
double soft_infonce(const Eigen::MatrixBase<Derived>& a, const AugmentedField& field, double tau,
                    MatrixX<typename Derived::Scalar>* grad = nullptr, const std::vector<char>* columns = nullptr) {
  using Scalar = typename Derived::Scalar;
  const Index n = a.rows(), m = a.cols();
  if (!(tau > 0.0)) usage_error("tau must be positive");
  if (field.size() != n) usage_error("one field row per augmented vertex expected");
  if (columns && static_cast<Index>(columns->size()) != m) usage_error("column mask does not match A");
  if (!a.allFinite()) numerical_error("non-finite similarity matrix");
  if (grad) grad->setZero(n, m);

  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    const auto row = field.row(i);
    auto in_denominator = [&](Index v) { return !columns || (*columns)[static_cast<std::size_t>(v)]; };
    double mx = -std::numeric_limits<double>::infinity();
    for (Index v = 0; v < m; ++v) {
      if (in_denominator(v)) mx = std::max(mx, static_cast<double>(a(i, v)) / tau);
    }
    double wsum = 0.0, dot = 0.0;
    for (const auto& e : row) {
      if (e.index >= static_cast<std::uint32_t>(m)) data_error("field row points past the template");
      mx = std::max(mx, static_cast<double>(a(i, e.index)) / tau);
      wsum += e.weight;
      dot += e.weight * static_cast<double>(a(i, e.index)) / tau;
    }
    double sum = 0.0;
    for (Index v = 0; v < m; ++v) {
      if (in_denominator(v)) sum += std::exp(static_cast<double>(a(i, v)) / tau - mx);
    }
    if (columns) {
      // Targets outside the sampled columns still enter the denominator.
      // Field rows never repeat an index.
      for (const auto& e : row) {
        if (!(*columns)[e.index]) sum += std::exp(static_cast<double>(a(i, e.index)) / tau - mx);
      }
    }
    const double lse = mx + std::log(sum);
    total += wsum * lse - dot;
    if (grad) {
      const double scale = 1.0 / (tau * static_cast<double>(n));
      for (Index v = 0; v < m; ++v) {
        if (in_denominator(v)) (*grad)(i, v) = Scalar(wsum * std::exp(static_cast<double>(a(i, v)) / tau - lse) * scale);
      }
      if (columns) {
        for (const auto& e : row) {
          if (!(*columns)[e.index]) {
            (*grad)(i, e.index) = Scalar(wsum * std::exp(static_cast<double>(a(i, e.index)) / tau - lse) * scale);
          }
        }
      }
      for (const auto& e : row) (*grad)(i, e.index) -= Scalar(e.weight * scale);
    }
  }
  return total / static_cast<double>(n);
}

/// Mean label-smoothed cross-entropy of one logit matrix. Writes dL/dlogits
/// into `grad` when non-null.
template <typename Derived>
double smoothed_cross_entropy(const Eigen::MatrixBase<Derived>& logits, const Labels& labels, double smoothing,
                              MatrixX<typename Derived::Scalar>* grad = nullptr) {
  using Scalar = typename Derived::Scalar;
  const Index n = logits.rows(), C = logits.cols();
  if (static_cast<Index>(labels.size()) != n) usage_error("one label per logit row expected");
  if (!(smoothing >= 0.0 && smoothing < 1.0 + 1e-12)) usage_error("label smoothing must be in [0, 1]");
  if (grad) grad->setZero(n, C);
  double total = 0.0;
  for (Index i = 0; i < n; ++i) {
    const int label = labels[static_cast<std::size_t>(i)];
    if (label < 0 || label >= C) data_error("part label " + std::to_string(label) + " outside [0, C)");
    double mx = static_cast<double>(logits.row(i).maxCoeff());
    double sum = 0.0;
    for (Index c = 0; c < C; ++c) sum += std::exp(static_cast<double>(logits(i, c)) - mx);
    const double lse = mx + std::log(sum);
    for (Index c = 0; c < C; ++c) {
      const double target = (c == label ? 1.0 - smoothing : 0.0) + smoothing / static_cast<double>(C);
      const double logp = static_cast<double>(logits(i, c)) - lse;
      total -= target * logp;
      if (grad) (*grad)(i, c) = Scalar((std::exp(logp) - target) / static_cast<double>(n));
    }
  }
  return total / static_cast<double>(n);
}

/// Mean of the two smoothed cross-entropies.
template <typename DA, typename DT>
double part_loss(const Eigen::MatrixBase<DA>& logits_aug, const Eigen::MatrixBase<DT>& logits_tmp,
                 const Labels& labels_aug, const Labels& labels_tmp, double smoothing,
                 MatrixX<typename DA::Scalar>* grad_aug = nullptr, MatrixX<typename DT::Scalar>* grad_tmp = nullptr) {
  if (logits_aug.cols() != logits_tmp.cols()) usage_error("logit widths differ");
  const double ca = smoothed_cross_entropy(logits_aug, labels_aug, smoothing, grad_aug);
  const double ct = smoothed_cross_entropy(logits_tmp, labels_tmp, smoothing, grad_tmp);
  if (grad_aug) *grad_aug *= 0.5;
  if (grad_tmp) *grad_tmp *= 0.5;
  return 0.5 * (ca + ct);
}

/// Binary mask over (augmented, template) vertex pairs whose labels form one
/// of the declared symmetric pairs.
Eigen::MatrixXd sym_mask(const Labels& labels_aug, const Labels& labels_tmp,
                         const std::vector<std::pair<int, int>>& sym_pairs);

/// (1 / n_aug) * sum(mask .* A). The gradient is mask / n_aug.
template <typename DA, typename DM>
double sym_loss(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DM>& mask) {
  if (a.rows() != mask.rows() || a.cols() != mask.cols()) usage_error("symmetry mask shape does not match A");
  return static_cast<double>(a.cwiseProduct(mask).sum()) / static_cast<double>(a.rows());
}

struct LossWeights {
  double soft = 0.0;
  double part = 0.0;
  double sym = 0.0;
};

inline double total_loss(double l_soft, double l_part, double l_sym, const LossWeights& w) {
  if (w.soft < 0.0 || w.part < 0.0 || w.sym < 0.0) usage_error("loss weights must be non-negative");
  double total = 0.0;
  if (w.soft != 0.0) total += w.soft * l_soft;
  if (w.part != 0.0) total += w.part * l_part;
  if (w.sym != 0.0) total += w.sym * l_sym;
  return total;
}

}  // namespace geocorr
