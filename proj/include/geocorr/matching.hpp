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

#include "geocorr/descriptor.hpp"

#include <filesystem>

namespace geocorr {

struct Correspondence {
  std::vector<int> map;
  std::vector<double> score;

  Index size() const { return static_cast<Index>(map.size()); }
};

/// Nearest neighbor by cosine similarity; ties go to the lower target index.
/// Rows are normalized here, so unnormalized inputs are fine.
template <typename DS, typename DT>
Correspondence retrieve(const Eigen::MatrixBase<DS>& src, const Eigen::MatrixBase<DT>& tgt) {
  using Scalar = typename DS::Scalar;
  static_assert(std::is_same_v<Scalar, typename DT::Scalar>, "descriptor scalar types differ");
  if (src.cols() != tgt.cols()) usage_error("descriptor dimensions differ");
  if (tgt.rows() == 0) usage_error("empty target descriptor set");
  const RowMatrixX<Scalar> s = src.rowwise().normalized();
  const RowMatrixX<Scalar> t = tgt.rowwise().normalized();
  if (!s.allFinite() || !t.allFinite()) numerical_error("descriptor rows must be finite and nonzero");

  Correspondence out;
  out.map.resize(static_cast<std::size_t>(s.rows()));
  out.score.resize(static_cast<std::size_t>(s.rows()));
  constexpr Index kBlock = 256;
  for (Index start = 0; start < s.rows(); start += kBlock) {
    const Index rows = std::min(kBlock, s.rows() - start);
    const MatrixX<Scalar> sim = s.middleRows(start, rows) * t.transpose();
    for (Index r = 0; r < rows; ++r) {
      Index best = 0;
      for (Index v = 1; v < sim.cols(); ++v) {
        if (sim(r, v) > sim(r, best)) best = v;
      }
      out.map[static_cast<std::size_t>(start + r)] = static_cast<int>(best);
      out.score[static_cast<std::size_t>(start + r)] = static_cast<double>(sim(r, best));
    }
  }
  return out;
}

inline Correspondence retrieve(const DescriptorSet& src, const DescriptorSet& tgt) { return retrieve(src.z, tgt.z); }

struct GeodesicErrors {
  double mean_percent = 0.0;  ///< 100 * mean(d / sqrt(area))
  Eigen::VectorXd per_vertex;  ///< d / sqrt(area), uncapped
};

/// Geodesic distance on the target between predicted and true matches,
/// normalized by sqrt(total target area).
GeodesicErrors geodesic_errors(const Correspondence& pred, const std::vector<int>& gt, const TriMesh& tgt_mesh,
                               const DistanceProvider& tgt_geo);
inline double mean_geodesic_error(const Correspondence& pred, const std::vector<int>& gt, const TriMesh& tgt_mesh,
                                  const DistanceProvider& tgt_geo) {
  return geodesic_errors(pred, gt, tgt_mesh, tgt_geo).mean_percent;
}

/// Pearson r between cosine similarity and geodesic distance over every
/// (vertex, neighbor) pair, neighbors being the K geodesically nearest
/// other vertices.
double pearson_local(const DescriptorSet& desc, const DistanceProvider& geo, int K);

Labels label_transfer(const Correspondence& corr, const Labels& tgt_labels);

/// Fraction of source vertices on a symmetric part whose transferred label
/// is that part's partner (e.g. left arm labeled right arm).
double symmetric_flip_rate(const Labels& src_labels, const Labels& transferred,
                           const std::vector<std::pair<int, int>>& sym_pairs);

double label_accuracy(const Labels& truth, const Labels& predicted);

/// "src_index tgt_index score" per line.
void save_correspondence(const Correspondence& corr, const std::filesystem::path& path);
std::string format_correspondence(const Correspondence& corr);
Correspondence load_correspondence(const std::filesystem::path& path);

/// Blue (0) to red (cap and above), linear.
Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor> error_colors(const Eigen::VectorXd& errors, double cap);

}  // namespace geocorr
