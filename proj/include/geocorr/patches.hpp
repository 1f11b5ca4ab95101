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

#include "geocorr/geodesics.hpp"

#include <Eigen/SparseCore>

namespace geocorr {

struct CenterDistance {
  int center;  ///< slot in PatchSet::centers
  double distance;
};

struct PatchSet {
  std::vector<int> centers;
  /// members[g]: the patch_size nearest vertices to centers[g], nearest first.
  std::vector<std::vector<int>> members;
  Eigen::MatrixXd center_geo;
  /// Per vertex, the k nearest centers in ascending distance.
  std::vector<std::vector<CenterDistance>> vertex_to_centers;
  /// Row g: distances from centers[g] to every vertex.
  Eigen::MatrixXd center_rows;
  double length_scale = 1.0;

  int num_patches() const { return static_cast<int>(centers.size()); }
  Index num_vertices() const { return center_rows.cols(); }
};

/// FPS centers, TopM members (ties to the lower index) and nearest-center
/// lists of length min(k, N).
PatchSet group(const TriMesh& mesh, const DistanceProvider& dists, int num_patches, int patch_size, int k);

struct UngroupParams {
  int k = 3;
  double p = 2.0;
  double eps = 1e-8;
};

using UngroupMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// n x N matrix of normalized inverse-distance weights
/// w_ig = 1 / (d^p + eps) over the k nearest centers of each vertex.
UngroupMatrix ungroup_matrix(const PatchSet& patches, const UngroupParams& params);

template <typename Derived>
MatrixX<typename Derived::Scalar> ungroup(const Eigen::MatrixBase<Derived>& patch_emb, const PatchSet& patches,
                                          const UngroupParams& params) {
  if (patch_emb.rows() != patches.num_patches()) usage_error("ungroup: one embedding row per patch expected");
  return ungroup_matrix(patches, params).cast<typename Derived::Scalar>() * patch_emb;
}

/// Upper triangle of center_geo, row-major, divided by the length scale.
Eigen::RowVectorXd geodesic_vector(const PatchSet& patches);

}  // namespace geocorr
