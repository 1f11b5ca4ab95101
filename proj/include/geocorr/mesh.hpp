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

#include "geocorr/common.hpp"

#include <Eigen/Core>

#include <span>

namespace geocorr {

using EdgeList = Eigen::Matrix<int, Eigen::Dynamic, 2, Eigen::RowMajor>;

/// Per-vertex area by the one-third rule. Isolated vertices get 0.
Eigen::VectorXd vertex_areas(const Points& vertices, const Triangles& faces);

struct CurvatureEstimate {
  Eigen::VectorXd magnitude;
  int zero_area_warnings = 0;
};

/// Mixed Voronoi areas (Voronoi share for non-obtuse triangles, half/quarter
/// splits otherwise). These sum to the surface area like the one-third rule.
Eigen::VectorXd mixed_voronoi_areas(const Points& vertices, const Triangles& faces);

/// |H| from the cotangent Laplacian: |sum_j (cot a + cot b)(x_i - x_j)| / (4 M_i),
/// the mean-curvature normal over twice the mixed Voronoi area M_i. The
/// one-third areas only gate the zero-area check; normalizing by them is
/// biased at irregular vertices. Boundary vertices take the value of their
/// nearest interior vertex.
CurvatureEstimate mean_curvature_magnitude(const Points& vertices, const Triangles& faces,
                                           const Eigen::VectorXd& areas);

/// Immutable triangle mesh with derived edge graph, vertex areas and
/// curvature. Safe to share read-only across threads.
class TriMesh {
 public:
  TriMesh() = default;
  /// Validates indices and face degeneracy, then derives everything else.
  TriMesh(Points vertices, Triangles faces);

  const Points& vertices() const { return vertices_; }
  const Triangles& faces() const { return faces_; }
  Index num_vertices() const { return vertices_.rows(); }
  Index num_faces() const { return faces_.rows(); }

  const EdgeList& edges() const { return edges_; }
  const Eigen::VectorXd& edge_lengths() const { return edge_lengths_; }
  const Eigen::VectorXd& vertex_area() const { return vertex_area_; }
  const Eigen::VectorXd& curvature() const { return curvature_; }
  int curvature_warnings() const { return curvature_warnings_; }

  double total_area() const { return total_area_; }
  /// sqrt(total area); the unit all relative lengths are expressed in.
  double length_scale() const { return std::sqrt(total_area_); }
  /// Connected components of the face edge graph (isolated vertices count).
  int component_count() const { return component_count_; }
  bool is_connected() const { return component_count_ == 1; }

  std::span<const int> neighbors(Index v) const {
    return {adj_.data() + adj_start_[v], static_cast<std::size_t>(adj_start_[v + 1] - adj_start_[v])};
  }
  std::span<const double> neighbor_lengths(Index v) const {
    return {adj_len_.data() + adj_start_[v],
            static_cast<std::size_t>(adj_start_[v + 1] - adj_start_[v])};
  }

  /// Applies x -> R x + t to every vertex.
  TriMesh transformed(const Mat3& rotation, const Vec3& translation = Vec3::Zero()) const;
  TriMesh scaled(double factor) const;

 private:
  Points vertices_;
  Triangles faces_;
  EdgeList edges_;
  Eigen::VectorXd edge_lengths_;
  Eigen::VectorXd vertex_area_;
  Eigen::VectorXd curvature_;
  int curvature_warnings_ = 0;
  double total_area_ = 0.0;
  int component_count_ = 0;
  std::vector<int> adj_start_{0};
  std::vector<int> adj_;
  std::vector<double> adj_len_;
};

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c);

/// Principal axes of the surface as a solid of uniform area density.
struct PrincipalFrame {
  Vec3 centroid;
  Mat3 axes;         ///< columns, by descending variance
  Vec3 variance;     ///< second central moments along the axes
  Vec3 skewness;     ///< third moment over variance^1.5, >= 0 by the sign choice
};

/// Exact triangle moments; each axis is oriented so that the third moment
/// along it is non-negative. Near-equal variances or near-zero skewness make
/// the corresponding axes unstable under small deformations.
PrincipalFrame principal_frame(const TriMesh& mesh);

/// Unique undirected face edges, sorted lexicographically, with i < j.
EdgeList face_edges(const Triangles& faces);

/// Number of components of the face edge graph over `num_vertices` vertices.
int count_components(Index num_vertices, const Triangles& faces);

}  // namespace geocorr
