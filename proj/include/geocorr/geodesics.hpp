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

#include "geocorr/mesh.hpp"

#include <filesystem>
#include <limits>
#include <list>
#include <memory>
#include <mutex>
#include <unordered_map>

namespace geocorr {

/// Distance reported for vertices the source cannot reach.
inline constexpr double kUnreachable = std::numeric_limits<double>::max();

struct SingleSourceResult {
  Eigen::VectorXd distance;
  bool all_reachable = true;
};

/// Exact shortest paths on the face edge graph weighted by Euclidean
/// edge length.
SingleSourceResult single_source(const TriMesh& mesh, Index source);

/// Dense symmetric matrix of edge-graph geodesic distances.
class GeoMatrix {
 public:
  GeoMatrix() = default;
  explicit GeoMatrix(Eigen::MatrixXd distances);

  Index size() const { return d_.rows(); }
  double operator()(Index i, Index j) const { return d_(i, j); }
  const Eigen::MatrixXd& matrix() const { return d_; }
  /// Row i (equal to column i by symmetry).
  auto row(Index i) const { return d_.col(i); }

  /// Header "GEOM", u32 version, u64 n, then n*n little-endian f32 row-major.
  void save(const std::filesystem::path& path) const;
  std::vector<unsigned char> serialize() const;
  static GeoMatrix load(const std::filesystem::path& path);
  static GeoMatrix deserialize(std::vector<unsigned char> bytes, const std::string& origin = "<geo>");

 private:
  Eigen::MatrixXd d_;
};

/// All-pairs distances, one Dijkstra per row. Rows are independent, so the
/// result is identical for any worker count. Throws on disconnected meshes.
GeoMatrix all_pairs(const TriMesh& mesh, int workers = 1);

/// Answers single-source distance queries on one mesh.
class DistanceProvider {
 public:
  virtual ~DistanceProvider() = default;
  virtual Index size() const = 0;
  virtual Eigen::VectorXd row(Index source) const = 0;
};

class DenseGeodesics final : public DistanceProvider {
 public:
  explicit DenseGeodesics(std::shared_ptr<const GeoMatrix> geo) : geo_(std::move(geo)) {}
  Index size() const override { return geo_->size(); }
  Eigen::VectorXd row(Index source) const override { return geo_->row(source); }
  const GeoMatrix& matrix() const { return *geo_; }

 private:
  std::shared_ptr<const GeoMatrix> geo_;
};

/// On-demand Dijkstra rows with an LRU cache; for meshes above the dense cap.
class CachedGeodesics final : public DistanceProvider {
 public:
  CachedGeodesics(std::shared_ptr<const TriMesh> mesh, std::size_t capacity);
  Index size() const override { return mesh_->num_vertices(); }
  Eigen::VectorXd row(Index source) const override;
  std::size_t cached_rows() const;

 private:
  std::shared_ptr<const TriMesh> mesh_;
  std::size_t capacity_;
  mutable std::mutex mutex_;
  mutable std::list<Index> order_;
  mutable std::unordered_map<Index, std::pair<Eigen::VectorXd, std::list<Index>::iterator>> rows_;
};

/// Straight-line distances; the Euclidean fallback used by ablations.
class EuclideanDistances final : public DistanceProvider {
 public:
  explicit EuclideanDistances(std::shared_ptr<const TriMesh> mesh) : mesh_(std::move(mesh)) {}
  Index size() const override { return mesh_->num_vertices(); }
  Eigen::VectorXd row(Index source) const override;

 private:
  std::shared_ptr<const TriMesh> mesh_;
};

struct GeodesicOptions {
  Index dense_vertex_cap = 20000;
  std::size_t cache_rows = 256;
  int workers = 1;
};

/// Dense all-pairs up to the cap, cached single-source rows above it.
std::unique_ptr<DistanceProvider> make_geodesic_provider(std::shared_ptr<const TriMesh> mesh,
                                                         const GeodesicOptions& options = {});

}  // namespace geocorr
