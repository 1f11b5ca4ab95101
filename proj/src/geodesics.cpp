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
#include "geocorr/geodesics.hpp"

#include "geocorr/binary_io.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <thread>

namespace geocorr {

namespace {

constexpr std::string_view kGeoMagic = "GEOM";
constexpr std::uint32_t kGeoVersion = 1;

void dijkstra_into(const TriMesh& mesh, Index source, double* out, bool& all_reachable) {
  const Index n = mesh.num_vertices();
  std::fill(out, out + n, kUnreachable);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  out[source] = 0.0;
  pq.emplace(0.0, static_cast<int>(source));
  while (!pq.empty()) {
    const auto [d, v] = pq.top();
    pq.pop();
    if (d > out[v]) continue;
    const auto nbr = mesh.neighbors(v);
    const auto len = mesh.neighbor_lengths(v);
    for (std::size_t k = 0; k < nbr.size(); ++k) {
      const double nd = d + len[k];
      if (nd < out[nbr[k]]) {
        out[nbr[k]] = nd;
        pq.emplace(nd, nbr[k]);
      }
    }
  }
  all_reachable = std::none_of(out, out + n, [](double x) { return x == kUnreachable; });
}

}  // namespace

SingleSourceResult single_source(const TriMesh& mesh, Index source) {
  if (source < 0 || source >= mesh.num_vertices()) data_error("geodesic source out of range");
  SingleSourceResult r;
  r.distance.resize(mesh.num_vertices());
  dijkstra_into(mesh, source, r.distance.data(), r.all_reachable);
  return r;
}

GeoMatrix::GeoMatrix(Eigen::MatrixXd distances) : d_(std::move(distances)) {
  if (d_.rows() != d_.cols()) data_error("geodesic matrix must be square");
}

GeoMatrix all_pairs(const TriMesh& mesh, int workers) {
  if (!mesh.is_connected()) {
    data_error("mesh has " + std::to_string(mesh.component_count()) + " components; geodesics need one");
  }
  const Index n = mesh.num_vertices();
  Eigen::MatrixXd d(n, n);
  workers = std::max(1, workers);
  std::vector<char> ok(static_cast<std::size_t>(workers), 1);
  auto run = [&](int w) {
    for (Index s = w; s < n; s += workers) {
      bool reach = true;
      dijkstra_into(mesh, s, d.col(s).data(), reach);
      if (!reach) ok[static_cast<std::size_t>(w)] = 0;
    }
  };
  if (workers == 1) {
    run(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(run, w);
    for (auto& t : pool) t.join();
  }
  if (std::find(ok.begin(), ok.end(), 0) != ok.end()) data_error("unreachable vertex in all-pairs geodesics");
  // Both triangles agree up to summation order; mirror one of them.
  for (Index j = 0; j < n; ++j) {
    for (Index i = j + 1; i < n; ++i) d(i, j) = d(j, i);
  }
  return GeoMatrix(std::move(d));
}

std::vector<unsigned char> GeoMatrix::serialize() const {
  BinaryWriter w;
  w.put_magic(kGeoMagic);
  w.put<std::uint32_t>(kGeoVersion);
  w.put<std::uint64_t>(static_cast<std::uint64_t>(size()));
  for (Index i = 0; i < size(); ++i) {
    for (Index j = 0; j < size(); ++j) w.put<float>(static_cast<float>(d_(i, j)));
  }
  return w.bytes();
}

void GeoMatrix::save(const std::filesystem::path& path) const {
  write_binary_file(path, serialize());
}

GeoMatrix GeoMatrix::deserialize(std::vector<unsigned char> bytes, const std::string& origin) {
  BinaryReader r(std::move(bytes), origin);
  r.expect_magic(kGeoMagic);
  if (r.get<std::uint32_t>() != kGeoVersion) data_error("unsupported geodesic matrix version in " + origin);
  const auto n = static_cast<Index>(r.get<std::uint64_t>());
  Eigen::MatrixXd d(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) d(i, j) = r.get<float>();
  }
  r.expect_end();
  return GeoMatrix(std::move(d));
}

GeoMatrix GeoMatrix::load(const std::filesystem::path& path) {
  return deserialize(read_binary_file(path), path.string());
}

CachedGeodesics::CachedGeodesics(std::shared_ptr<const TriMesh> mesh, std::size_t capacity)
    : mesh_(std::move(mesh)), capacity_(std::max<std::size_t>(1, capacity)) {
  if (!mesh_->is_connected()) data_error("geodesics need a connected mesh");
}

Eigen::VectorXd CachedGeodesics::row(Index source) const {
  {
    std::lock_guard lock(mutex_);
    auto it = rows_.find(source);
    if (it != rows_.end()) {
      order_.splice(order_.begin(), order_, it->second.second);
      return it->second.first;
    }
  }
  auto r = single_source(*mesh_, source);
  if (!r.all_reachable) data_error("unreachable vertex from source " + std::to_string(source));
  std::lock_guard lock(mutex_);
  if (rows_.find(source) == rows_.end()) {
    order_.push_front(source);
    rows_.emplace(source, std::make_pair(r.distance, order_.begin()));
    while (rows_.size() > capacity_) {
      rows_.erase(order_.back());
      order_.pop_back();
    }
  }
  return r.distance;
}

std::size_t CachedGeodesics::cached_rows() const {
  std::lock_guard lock(mutex_);
  return rows_.size();
}

Eigen::VectorXd EuclideanDistances::row(Index source) const {
  const auto& v = mesh_->vertices();
  return (v.rowwise() - v.row(source)).rowwise().norm();
}

std::unique_ptr<DistanceProvider> make_geodesic_provider(std::shared_ptr<const TriMesh> mesh,
                                                         const GeodesicOptions& options) {
  if (mesh->num_vertices() <= options.dense_vertex_cap) {
    auto geo = std::make_shared<const GeoMatrix>(all_pairs(*mesh, options.workers));
    return std::make_unique<DenseGeodesics>(std::move(geo));
  }
  return std::make_unique<CachedGeodesics>(std::move(mesh), options.cache_rows);
}

}  // namespace geocorr
