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
#include "geocorr/patches.hpp"

#include "geocorr/sampling.hpp"

#include <algorithm>
#include <numeric>

namespace geocorr {

PatchSet group(const TriMesh& mesh, const DistanceProvider& dists, int num_patches, int patch_size, int k) {
  const Index n = mesh.num_vertices();
  if (num_patches < 1 || num_patches > n) usage_error("patch count must be in [1, vertex count]");
  if (patch_size < 1 || patch_size > n) usage_error("patch size must be in [1, vertex count]");
  if (k < 1) usage_error("ungroup k must be at least 1");

  FarthestPoints fp = fps(mesh, dists, num_patches);
  PatchSet out;
  out.centers = std::move(fp.centers);
  out.center_rows = std::move(fp.center_rows);
  out.length_scale = mesh.length_scale();
  const double unit = 1e-9 * out.length_scale;

  std::vector<int> order(static_cast<std::size_t>(n));
  std::vector<std::int64_t> key(static_cast<std::size_t>(n));
  for (int g = 0; g < num_patches; ++g) {
    for (Index v = 0; v < n; ++v) key[static_cast<std::size_t>(v)] = order_key(out.center_rows(g, v), unit);
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + patch_size, order.end(), [&](int a, int b) {
      return std::tie(key[static_cast<std::size_t>(a)], a) < std::tie(key[static_cast<std::size_t>(b)], b);
    });
    out.members.emplace_back(order.begin(), order.begin() + patch_size);
  }

  out.center_geo = Eigen::MatrixXd::Zero(num_patches, num_patches);
  for (int g = 0; g < num_patches; ++g) {
    for (int h = g + 1; h < num_patches; ++h) {
      out.center_geo(g, h) = out.center_geo(h, g) = out.center_rows(g, out.centers[static_cast<std::size_t>(h)]);
    }
  }

  const int keep = std::min(k, num_patches);
  std::vector<int> slots(static_cast<std::size_t>(num_patches));
  std::vector<std::int64_t> ckey(static_cast<std::size_t>(num_patches));
  out.vertex_to_centers.resize(static_cast<std::size_t>(n));
  for (Index v = 0; v < n; ++v) {
    for (int g = 0; g < num_patches; ++g) ckey[static_cast<std::size_t>(g)] = order_key(out.center_rows(g, v), unit);
    std::iota(slots.begin(), slots.end(), 0);
    std::partial_sort(slots.begin(), slots.begin() + keep, slots.end(), [&](int a, int b) {
      return std::tie(ckey[static_cast<std::size_t>(a)], a) < std::tie(ckey[static_cast<std::size_t>(b)], b);
    });
    auto& list = out.vertex_to_centers[static_cast<std::size_t>(v)];
    for (int r = 0; r < keep; ++r) {
      const int g = slots[static_cast<std::size_t>(r)];
      list.push_back({g, out.center_rows(g, v)});
    }
  }
  return out;
}

UngroupMatrix ungroup_matrix(const PatchSet& patches, const UngroupParams& params) {
  if (params.k < 1) usage_error("ungroup k must be at least 1");
  if (!(params.eps > 0.0)) usage_error("ungroup eps must be positive");
  const Index n = patches.num_vertices();
  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(static_cast<std::size_t>(n * params.k));
  for (Index v = 0; v < n; ++v) {
    const auto& list = patches.vertex_to_centers[static_cast<std::size_t>(v)];
    const std::size_t use = std::min<std::size_t>(list.size(), static_cast<std::size_t>(params.k));
    double total = 0.0;
    std::vector<double> w(use);
    for (std::size_t r = 0; r < use; ++r) {
      w[r] = 1.0 / (std::pow(list[r].distance, params.p) + params.eps);
      total += w[r];
    }
    for (std::size_t r = 0; r < use; ++r) entries.emplace_back(v, list[r].center, w[r] / total);
  }
  UngroupMatrix u(n, patches.num_patches());
  u.setFromTriplets(entries.begin(), entries.end());
  return u;
}

Eigen::RowVectorXd geodesic_vector(const PatchSet& patches) {
  const int N = patches.num_patches();
  Eigen::RowVectorXd v(N * (N - 1) / 2);
  Index at = 0;
  for (int i = 0; i < N; ++i) {
    for (int j = i + 1; j < N; ++j) v[at++] = patches.center_geo(i, j) / patches.length_scale;
  }
  return v;
}

}  // namespace geocorr
