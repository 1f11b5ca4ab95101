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
#include "geocorr/sampling.hpp"

namespace geocorr {

FarthestPoints fps(const TriMesh& mesh, const DistanceProvider& dists, int count) {
  const Index n = mesh.num_vertices();
  if (count < 1 || count > n) data_error("fps count must be in [1, vertex count]");
  if (dists.size() != n) data_error("distance provider does not match the mesh");

  const double area_unit = 1e-9 * mesh.total_area() / static_cast<double>(n);
  const double dist_unit = 1e-9 * mesh.length_scale();
  int seed = 0;
  for (Index v = 1; v < n; ++v) {
    if (order_key(mesh.vertex_area()[v], area_unit) > order_key(mesh.vertex_area()[seed], area_unit)) {
      seed = static_cast<int>(v);
    }
  }

  FarthestPoints out;
  out.center_rows.resize(count, n);
  Eigen::VectorXd nearest = Eigen::VectorXd::Constant(n, kUnreachable);
  int next = seed;
  double next_cov = 0.0;
  for (int g = 0; g < count; ++g) {
    out.centers.push_back(next);
    out.coverage.push_back(next_cov);
    out.center_rows.row(g) = dists.row(next).transpose();
    nearest = nearest.cwiseMin(out.center_rows.row(g).transpose());
    if (g + 1 == count) break;
    next = 0;
    for (Index v = 1; v < n; ++v) {
      if (order_key(nearest[v], dist_unit) > order_key(nearest[next], dist_unit)) next = static_cast<int>(v);
    }
    next_cov = nearest[next];
  }
  return out;
}

}  // namespace geocorr
