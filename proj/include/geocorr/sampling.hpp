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

namespace geocorr {

struct FarthestPoints {
  std::vector<int> centers;
  /// Min distance to the previously chosen centers at selection time
  /// (0 for the seed).
  std::vector<double> coverage;
  /// Row g holds distances from centers[g] to every vertex.
  Eigen::MatrixXd center_rows;
};

/// Furthest-point sampling. The seed is the max-area vertex; later centers
/// maximize the min distance to those already chosen. Ties go to the lower
/// index, with values compared at 1e-9 of the mesh length scale.
FarthestPoints fps(const TriMesh& mesh, const DistanceProvider& dists, int count);

}  // namespace geocorr
