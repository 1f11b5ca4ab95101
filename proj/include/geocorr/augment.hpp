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

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <optional>
#include <variant>

namespace geocorr {

struct SubdivideStep {};
struct DecimateStep {
  int target_vertex_count = 0;
};
struct RotateStep {
  /// Unset means "derive from the chain seed and the step position".
  std::optional<std::uint64_t> seed;
};
using AugmentStep = std::variant<SubdivideStep, DecimateStep, RotateStep>;

struct AugmentSpec {
  std::vector<AugmentStep> steps;
  std::uint64_t seed = 0;
};

nlohmann::json to_json(const AugmentSpec& spec);
AugmentSpec augment_spec_from_json(const nlohmann::json& j);

/// Back-traced map from augmented vertices to template vertices.
struct AnchorMap {
  std::vector<int> h;
  Labels labels_aug;
  Labels labels_tmp;
  AugmentSpec chain;
};

nlohmann::json to_json(const AnchorMap& anchors);
AnchorMap anchor_map_from_json(const nlohmann::json& j);

struct AugmentedMesh {
  TriMesh mesh;
  AnchorMap anchors;
};

/// Applies the chain in order and carries h through every step.
/// Subdivision midpoints map to the nearer parent endpoint; the two are
/// equidistant by construction, so the lower endpoint index wins.
/// Decimation clusters map to their max-area representative. Rotation
/// leaves h untouched.
AugmentedMesh augment(const TriMesh& base, const Labels& labels_tmp, const AugmentSpec& spec);

/// Midpoint (1-to-4) subdivision. New vertices follow the sorted edge list.
struct Subdivision {
  Points vertices;
  Triangles faces;
  std::vector<std::array<int, 2>> midpoint_parents;
};
Subdivision midpoint_subdivide(const Points& vertices, const Triangles& faces);

/// Uniform-grid vertex clustering down to at most `target_vertex_count`
/// vertices. `representative[k]` is the source vertex kept as new vertex k.
struct Decimation {
  TriMesh mesh;
  std::vector<int> representative;
};
Decimation cluster_decimate(const TriMesh& mesh, int target_vertex_count);

/// Uniformly distributed proper rotation drawn from `seed`.
Mat3 random_rotation(std::uint64_t seed);

/// Checks that labels_aug[i] == labels_tmp[h[i]] for all i.
bool labels_consistent(const AnchorMap& anchors);

}  // namespace geocorr
