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

#include <map>

namespace geocorr {

/// Elliptic tube along +y, capped at the bottom; the head continues from
/// its top ring.
struct TorsoSpec {
  int label = 0;
  double height = 0.6;
  double radius_x = 0.17;
  double radius_z = 0.11;
  int rings = 10;
  int sides = 16;
};

struct HeadSpec {
  int label = 1;
  double neck_length = 0.06;
  double neck_radius = 0.5;  ///< fraction of the torso radii
  double radius = 0.11;
  int rings = 4;
};

/// Eight-sided tapered tube whose root ring is the boundary of a 2x2 quad
/// hole cut in the torso around vertex (attach_ring, attach_column).
struct LimbSpec {
  std::string name;
  int label = 2;
  int attach_ring = 0;
  int attach_column = 0;
  Vec3 direction = Vec3::UnitX();
  double length = 0.5;
  double radius_root = 0.05;
  double radius_tip = 0.035;
  int rings = 7;
};

/// Rotation vectors in degrees: `root` about the attachment point, `mid`
/// about the middle ring (elbow, knee). The head uses `root` only.
struct JointPose {
  Vec3 root = Vec3::Zero();
  Vec3 mid = Vec3::Zero();
};
using Pose = std::map<std::string, JointPose>;

struct SynthSpec {
  TorsoSpec torso;
  HeadSpec head;
  std::vector<LimbSpec> limbs;
  /// Rest pose of the template, keyed by limb name or "head".
  Pose pose;
  /// Posed bases add uniform noise in [-j, j] degrees to every component.
  double pose_jitter_deg = 20.0;
  int resolution = 0;  ///< midpoint subdivision levels
  std::uint64_t seed = 0;
  std::vector<std::pair<int, int>> sym_pairs;

  void validate() const;
  int num_labels() const;
};

nlohmann::json to_json(const SynthSpec& spec);
SynthSpec synth_spec_from_json(const nlohmann::json& j);

/// Torso, head and four limbs. The right limbs are 15% longer and thicker
/// so that left and right differ intrinsically; arms attach toward +z, legs
/// toward -z, and elbows and knees are bent in the rest pose.
SynthSpec default_humanoid();

struct SynthMesh {
  TriMesh mesh;
  Labels labels;
};

/// Builds the body in `pose` (the rest pose of `spec` when null). The vertex
/// order depends only on the body plan and resolution, so every pose of
/// one body plan shares a single topology.
SynthMesh generate_humanoid(const SynthSpec& spec, const Pose* pose = nullptr);

/// Rest pose plus seeded jitter.
Pose random_pose(const SynthSpec& spec, std::uint64_t seed);

}  // namespace geocorr
