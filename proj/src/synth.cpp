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
#include "geocorr/synth.hpp"

#include "geocorr/augment.hpp"
#include "geocorr/random.hpp"

#include <Eigen/Geometry>

#include <array>
#include <numbers>
#include <set>

namespace geocorr {

namespace {

using nlohmann::json;

// Hole boundary offsets (column, ring), counter-clockwise from +column.
constexpr std::array<std::array<int, 2>, 8> kHoleRing = {
    {{1, 0}, {1, 1}, {0, 1}, {-1, 1}, {-1, 0}, {-1, -1}, {0, -1}, {1, -1}}};

int wrap(int c, int n) { return ((c % n) + n) % n; }

int circular_gap(int a, int b, int n) {
  const int d = wrap(a - b, n);
  return std::min(d, n - d);
}

Mat3 rotation_deg(const Vec3& v) {
  const double norm = v.norm();
  if (norm == 0.0) return Mat3::Identity();
  return Eigen::AngleAxisd(norm * std::numbers::pi / 180.0, v / norm).toRotationMatrix();
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const json& j) {
  if (!j.is_array() || j.size() != 3) data_error("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

template <typename F>
void each_key(const json& j, const std::string& what, F&& f) {
  if (!j.is_object()) data_error(what + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!f(key, value)) data_error("unknown " + what + " key: " + key);
  }
}

Vec3 torso_point(const TorsoSpec& t, int r, int c) {
  const double phi = 2.0 * std::numbers::pi * c / t.sides;
  const double y = -0.5 * t.height + t.height * r / (t.rings - 1);
  return {t.radius_x * std::cos(phi), y, t.radius_z * std::sin(phi)};
}

bool in_hole(const LimbSpec& l, int r, int c, int sides) {
  // Quad (r, c) spans rings r..r+1 and columns c..c+1.
  return (r == l.attach_ring - 1 || r == l.attach_ring) &&
         (wrap(c - l.attach_column, sides) == 0 || wrap(c - l.attach_column + 1, sides) == 0);
}

}  // namespace

void SynthSpec::validate() const {
  const auto& t = torso;
  if (t.sides < 8 || t.sides % 2) usage_error("torso sides must be even and at least 8");
  if (t.rings < 4) usage_error("torso needs at least 4 rings");
  if (!(t.height > 0 && t.radius_x > 0 && t.radius_z > 0)) usage_error("torso dimensions must be positive");
  if (head.rings < 1 || !(head.radius > 0 && head.neck_length > 0 && head.neck_radius > 0))
    usage_error("bad head dimensions");
  if (resolution < 0 || resolution > 3) usage_error("resolution must be in [0, 3]");
  if (!(pose_jitter_deg >= 0)) usage_error("pose jitter must be non-negative");
  std::set<std::string> names{"head"};
  std::set<int> labels{t.label, head.label};
  for (std::size_t i = 0; i < limbs.size(); ++i) {
    const auto& l = limbs[i];
    if (l.name.empty() || !names.insert(l.name).second) usage_error("limb names must be unique and non-empty");
    if (l.attach_ring < 1 || l.attach_ring > t.rings - 2)
      usage_error("limb " + l.name + " attaches outside the torso interior rings");
    if (l.attach_column < 0 || l.attach_column >= t.sides) usage_error("limb " + l.name + " column out of range");
    if (l.rings < 3) usage_error("limb " + l.name + " needs at least 3 rings");
    if (!(l.length > 0 && l.radius_root > 0 && l.radius_tip > 0)) usage_error("limb " + l.name + " has bad dimensions");
    if (l.label < 0) usage_error("part labels must be non-negative");
    labels.insert(l.label);
    const double phi = 2.0 * std::numbers::pi * l.attach_column / t.sides;
    const Vec3 normal = Vec3(std::cos(phi) / t.radius_x, 0, std::sin(phi) / t.radius_z).normalized();
    if (!(l.direction.norm() > 0) || l.direction.normalized().dot(normal) <= 0)
      usage_error("limb " + l.name + " must point away from the torso");
    for (std::size_t k = 0; k < i; ++k) {
      if (std::abs(limbs[k].attach_ring - l.attach_ring) <= 2 &&
          circular_gap(limbs[k].attach_column, l.attach_column, t.sides) <= 2)
        usage_error("limbs " + limbs[k].name + " and " + l.name + " overlap on the torso");
    }
  }
  if (t.label < 0 || head.label < 0) usage_error("part labels must be non-negative");
  for (const auto& [name, p] : pose) {
    if (!names.count(name)) usage_error("pose names unknown part " + name);
  }
  for (const auto& [a, b] : sym_pairs) {
    if (!labels.count(a) || !labels.count(b) || a == b) usage_error("symmetric pair names unknown or equal labels");
  }
}

int SynthSpec::num_labels() const {
  int m = std::max(torso.label, head.label);
  for (const auto& l : limbs) m = std::max(m, l.label);
  return m + 1;
}

json to_json(const SynthSpec& s) {
  json limbs = json::array();
  for (const auto& l : s.limbs) {
    limbs.push_back({{"name", l.name},
                     {"label", l.label},
                     {"attach_ring", l.attach_ring},
                     {"attach_column", l.attach_column},
                     {"direction", vec_json(l.direction)},
                     {"length", l.length},
                     {"radius_root", l.radius_root},
                     {"radius_tip", l.radius_tip},
                     {"rings", l.rings}});
  }
  json pose = json::object();
  for (const auto& [name, p] : s.pose) pose[name] = {{"root", vec_json(p.root)}, {"mid", vec_json(p.mid)}};
  json pairs = json::array();
  for (const auto& [a, b] : s.sym_pairs) pairs.push_back({a, b});
  return {{"torso",
           {{"label", s.torso.label},
            {"height", s.torso.height},
            {"radius_x", s.torso.radius_x},
            {"radius_z", s.torso.radius_z},
            {"rings", s.torso.rings},
            {"sides", s.torso.sides}}},
          {"head",
           {{"label", s.head.label},
            {"neck_length", s.head.neck_length},
            {"neck_radius", s.head.neck_radius},
            {"radius", s.head.radius},
            {"rings", s.head.rings}}},
          {"limbs", limbs},
          {"pose", pose},
          {"pose_jitter_deg", s.pose_jitter_deg},
          {"resolution", s.resolution},
          {"seed", s.seed},
          {"sym_pairs", pairs}};
}

SynthSpec synth_spec_from_json(const json& j) {
  SynthSpec s;
  try {
    each_key(j, "synth config", [&](const std::string& key, const json& v) {
      if (key == "torso") {
        each_key(v, "torso", [&](const std::string& k, const json& x) {
          if (k == "label") s.torso.label = x.get<int>();
          else if (k == "height") s.torso.height = x.get<double>();
          else if (k == "radius_x") s.torso.radius_x = x.get<double>();
          else if (k == "radius_z") s.torso.radius_z = x.get<double>();
          else if (k == "rings") s.torso.rings = x.get<int>();
          else if (k == "sides") s.torso.sides = x.get<int>();
          else return false;
          return true;
        });
      } else if (key == "head") {
        each_key(v, "head", [&](const std::string& k, const json& x) {
          if (k == "label") s.head.label = x.get<int>();
          else if (k == "neck_length") s.head.neck_length = x.get<double>();
          else if (k == "neck_radius") s.head.neck_radius = x.get<double>();
          else if (k == "radius") s.head.radius = x.get<double>();
          else if (k == "rings") s.head.rings = x.get<int>();
          else return false;
          return true;
        });
      } else if (key == "limbs") {
        for (const auto& lj : v) {
          LimbSpec l;
          each_key(lj, "limb", [&](const std::string& k, const json& x) {
            if (k == "name") l.name = x.get<std::string>();
            else if (k == "label") l.label = x.get<int>();
            else if (k == "attach_ring") l.attach_ring = x.get<int>();
            else if (k == "attach_column") l.attach_column = x.get<int>();
            else if (k == "direction") l.direction = vec_from(x);
            else if (k == "length") l.length = x.get<double>();
            else if (k == "radius_root") l.radius_root = x.get<double>();
            else if (k == "radius_tip") l.radius_tip = x.get<double>();
            else if (k == "rings") l.rings = x.get<int>();
            else return false;
            return true;
          });
          s.limbs.push_back(std::move(l));
        }
      } else if (key == "pose") {
        each_key(v, "pose", [&](const std::string& name, const json& pj) {
          JointPose p;
          each_key(pj, "joint pose", [&](const std::string& k, const json& x) {
            if (k == "root") p.root = vec_from(x);
            else if (k == "mid") p.mid = vec_from(x);
            else return false;
            return true;
          });
          s.pose[name] = p;
          return true;
        });
      } else if (key == "pose_jitter_deg") {
        s.pose_jitter_deg = v.get<double>();
      } else if (key == "resolution") {
        s.resolution = v.get<int>();
      } else if (key == "seed") {
        s.seed = v.get<std::uint64_t>();
      } else if (key == "sym_pairs") {
        s.sym_pairs.clear();
        for (const auto& p : v) s.sym_pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
      } else {
        return false;
      }
      return true;
    });
  } catch (const json::exception& e) {
    data_error(std::string("bad synth config: ") + e.what());
  }
  s.validate();
  return s;
}

SynthSpec default_humanoid() {
  SynthSpec s;
  const int shoulder = s.torso.rings - 3, hip = 2;
  auto limb = [](std::string name, int label, int ring, int column, Vec3 dir, double length, double r0, double r1,
                 int rings, double scale) {
    LimbSpec l;
    l.name = std::move(name);
    l.label = label;
    l.attach_ring = ring;
    l.attach_column = column;
    l.direction = dir.normalized();
    l.length = length * scale;
    l.radius_root = r0 * scale;
    l.radius_tip = r1 * scale;
    l.rings = rings;
    return l;
  };
  // Arms sit toward +z and legs toward -z, and the right side is larger, so
  // the principal axes have a well-defined orientation.
  s.limbs = {limb("left_arm", 2, shoulder, 2, {1, -0.15, 0}, 0.55, 0.05, 0.035, 7, 1.0),
             limb("right_arm", 3, shoulder, 6, {-1, -0.15, 0}, 0.55, 0.05, 0.035, 7, 1.15),
             limb("left_leg", 4, hip, 14, {0.3, -1, 0}, 0.8, 0.065, 0.045, 9, 1.0),
             limb("right_leg", 5, hip, 10, {-0.3, -1, 0}, 0.8, 0.065, 0.045, 9, 1.15)};
  s.pose["left_arm"].mid = Vec3(0, -60, 0);
  s.pose["right_arm"].mid = Vec3(0, 60, 0);
  s.pose["left_leg"].mid = Vec3(40, 0, 0);
  s.pose["right_leg"].mid = Vec3(40, 0, 0);
  s.sym_pairs = {{2, 3}, {4, 5}};
  return s;
}

Pose random_pose(const SynthSpec& spec, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Pose out;
  std::vector<std::string> names;
  for (const auto& l : spec.limbs) names.push_back(l.name);
  names.push_back("head");
  for (const auto& name : names) {
    auto it = spec.pose.find(name);
    JointPose p = it == spec.pose.end() ? JointPose{} : it->second;
    for (int d = 0; d < 3; ++d) p.root[d] += spec.pose_jitter_deg * (2.0 * unit_uniform(rng) - 1.0);
    for (int d = 0; d < 3; ++d) p.mid[d] += spec.pose_jitter_deg * (2.0 * unit_uniform(rng) - 1.0);
    out[name] = p;
  }
  return out;
}

SynthMesh generate_humanoid(const SynthSpec& spec, const Pose* pose) {
  spec.validate();
  const Pose& joints = pose ? *pose : spec.pose;
  auto joint = [&](const std::string& name) {
    auto it = joints.find(name);
    return it == joints.end() ? JointPose{} : it->second;
  };
  const TorsoSpec& t = spec.torso;
  const int S = t.sides, R = t.rings;

  std::vector<Vec3> verts;
  Labels labels;
  std::vector<std::array<int, 3>> faces;
  auto add = [&](const Vec3& p, int label) {
    verts.push_back(p);
    labels.push_back(label);
    return static_cast<int>(verts.size() - 1);
  };
  auto quad_strip = [&](const std::vector<int>& lo, const std::vector<int>& hi) {
    const std::size_t n = lo.size();
    for (std::size_t j = 0; j < n; ++j) {
      const int a = lo[j], b = lo[(j + 1) % n], c = hi[(j + 1) % n], d = hi[j];
      faces.push_back({a, d, c});
      faces.push_back({a, c, b});
    }
  };

  // Torso grid minus the hole centers.
  std::vector<std::vector<int>> id(static_cast<std::size_t>(R), std::vector<int>(static_cast<std::size_t>(S), -1));
  for (int r = 0; r < R; ++r) {
    for (int c = 0; c < S; ++c) {
      bool center = false;
      for (const auto& l : spec.limbs) center |= (l.attach_ring == r && l.attach_column == c);
      if (!center) id[r][c] = add(torso_point(t, r, c), t.label);
    }
  }
  for (int r = 0; r + 1 < R; ++r) {
    for (int c = 0; c < S; ++c) {
      bool hole = false;
      for (const auto& l : spec.limbs) hole |= in_hole(l, r, c, S);
      if (hole) continue;
      const int a = id[r][c], b = id[r][(c + 1) % S], cc = id[r + 1][(c + 1) % S], d = id[r + 1][c];
      faces.push_back({a, d, cc});
      faces.push_back({a, cc, b});
    }
  }
  const int bottom = add({0, -0.5 * t.height - 0.5 * t.radius_z, 0}, t.label);
  for (int c = 0; c < S; ++c) faces.push_back({bottom, id[0][c], id[0][(c + 1) % S]});

  // Neck and head.
  {
    const Mat3 rot = rotation_deg(joint("head").root);
    const Vec3 pivot(0, 0.5 * t.height, 0);
    auto place = [&](const Vec3& p) -> Vec3 { return pivot + rot * (p - pivot); };
    const HeadSpec& h = spec.head;
    std::vector<int> prev(id[R - 1].begin(), id[R - 1].end());
    std::vector<int> ring(static_cast<std::size_t>(S));
    const double neck_y = 0.5 * t.height + h.neck_length;
    for (int c = 0; c < S; ++c) {
      const double phi = 2.0 * std::numbers::pi * c / S;
      ring[c] = add(place({h.neck_radius * t.radius_x * std::cos(phi), neck_y, h.neck_radius * t.radius_z * std::sin(phi)}),
                    h.label);
    }
    quad_strip(prev, ring);
    prev = ring;
    const double cy = neck_y + h.radius;
    for (int i = 1; i <= h.rings; ++i) {
      const double theta = std::numbers::pi * i / (h.rings + 1);
      for (int c = 0; c < S; ++c) {
        const double phi = 2.0 * std::numbers::pi * c / S;
        const double rr = h.radius * std::sin(theta);
        ring[c] = add(place({rr * std::cos(phi), cy - h.radius * std::cos(theta), rr * std::sin(phi)}), h.label);
      }
      quad_strip(prev, ring);
      prev = ring;
    }
    const int top = add(place({0, cy + h.radius, 0}), h.label);
    for (int c = 0; c < S; ++c) faces.push_back({top, prev[(c + 1) % S], prev[c]});
  }

  // Limbs.
  for (const auto& l : spec.limbs) {
    const Vec3 p0 = torso_point(t, l.attach_ring, l.attach_column);
    const double phi = 2.0 * std::numbers::pi * l.attach_column / S;
    const Vec3 n = Vec3(std::cos(phi) / t.radius_x, 0, std::sin(phi) / t.radius_z).normalized();
    const Vec3 e1h = Vec3(-t.radius_x * std::sin(phi), 0, t.radius_z * std::cos(phi)).normalized();
    const Vec3 e2h = Vec3::UnitY();
    const Vec3 a = l.direction.normalized();
    const Mat3 q = Eigen::Quaterniond::FromTwoVectors(n, a).toRotationMatrix();
    const Vec3 e1 = q * e1h, e2 = q * e2h;

    const JointPose jp = joint(l.name);
    const Mat3 root = rotation_deg(jp.root), mid = rotation_deg(jp.mid);
    const int mid_ring = (l.rings + 1) / 2;
    const double step = (l.length - l.radius_root) / (l.rings - 1);
    auto center = [&](int k) -> Vec3 { return p0 + a * (l.radius_root + step * (k - 1)); };
    auto place = [&](Vec3 p, int k) {
      if (k > mid_ring) p = center(mid_ring) + mid * (p - center(mid_ring));
      return Vec3(p0 + root * (p - p0));
    };

    std::vector<int> prev;
    for (const auto& [dc, dr] : kHoleRing) prev.push_back(id[l.attach_ring + dr][wrap(l.attach_column + dc, S)]);
    std::vector<int> ring(8);
    for (int k = 1; k <= l.rings; ++k) {
      const double radius = l.radius_root + (l.radius_tip - l.radius_root) * (k - 1) / (l.rings - 1);
      for (int j = 0; j < 8; ++j) {
        const double th = std::numbers::pi * j / 4.0;
        ring[j] = add(place(center(k) + radius * (std::cos(th) * e1 + std::sin(th) * e2), k), l.label);
      }
      quad_strip(prev, ring);
      prev = ring;
    }
    const int tip = add(place(center(l.rings) + a * 0.8 * l.radius_tip, l.rings + 1), l.label);
    for (int j = 0; j < 8; ++j) faces.push_back({tip, prev[(j + 1) % 8], prev[j]});
  }

  Points v(static_cast<Index>(verts.size()), 3);
  for (std::size_t i = 0; i < verts.size(); ++i) v.row(static_cast<Index>(i)) = verts[i].transpose();
  Triangles f(static_cast<Index>(faces.size()), 3);
  for (std::size_t i = 0; i < faces.size(); ++i) f.row(static_cast<Index>(i)) << faces[i][0], faces[i][1], faces[i][2];
  TriMesh mesh(std::move(v), std::move(f));
  if (spec.resolution == 0) return {std::move(mesh), std::move(labels)};

  AugmentSpec refine;
  refine.steps.assign(static_cast<std::size_t>(spec.resolution), SubdivideStep{});
  AugmentedMesh fine = augment(mesh, labels, refine);
  return {std::move(fine.mesh), std::move(fine.anchors.labels_aug)};
}

}  // namespace geocorr
