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
#include "geocorr/augment.hpp"

#include "geocorr/random.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <numbers>

namespace geocorr {

namespace {

std::uint64_t derived_seed(std::uint64_t seed, std::size_t step) {
  return seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(step) + 1;
}

}  // namespace

Mat3 random_rotation(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double u1 = unit_uniform(rng), u2 = unit_uniform(rng), u3 = unit_uniform(rng);
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  const double t2 = 2.0 * std::numbers::pi * u2, t3 = 2.0 * std::numbers::pi * u3;
  Eigen::Quaterniond q(b * std::cos(t3), a * std::sin(t2), a * std::cos(t2), b * std::sin(t3));
  return q.normalized().toRotationMatrix();
}

Subdivision midpoint_subdivide(const Points& vertices, const Triangles& faces) {
  const EdgeList edges = face_edges(faces);
  const Index n = vertices.rows();
  std::map<std::pair<int, int>, int> mid;
  Subdivision out;
  out.vertices.resize(n + edges.rows(), 3);
  out.vertices.topRows(n) = vertices;
  for (Index e = 0; e < edges.rows(); ++e) {
    const int a = edges(e, 0), b = edges(e, 1);
    const int id = static_cast<int>(n + e);
    mid[{a, b}] = id;
    out.vertices.row(id) = 0.5 * (vertices.row(a) + vertices.row(b));
    out.midpoint_parents.push_back({a, b});
  }
  auto m = [&](int a, int b) { return mid.at({std::min(a, b), std::max(a, b)}); };
  out.faces.resize(4 * faces.rows(), 3);
  for (Index f = 0; f < faces.rows(); ++f) {
    const int a = faces(f, 0), b = faces(f, 1), c = faces(f, 2);
    const int ab = m(a, b), bc = m(b, c), ca = m(c, a);
    out.faces.row(4 * f + 0) << a, ab, ca;
    out.faces.row(4 * f + 1) << ab, b, bc;
    out.faces.row(4 * f + 2) << ca, bc, c;
    out.faces.row(4 * f + 3) << ab, bc, ca;
  }
  return out;
}

namespace {

struct Clustering {
  std::vector<int> cluster_of;
  int count = 0;
};

Clustering cluster_grid(const Points& v, const Eigen::RowVector3d& origin, double cell) {
  std::map<std::array<std::int64_t, 3>, int> ids;
  Clustering c;
  c.cluster_of.resize(static_cast<std::size_t>(v.rows()));
  for (Index i = 0; i < v.rows(); ++i) {
    std::array<std::int64_t, 3> key;
    for (int d = 0; d < 3; ++d) key[d] = static_cast<std::int64_t>(std::floor((v(i, d) - origin[d]) / cell));
    auto [it, inserted] = ids.emplace(key, c.count);
    if (inserted) ++c.count;
    c.cluster_of[static_cast<std::size_t>(i)] = it->second;
  }
  return c;
}

}  // namespace

Decimation cluster_decimate(const TriMesh& mesh, int target_vertex_count) {
  if (target_vertex_count < 4) data_error("decimation target must be at least 4 vertices");
  const Points& v = mesh.vertices();
  const Index n = mesh.num_vertices();
  if (target_vertex_count >= n) {
    Decimation same{mesh, {}};
    same.representative.resize(static_cast<std::size_t>(n));
    std::iota(same.representative.begin(), same.representative.end(), 0);
    return same;
  }
  const Eigen::RowVector3d lo = v.colwise().minCoeff();
  const double diag = (v.colwise().maxCoeff() - lo).norm();
  // Smallest cell size whose cluster count fits the target.
  double small = diag * 1e-9, large = diag * 2.0;
  for (int it = 0; it < 64; ++it) {
    const double midc = 0.5 * (small + large);
    if (cluster_grid(v, lo, midc).count <= target_vertex_count) {
      large = midc;
    } else {
      small = midc;
    }
  }
  const Clustering cl = cluster_grid(v, lo, large);

  std::vector<int> rep(static_cast<std::size_t>(cl.count), -1);
  const Eigen::VectorXd& area = mesh.vertex_area();
  for (Index i = 0; i < n; ++i) {
    int& r = rep[static_cast<std::size_t>(cl.cluster_of[static_cast<std::size_t>(i)])];
    if (r < 0 || area[i] > area[r]) r = static_cast<int>(i);
  }

  std::vector<std::array<int, 3>> tris;
  std::map<std::array<int, 3>, bool> seen;
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    std::array<int, 3> t;
    for (int c = 0; c < 3; ++c) t[c] = cl.cluster_of[static_cast<std::size_t>(mesh.faces()(f, c))];
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) continue;
    std::array<int, 3> key = t;
    std::sort(key.begin(), key.end());
    if (seen.emplace(key, true).second) tris.push_back(t);
  }

  // Keep referenced clusters only, ordered by representative index.
  std::vector<char> used(static_cast<std::size_t>(cl.count), 0);
  for (const auto& t : tris) {
    for (int c : t) used[static_cast<std::size_t>(c)] = 1;
  }
  std::vector<int> kept;
  for (int c = 0; c < cl.count; ++c) {
    if (used[static_cast<std::size_t>(c)]) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end(), [&](int a, int b) { return rep[static_cast<std::size_t>(a)] < rep[static_cast<std::size_t>(b)]; });
  std::vector<int> new_id(static_cast<std::size_t>(cl.count), -1);
  Decimation out;
  Points nv(static_cast<Index>(kept.size()), 3);
  for (std::size_t k = 0; k < kept.size(); ++k) {
    new_id[static_cast<std::size_t>(kept[k])] = static_cast<int>(k);
    const int r = rep[static_cast<std::size_t>(kept[k])];
    out.representative.push_back(r);
    nv.row(static_cast<Index>(k)) = v.row(r);
  }
  Triangles nf(static_cast<Index>(tris.size()), 3);
  for (std::size_t f = 0; f < tris.size(); ++f) {
    for (int c = 0; c < 3; ++c) nf(static_cast<Index>(f), c) = new_id[static_cast<std::size_t>(tris[f][c])];
  }
  if (nf.rows() == 0) data_error("decimation removed every face");
  if (count_components(nv.rows(), nf) != 1) data_error("decimation produced a disconnected mesh");
  out.mesh = TriMesh(std::move(nv), std::move(nf));
  return out;
}

AugmentedMesh augment(const TriMesh& base, const Labels& labels_tmp, const AugmentSpec& spec) {
  if (static_cast<Index>(labels_tmp.size()) != base.num_vertices()) {
    data_error("template labels do not cover every vertex");
  }
  TriMesh current = base;
  std::vector<int> h(static_cast<std::size_t>(base.num_vertices()));
  std::iota(h.begin(), h.end(), 0);

  for (std::size_t s = 0; s < spec.steps.size(); ++s) {
    const AugmentStep& step = spec.steps[s];
    if (std::holds_alternative<SubdivideStep>(step)) {
      Subdivision sub = midpoint_subdivide(current.vertices(), current.faces());
      for (const auto& p : sub.midpoint_parents) h.push_back(h[static_cast<std::size_t>(std::min(p[0], p[1]))]);
      current = TriMesh(std::move(sub.vertices), std::move(sub.faces));
    } else if (const auto* dec = std::get_if<DecimateStep>(&step)) {
      Decimation d = cluster_decimate(current, dec->target_vertex_count);
      std::vector<int> nh;
      nh.reserve(d.representative.size());
      for (int r : d.representative) nh.push_back(h[static_cast<std::size_t>(r)]);
      h = std::move(nh);
      current = std::move(d.mesh);
    } else {
      const auto& rot = std::get<RotateStep>(step);
      const Mat3 r = random_rotation(rot.seed.value_or(derived_seed(spec.seed, s)));
      current = current.transformed(r);
    }
  }
  if (!current.is_connected()) data_error("augmentation produced a disconnected mesh");

  AugmentedMesh out{std::move(current), {}};
  out.anchors.h = std::move(h);
  out.anchors.labels_tmp = labels_tmp;
  out.anchors.labels_aug.reserve(out.anchors.h.size());
  for (int t : out.anchors.h) out.anchors.labels_aug.push_back(labels_tmp[static_cast<std::size_t>(t)]);
  out.anchors.chain = spec;
  return out;
}

bool labels_consistent(const AnchorMap& anchors) {
  if (anchors.labels_aug.size() != anchors.h.size()) return false;
  for (std::size_t i = 0; i < anchors.h.size(); ++i) {
    const int t = anchors.h[i];
    if (t < 0 || t >= static_cast<int>(anchors.labels_tmp.size())) return false;
    if (anchors.labels_aug[i] != anchors.labels_tmp[static_cast<std::size_t>(t)]) return false;
  }
  return true;
}

nlohmann::json to_json(const AugmentSpec& spec) {
  nlohmann::json steps = nlohmann::json::array();
  for (const auto& step : spec.steps) {
    if (std::holds_alternative<SubdivideStep>(step)) {
      steps.push_back({{"op", "midpoint_subdivide"}});
    } else if (const auto* d = std::get_if<DecimateStep>(&step)) {
      steps.push_back({{"op", "cluster_decimate"}, {"target_vertex_count", d->target_vertex_count}});
    } else {
      nlohmann::json r = {{"op", "rotate"}};
      if (auto seed = std::get<RotateStep>(step).seed) r["seed"] = *seed;
      steps.push_back(r);
    }
  }
  return {{"seed", spec.seed}, {"steps", steps}};
}

AugmentSpec augment_spec_from_json(const nlohmann::json& j) {
  try {
    AugmentSpec spec;
    for (const auto& [key, value] : j.items()) {
      if (key != "seed" && key != "steps") data_error("unknown augment spec key: " + key);
    }
    spec.seed = j.value("seed", std::uint64_t{0});
    for (const auto& s : j.at("steps")) {
      const std::string op = s.at("op").get<std::string>();
      if (op == "midpoint_subdivide") {
        spec.steps.emplace_back(SubdivideStep{});
      } else if (op == "cluster_decimate") {
        const int target = s.at("target_vertex_count").get<int>();
        if (target < 4) data_error("cluster_decimate target_vertex_count must be >= 4");
        spec.steps.emplace_back(DecimateStep{target});
      } else if (op == "rotate") {
        RotateStep r;
        if (s.contains("seed")) r.seed = s.at("seed").get<std::uint64_t>();
        spec.steps.emplace_back(r);
      } else {
        data_error("unknown augment op: " + op);
      }
    }
    return spec;
  } catch (const nlohmann::json::exception& e) {
    data_error(std::string("bad augment spec: ") + e.what());
  }
}

nlohmann::json to_json(const AnchorMap& anchors) {
  return {{"h", anchors.h}, {"labels_aug", anchors.labels_aug}, {"labels_tmp", anchors.labels_tmp},
          {"chain", to_json(anchors.chain)}};
}

AnchorMap anchor_map_from_json(const nlohmann::json& j) {
  try {
    AnchorMap a;
    a.h = j.at("h").get<std::vector<int>>();
    a.labels_aug = j.at("labels_aug").get<Labels>();
    a.labels_tmp = j.at("labels_tmp").get<Labels>();
    a.chain = augment_spec_from_json(j.at("chain"));
    if (!labels_consistent(a)) data_error("anchor map labels are inconsistent with h");
    return a;
  } catch (const nlohmann::json::exception& e) {
    data_error(std::string("bad anchor map: ") + e.what());
  }
}

}  // namespace geocorr
