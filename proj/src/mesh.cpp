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
#include "geocorr/mesh.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include <algorithm>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <tuple>

namespace geocorr {

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
  return 0.5 * (b - a).cross(c - a).norm();
}

Eigen::VectorXd vertex_areas(const Points& vertices, const Triangles& faces) {
  Eigen::VectorXd area = Eigen::VectorXd::Zero(vertices.rows());
  for (Index f = 0; f < faces.rows(); ++f) {
    const int i = faces(f, 0), j = faces(f, 1), k = faces(f, 2);
    const double third =
        triangle_area(vertices.row(i).transpose(), vertices.row(j).transpose(), vertices.row(k).transpose()) /
        3.0;
    area[i] += third;
    area[j] += third;
    area[k] += third;
  }
  return area;
}

Eigen::VectorXd mixed_voronoi_areas(const Points& vertices, const Triangles& faces) {
  Eigen::VectorXd area = Eigen::VectorXd::Zero(vertices.rows());
  for (Index f = 0; f < faces.rows(); ++f) {
    const int idx[3] = {faces(f, 0), faces(f, 1), faces(f, 2)};
    const double full = triangle_area(vertices.row(idx[0]).transpose(), vertices.row(idx[1]).transpose(),
                                      vertices.row(idx[2]).transpose());
    if (full <= 0.0) continue;
    double cot[3];
    bool obtuse_at[3];
    for (int c = 0; c < 3; ++c) {
      const Vec3 a = vertices.row(idx[(c + 1) % 3]) - vertices.row(idx[c]);
      const Vec3 b = vertices.row(idx[(c + 2) % 3]) - vertices.row(idx[c]);
      cot[c] = a.dot(b) / a.cross(b).norm();
      obtuse_at[c] = a.dot(b) < 0.0;
    }
    const bool obtuse = obtuse_at[0] || obtuse_at[1] || obtuse_at[2];
    for (int c = 0; c < 3; ++c) {
      if (obtuse) {
        area[idx[c]] += obtuse_at[c] ? full / 2.0 : full / 4.0;
        continue;
      }
      // Voronoi share: edges to the other two corners, weighted by the
      // cotangent of the opposite angle.
      const int j = (c + 1) % 3, k = (c + 2) % 3;
      const double ej = (vertices.row(idx[j]) - vertices.row(idx[c])).squaredNorm();
      const double ek = (vertices.row(idx[k]) - vertices.row(idx[c])).squaredNorm();
      area[idx[c]] += (ej * cot[k] + ek * cot[j]) / 8.0;
    }
  }
  return area;
}

EdgeList face_edges(const Triangles& faces) {
  std::vector<std::pair<int, int>> e;
  e.reserve(static_cast<std::size_t>(faces.rows()) * 3);
  for (Index f = 0; f < faces.rows(); ++f) {
    for (int c = 0; c < 3; ++c) {
      int a = faces(f, c), b = faces(f, (c + 1) % 3);
      if (a > b) std::swap(a, b);
      e.emplace_back(a, b);
    }
  }
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  EdgeList out(static_cast<Index>(e.size()), 2);
  for (std::size_t r = 0; r < e.size(); ++r) {
    out(static_cast<Index>(r), 0) = e[r].first;
    out(static_cast<Index>(r), 1) = e[r].second;
  }
  return out;
}

int count_components(Index num_vertices, const Triangles& faces) {
  std::vector<int> parent(static_cast<std::size_t>(num_vertices));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  int components = static_cast<int>(num_vertices);
  for (Index f = 0; f < faces.rows(); ++f) {
    for (int c = 0; c < 3; ++c) {
      const int a = find(faces(f, c)), b = find(faces(f, (c + 1) % 3));
      if (a != b) {
        parent[std::max(a, b)] = std::min(a, b);
        --components;
      }
    }
  }
  return components;
}

namespace {

// Edge -> incident face count, keyed by the sorted edge list.
std::vector<int> edge_face_counts(const EdgeList& edges, const Triangles& faces) {
  std::vector<int> count(static_cast<std::size_t>(edges.rows()), 0);
  auto lookup = [&](int a, int b) {
    if (a > b) std::swap(a, b);
    Index lo = 0, hi = edges.rows();
    while (lo < hi) {
      const Index mid = (lo + hi) / 2;
      if (std::make_pair(edges(mid, 0), edges(mid, 1)) < std::make_pair(a, b)) {
        lo = mid + 1;
      } else {
        hi = mid;
      }
    }
    return lo;
  };
  for (Index f = 0; f < faces.rows(); ++f) {
    for (int c = 0; c < 3; ++c) ++count[static_cast<std::size_t>(lookup(faces(f, c), faces(f, (c + 1) % 3)))];
  }
  return count;
}

}  // namespace

CurvatureEstimate mean_curvature_magnitude(const Points& vertices, const Triangles& faces,
                                           const Eigen::VectorXd& areas) {
  const Index n = vertices.rows();
  Points lap = Points::Zero(n, 3);
  Eigen::VectorXd mixed = mixed_voronoi_areas(vertices, faces);
  for (Index f = 0; f < faces.rows(); ++f) {
    for (int c = 0; c < 3; ++c) {
      const int k = faces(f, c), i = faces(f, (c + 1) % 3), j = faces(f, (c + 2) % 3);
      const Vec3 a = vertices.row(i) - vertices.row(k);
      const Vec3 b = vertices.row(j) - vertices.row(k);
      const double cross = a.cross(b).norm();
      if (cross <= std::numeric_limits<double>::min()) continue;
      const double cot = a.dot(b) / cross;
      const Eigen::RowVector3d d = vertices.row(i) - vertices.row(j);
      lap.row(i) += cot * d;
      lap.row(j) -= cot * d;
    }
  }

  const EdgeList edges = face_edges(faces);
  const std::vector<int> counts = edge_face_counts(edges, faces);
  std::vector<char> boundary(static_cast<std::size_t>(n), 0);
  std::vector<char> referenced(static_cast<std::size_t>(n), 0);
  for (Index f = 0; f < faces.rows(); ++f) {
    for (int c = 0; c < 3; ++c) referenced[faces(f, c)] = 1;
  }
  for (Index e = 0; e < edges.rows(); ++e) {
    if (counts[static_cast<std::size_t>(e)] == 1) boundary[edges(e, 0)] = boundary[edges(e, 1)] = 1;
  }

  CurvatureEstimate out;
  out.magnitude = Eigen::VectorXd::Zero(n);
  for (Index v = 0; v < n; ++v) {
    if (!referenced[v]) continue;
    if (areas[v] <= 0.0 || mixed[v] <= 0.0) {
      ++out.zero_area_warnings;
      continue;
    }
    out.magnitude[v] = lap.row(v).norm() / (4.0 * mixed[v]);
  }

  // Boundary vertices: multi-source Dijkstra from the interior, carrying the
  // source value. Ties resolve to the lower source index.
  bool any_boundary = std::any_of(boundary.begin(), boundary.end(), [](char b) { return b != 0; });
  if (!any_boundary) return out;

  std::vector<std::vector<std::pair<int, double>>> adj(static_cast<std::size_t>(n));
  for (Index e = 0; e < edges.rows(); ++e) {
    const int a = edges(e, 0), b = edges(e, 1);
    const double len = (vertices.row(a) - vertices.row(b)).norm();
    adj[a].emplace_back(b, len);
    adj[b].emplace_back(a, len);
  }
  using Item = std::tuple<double, int, int>;  // distance, source, vertex
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  std::vector<double> dist(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
  std::vector<int> source(static_cast<std::size_t>(n), -1);
  for (Index v = 0; v < n; ++v) {
    if (referenced[v] && !boundary[v]) {
      dist[v] = 0.0;
      source[v] = static_cast<int>(v);
      pq.emplace(0.0, static_cast<int>(v), static_cast<int>(v));
    }
  }
  while (!pq.empty()) {
    auto [d, s, v] = pq.top();
    pq.pop();
    if (d > dist[v] || (d == dist[v] && s != source[v])) continue;
    for (auto [w, len] : adj[v]) {
      const double nd = d + len;
      if (nd < dist[w] || (nd == dist[w] && s < source[w])) {
        dist[w] = nd;
        source[w] = s;
        pq.emplace(nd, s, w);
      }
    }
  }
  for (Index v = 0; v < n; ++v) {
    if (boundary[v] && source[v] >= 0) out.magnitude[v] = out.magnitude[source[v]];
  }
  return out;
}

TriMesh::TriMesh(Points vertices, Triangles faces) : vertices_(std::move(vertices)), faces_(std::move(faces)) {
  const Index n = vertices_.rows();
  if (n == 0 || faces_.rows() == 0) data_error("empty mesh");
  if (!vertices_.allFinite()) data_error("non-finite vertex coordinate");
  for (Index f = 0; f < faces_.rows(); ++f) {
    const int a = faces_(f, 0), b = faces_(f, 1), c = faces_(f, 2);
    if (a < 0 || b < 0 || c < 0 || a >= n || b >= n || c >= n) {
      data_error("face " + std::to_string(f) + " has an out-of-range vertex index");
    }
    if (a == b || b == c || a == c) data_error("face " + std::to_string(f) + " is degenerate");
  }

  edges_ = face_edges(faces_);
  edge_lengths_.resize(edges_.rows());
  std::vector<int> degree(static_cast<std::size_t>(n), 0);
  for (Index e = 0; e < edges_.rows(); ++e) {
    edge_lengths_[e] = (vertices_.row(edges_(e, 0)) - vertices_.row(edges_(e, 1))).norm();
    ++degree[edges_(e, 0)];
    ++degree[edges_(e, 1)];
  }
  adj_start_.assign(static_cast<std::size_t>(n) + 1, 0);
  for (Index v = 0; v < n; ++v) adj_start_[v + 1] = adj_start_[v] + degree[v];
  adj_.resize(static_cast<std::size_t>(adj_start_[n]));
  adj_len_.resize(adj_.size());
  std::vector<int> fill(adj_start_.begin(), adj_start_.end() - 1);
  for (Index e = 0; e < edges_.rows(); ++e) {
    const int a = edges_(e, 0), b = edges_(e, 1);
    adj_[fill[a]] = b;
    adj_len_[fill[a]++] = edge_lengths_[e];
    adj_[fill[b]] = a;
    adj_len_[fill[b]++] = edge_lengths_[e];
  }

  vertex_area_ = vertex_areas(vertices_, faces_);
  total_area_ = 0.0;
  for (Index f = 0; f < faces_.rows(); ++f) {
    total_area_ += triangle_area(vertices_.row(faces_(f, 0)).transpose(), vertices_.row(faces_(f, 1)).transpose(),
                                 vertices_.row(faces_(f, 2)).transpose());
  }
  auto curv = mean_curvature_magnitude(vertices_, faces_, vertex_area_);
  curvature_ = std::move(curv.magnitude);
  curvature_warnings_ = curv.zero_area_warnings;
  component_count_ = count_components(n, faces_);
}

TriMesh TriMesh::transformed(const Mat3& rotation, const Vec3& translation) const {
  Points moved = (vertices_ * rotation.transpose()).rowwise() + translation.transpose();
  return TriMesh(std::move(moved), faces_);
}

TriMesh TriMesh::scaled(double factor) const { return TriMesh(vertices_ * factor, faces_); }

PrincipalFrame principal_frame(const TriMesh& mesh) {
  const Points& V = mesh.vertices();
  const Triangles& F = mesh.faces();
  const double A = mesh.total_area();
  if (!(A > 0.0)) data_error("principal frame of a zero-area mesh");
  auto corner = [&](Index f, int k) -> Vec3 { return V.row(F(f, k)).transpose(); };

  std::vector<double> fa(static_cast<std::size_t>(F.rows()));
  Vec3 mu = Vec3::Zero();
  for (Index f = 0; f < F.rows(); ++f) {
    fa[f] = triangle_area(corner(f, 0), corner(f, 1), corner(f, 2));
    mu += fa[f] * (corner(f, 0) + corner(f, 1) + corner(f, 2)) / 3.0;
  }
  mu /= A;

  // Over a triangle, the integral of x x^T is area/12 (sum of v v^T + s s^T), s = a + b + c.
  Mat3 C = Mat3::Zero();
  for (Index f = 0; f < F.rows(); ++f) {
    const Vec3 a = corner(f, 0) - mu, b = corner(f, 1) - mu, c = corner(f, 2) - mu, s = a + b + c;
    C += fa[f] / 12.0 * (a * a.transpose() + b * b.transpose() + c * c.transpose() + s * s.transpose());
  }
  C /= A;
  const Eigen::SelfAdjointEigenSolver<Mat3> es(C);
  if (es.info() != Eigen::Success) numerical_error("principal frame eigen decomposition failed");

  PrincipalFrame out;
  out.centroid = mu;
  for (int k = 0; k < 3; ++k) {
    Vec3 e = es.eigenvectors().col(2 - k);
    const double var = std::max(es.eigenvalues()[2 - k], 0.0);
    // Mean of u^3 for u linear over a triangle: complete homogeneous h3 of the corner values / 10.
    double m3 = 0.0;
    for (Index f = 0; f < F.rows(); ++f) {
      const double u0 = (corner(f, 0) - mu).dot(e), u1 = (corner(f, 1) - mu).dot(e), u2 = (corner(f, 2) - mu).dot(e);
      const double h3 = u0 * u0 * u0 + u1 * u1 * u1 + u2 * u2 * u2 + u0 * u0 * (u1 + u2) + u1 * u1 * (u0 + u2) +
                        u2 * u2 * (u0 + u1) + u0 * u1 * u2;
      m3 += fa[f] * h3 / 10.0;
    }
    m3 /= A;
    if (m3 < 0.0) {
      e = -e;
      m3 = -m3;
    }
    out.axes.col(k) = e;
    out.variance[k] = var;
    out.skewness[k] = var > 0.0 ? m3 / std::pow(var, 1.5) : 0.0;
  }
  return out;
}

}  // namespace geocorr
