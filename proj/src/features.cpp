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
#include "geocorr/features.hpp"

#include "geocorr/binary_io.hpp"

#include <algorithm>
#include <array>
#include <numeric>

namespace geocorr {

Eigen::MatrixXd IntrinsicFeatures::patch_features(const TriMesh& mesh, const PatchSet& patches) const {
  const Index n = mesh.num_vertices();
  const int N = patches.num_patches();
  if (patches.num_vertices() != n) data_error("patches do not belong to this mesh");
  for (const auto& m : patches.members) {
    if (static_cast<int>(m.size()) != patch_size_) data_error("patch size does not match the feature provider");
  }
  const double L = mesh.length_scale();
  const double A = mesh.total_area();
  const Eigen::VectorXd& area = mesh.vertex_area();
  const Eigen::VectorXd& curv = mesh.curvature();

  Eigen::MatrixXd X(N, dim());
  std::vector<int> order(static_cast<std::size_t>(n));
  std::vector<double> cum(static_cast<std::size_t>(n));
  for (int g = 0; g < N; ++g) {
    const Eigen::VectorXd d = patches.center_rows.row(g).transpose();
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return std::make_pair(d[a], a) < std::make_pair(d[b], b); });

    // Area-weighted quantiles, interpolated along the cumulative area.
    int col = 0;
    cum[0] = area[order[0]];
    for (std::size_t r = 1; r < order.size(); ++r) cum[r] = cum[r - 1] + area[order[r]];
    std::size_t k = 0;
    for (int q = 0; q < quantiles_; ++q) {
      const double target = (q + 0.5) / quantiles_ * A;
      while (k + 1 < order.size() && cum[k] < target) ++k;
      double value = d[order[k]];
      if (k > 0 && cum[k] > cum[k - 1]) {
        const double t = std::clamp((target - cum[k - 1]) / (cum[k] - cum[k - 1]), 0.0, 1.0);
        value = d[order[k - 1]] + t * (d[order[k]] - d[order[k - 1]]);
      }
      X(g, col++) = value / L;
    }
    double mean = 0.0;
    for (Index v = 0; v < n; ++v) mean += area[v] * d[v];
    X(g, col++) = mean / A / L;
    X(g, col++) = d.maxCoeff() / L;

    const auto& members = patches.members[static_cast<std::size_t>(g)];
    const double radius = d[members.back()];
    double patch_area = 0.0;
    for (int m : members) patch_area += area[m];
    for (int m : members) X(g, col++) = radius > 0.0 ? d[m] / radius : 0.0;
    for (int m : members) X(g, col++) = patch_area > 0.0 ? area[m] / patch_area * patch_size_ : 0.0;
    for (int m : members) X(g, col++) = std::log1p(curv[m] * L);
  }
  return X;
}

Eigen::MatrixXd FramedFeatures::patch_features(const TriMesh& mesh, const PatchSet& patches) const {
  if (patches.num_vertices() != mesh.num_vertices()) data_error("patches do not belong to this mesh");
  const int N = patches.num_patches();
  const Triangles& F = mesh.faces();
  const PrincipalFrame frame = principal_frame(mesh);
  const double L = mesh.length_scale();
  const double A = mesh.total_area();

  // Centroids of the 4 sub-triangles of the 2x2 split, in barycentrics.
  constexpr std::array<std::array<double, 3>, 4> kSamples{{{{2.0 / 3, 1.0 / 6, 1.0 / 6}},
                                                           {{1.0 / 6, 2.0 / 3, 1.0 / 6}},
                                                           {{1.0 / 6, 1.0 / 6, 2.0 / 3}},
                                                           {{1.0 / 3, 1.0 / 3, 1.0 / 3}}}};
  std::vector<double> sample_area(static_cast<std::size_t>(F.rows()));
  for (Index f = 0; f < F.rows(); ++f) {
    sample_area[f] = triangle_area(mesh.vertices().row(F(f, 0)), mesh.vertices().row(F(f, 1)),
                                   mesh.vertices().row(F(f, 2))) / kSamples.size();
  }

  Eigen::MatrixXd X(N, dim());
  std::vector<std::pair<double, double>> samples(static_cast<std::size_t>(F.rows()) * kSamples.size());
  for (int g = 0; g < N; ++g) {
    const int c = patches.centers[static_cast<std::size_t>(g)];
    X.block<1, 3>(g, 0) = ((mesh.vertices().row(c).transpose() - frame.centroid).transpose() * frame.axes) / L;

    const auto d = patches.center_rows.row(g);
    std::size_t s = 0;
    double mean = 0.0;
    for (Index f = 0; f < F.rows(); ++f) {
      for (const auto& b : kSamples) {
        const double dist = b[0] * d[F(f, 0)] + b[1] * d[F(f, 1)] + b[2] * d[F(f, 2)];
        samples[s++] = {dist, sample_area[f]};
        mean += dist * sample_area[f];
      }
    }
    std::sort(samples.begin(), samples.end());
    double cum = 0.0;
    int q = 0;
    for (std::size_t r = 0; r < samples.size() && q < quantiles_; ++r) {
      cum += samples[r].second;
      while (q < quantiles_ && cum >= (q + 0.5) / quantiles_ * A) X(g, 3 + q++) = samples[r].first;
    }
    while (q < quantiles_) X(g, 3 + q++) = samples.back().first;
    X(g, 3 + quantiles_) = mean / A;
    X(g, 4 + quantiles_) = samples.back().first;
  }
  const double unit = X.col(3 + quantiles_).mean();
  if (!(unit > 0.0)) numerical_error("framed features: zero mean distance");
  X.rightCols(quantiles_ + 2) /= unit;
  return X;
}

Eigen::MatrixXd ExternalFeatures::patch_features(const TriMesh& mesh, const PatchSet& patches) const {
  if (rows_.rows() != mesh.num_vertices()) {
    data_error("external features have " + std::to_string(rows_.rows()) + " rows for a mesh of " +
               std::to_string(mesh.num_vertices()) + " vertices");
  }
  Eigen::MatrixXd X(patches.num_patches(), rows_.cols());
  for (int g = 0; g < patches.num_patches(); ++g) {
    X.row(g) = rows_.row(patches.centers[static_cast<std::size_t>(g)]).cast<double>();
  }
  return X;
}

std::vector<unsigned char> serialize_f32_rows(std::string_view magic, const RowMatrixX<float>& rows) {
  BinaryWriter w;
  w.put_magic(magic);
  w.put<std::uint32_t>(1);
  w.put<std::uint64_t>(static_cast<std::uint64_t>(rows.rows()));
  w.put<std::uint64_t>(static_cast<std::uint64_t>(rows.cols()));
  for (Index i = 0; i < rows.size(); ++i) w.put<float>(rows.data()[i]);
  return w.bytes();
}

RowMatrixX<float> deserialize_f32_rows(std::string_view magic, std::vector<unsigned char> bytes,
                                        const std::string& origin) {
  BinaryReader r(std::move(bytes), origin);
  r.expect_magic(magic);
  if (r.get<std::uint32_t>() != 1) data_error(origin + ": unsupported version");
  const auto n = r.get<std::uint64_t>();
  const auto dim = r.get<std::uint64_t>();
  if (n > (1u << 30) || dim > (1u << 20)) data_error(origin + ": implausible shape");
  RowMatrixX<float> rows(static_cast<Index>(n), static_cast<Index>(dim));
  for (Index i = 0; i < rows.size(); ++i) rows.data()[i] = r.get<float>();
  r.expect_end();
  return rows;
}

std::vector<unsigned char> serialize_feature_rows(const RowMatrixX<float>& rows) {
  return serialize_f32_rows("GFEA", rows);
}

RowMatrixX<float> deserialize_feature_rows(std::vector<unsigned char> bytes, const std::string& origin) {
  RowMatrixX<float> rows = deserialize_f32_rows("GFEA", std::move(bytes), origin);
  if (!rows.allFinite()) data_error(origin + ": non-finite feature value");
  return rows;
}

void save_feature_rows(const std::filesystem::path& path, const RowMatrixX<float>& rows) {
  write_binary_file(path, serialize_feature_rows(rows));
}

RowMatrixX<float> load_feature_rows(const std::filesystem::path& path) {
  return deserialize_feature_rows(read_binary_file(path), path.string());
}

}  // namespace geocorr
