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
#include "geocorr/matching.hpp"

#include "geocorr/binary_io.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>

namespace geocorr {

GeodesicErrors geodesic_errors(const Correspondence& pred, const std::vector<int>& gt, const TriMesh& tgt_mesh,
                               const DistanceProvider& tgt_geo) {
  const Index n = pred.size();
  const Index m = tgt_mesh.num_vertices();
  if (static_cast<Index>(gt.size()) != n) {
    data_error("ground truth has " + std::to_string(gt.size()) + " entries for " + std::to_string(n) + " source vertices");
  }
  if (tgt_geo.size() != m) usage_error("distance provider does not match the target mesh");
  std::map<int, std::vector<Index>> by_gt;
  for (Index i = 0; i < n; ++i) {
    const int g = gt[static_cast<std::size_t>(i)], p = pred.map[static_cast<std::size_t>(i)];
    if (g < 0 || g >= m) data_error("ground-truth index " + std::to_string(g) + " at line " + std::to_string(i + 1) + " is out of range");
    if (p < 0 || p >= m) data_error("predicted index " + std::to_string(p) + " is out of range");
    by_gt[g].push_back(i);
  }
  GeodesicErrors out;
  out.per_vertex = Eigen::VectorXd::Zero(n);
  const double L = tgt_mesh.length_scale();
  for (const auto& [g, sources] : by_gt) {
    const Eigen::VectorXd row = tgt_geo.row(g);
    for (Index i : sources) out.per_vertex[i] = row[pred.map[static_cast<std::size_t>(i)]] / L;
  }
  out.mean_percent = n == 0 ? 0.0 : 100.0 * out.per_vertex.mean();
  return out;
}

double pearson_local(const DescriptorSet& desc, const DistanceProvider& geo, int K) {
  const Index n = desc.size();
  if (geo.size() != n) usage_error("distance provider does not match the descriptor set");
  if (K < 1 || K >= n) usage_error("K must be in [1, vertex count)");
  const RowMatrixX<double> z = desc.z.cast<double>();
  std::vector<int> order(static_cast<std::size_t>(n));
  std::vector<double> xs, ys;
  xs.reserve(static_cast<std::size_t>(n * K));
  ys.reserve(static_cast<std::size_t>(n * K));
  for (Index i = 0; i < n; ++i) {
    const Eigen::VectorXd d = geo.row(i);
    std::iota(order.begin(), order.end(), 0);
    // Self first regardless of coincident vertices, then (distance, index).
    std::partial_sort(order.begin(), order.begin() + K + 1, order.end(), [&](int a, int b) {
      const bool sa = a == i, sb = b == i;
      if (sa != sb) return sa;
      return std::make_pair(d[a], a) < std::make_pair(d[b], b);
    });
    for (int k = 1; k <= K; ++k) {
      const int j = order[static_cast<std::size_t>(k)];
      xs.push_back(z.row(i).dot(z.row(j)));
      ys.push_back(d[j]);
    }
  }
  const Eigen::Map<const Eigen::ArrayXd> x(xs.data(), static_cast<Index>(xs.size()));
  const Eigen::Map<const Eigen::ArrayXd> y(ys.data(), static_cast<Index>(ys.size()));
  const Eigen::ArrayXd dx = x - x.mean(), dy = y - y.mean();
  const double vx = dx.square().sum(), vy = dy.square().sum();
  if (!(vx > 1e-20 * x.size()) || !(vy > 1e-20 * y.size() * (1.0 + y.mean() * y.mean()))) {
    numerical_error("degenerate correlation");
  }
  return (dx * dy).sum() / std::sqrt(vx * vy);
}

Labels label_transfer(const Correspondence& corr, const Labels& tgt_labels) {
  Labels out;
  out.reserve(corr.map.size());
  for (int t : corr.map) {
    if (t < 0 || t >= static_cast<int>(tgt_labels.size())) data_error("correspondence points past the target labels");
    out.push_back(tgt_labels[static_cast<std::size_t>(t)]);
  }
  return out;
}

double symmetric_flip_rate(const Labels& src_labels, const Labels& transferred,
                           const std::vector<std::pair<int, int>>& sym_pairs) {
  if (src_labels.size() != transferred.size()) usage_error("label counts differ");
  double on_pair = 0, flipped = 0;
  for (std::size_t i = 0; i < src_labels.size(); ++i) {
    for (const auto& [a, b] : sym_pairs) {
      const int partner = src_labels[i] == a ? b : (src_labels[i] == b ? a : -1);
      if (partner < 0) continue;
      on_pair += 1;
      if (transferred[i] == partner) flipped += 1;
    }
  }
  return on_pair == 0 ? 0.0 : flipped / on_pair;
}

double label_accuracy(const Labels& truth, const Labels& predicted) {
  if (truth.size() != predicted.size()) usage_error("label counts differ");
  if (truth.empty()) return 1.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += truth[i] == predicted[i];
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

std::string format_correspondence(const Correspondence& corr) {
  std::string out;
  char line[96];
  for (std::size_t i = 0; i < corr.map.size(); ++i) {
    std::snprintf(line, sizeof line, "%zu %d %.9g\n", i, corr.map[i], corr.score[i]);
    out += line;
  }
  return out;
}

void save_correspondence(const Correspondence& corr, const std::filesystem::path& path) {
  write_text_file(path, format_correspondence(corr));
}

Correspondence load_correspondence(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  Correspondence out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    long long src = -1;
    int tgt = -1;
    double score = 0;
    std::string rest;
    if (!(fields >> src >> tgt >> score) || (fields >> rest)) {
      data_error(path.string() + ": malformed correspondence at line " + std::to_string(line_no));
    }
    if (src != static_cast<long long>(out.map.size())) {
      data_error(path.string() + ": source indices must be 0, 1, 2, ... (line " + std::to_string(line_no) + ")");
    }
    out.map.push_back(tgt);
    out.score.push_back(score);
  }
  return out;
}

Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor> error_colors(const Eigen::VectorXd& errors, double cap) {
  if (!(cap > 0.0)) usage_error("color cap must be positive");
  Eigen::Matrix<int, Eigen::Dynamic, 3, Eigen::RowMajor> c(errors.size(), 3);
  for (Index i = 0; i < errors.size(); ++i) {
    const double t = std::clamp(errors[i] / cap, 0.0, 1.0);
    c(i, 0) = static_cast<int>(std::lround(255.0 * t));
    c(i, 1) = 0;
    c(i, 2) = static_cast<int>(std::lround(255.0 * (1.0 - t)));
  }
  return c;
}

}  // namespace geocorr
