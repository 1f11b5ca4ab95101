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
#include "geocorr/field.hpp"

#include "geocorr/binary_io.hpp"

#include <algorithm>
#include <cmath>

namespace geocorr {

namespace {

constexpr std::string_view kFieldMagic = "GFLD";
constexpr std::uint32_t kFieldVersion = 1;

double median(Eigen::VectorXd v) {
  const Index n = v.size();
  std::sort(v.data(), v.data() + n);
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void FieldConfig::validate(Index vertex_count) const {
  if (!(k_min > 0 && k_min <= k_base && k_base <= k_max && k_max <= vertex_count)) {
    data_error("field config needs 0 < k_min <= k_base <= k_max <= vertex count (" + std::to_string(vertex_count) + ")");
  }
  if (!(sigma_rel > 0.0)) data_error("field sigma_rel must be positive");
  if (!(rho_lo > 0.0 && rho_lo <= rho_hi)) data_error("field rho clip range must satisfy 0 < lo <= hi");
  if (!(eps > 0.0)) data_error("field eps must be positive");
}

nlohmann::json to_json(const FieldConfig& c) {
  return {{"sigma_rel", c.sigma_rel}, {"k_base", c.k_base},       {"k_min", c.k_min},
          {"k_max", c.k_max},         {"alpha", c.alpha},         {"rho_clip", {c.rho_lo, c.rho_hi}},
          {"eps", c.eps},             {"use_curvature", c.use_curvature}, {"use_part_mask", c.use_part_mask}};
}

FieldConfig field_config_from_json(const nlohmann::json& j) {
  FieldConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "sigma_rel") c.sigma_rel = value.get<double>();
      else if (key == "k_base") c.k_base = value.get<int>();
      else if (key == "k_min") c.k_min = value.get<int>();
      else if (key == "k_max") c.k_max = value.get<int>();
      else if (key == "alpha") c.alpha = value.get<double>();
      else if (key == "rho_clip") {
        c.rho_lo = value.at(0).get<double>();
        c.rho_hi = value.at(1).get<double>();
      } else if (key == "eps") c.eps = value.get<double>();
      else if (key == "use_curvature") c.use_curvature = value.get<bool>();
      else if (key == "use_part_mask") c.use_part_mask = value.get<bool>();
      else data_error("unknown field config key: " + key);
    }
  } catch (const nlohmann::json::exception& e) {
    data_error(std::string("bad field config: ") + e.what());
  }
  return c;
}

Eigen::VectorXd density(const Eigen::VectorXd& areas, double eps, std::optional<std::pair<double, double>> clip) {
  const double a_med = median(areas);
  Eigen::VectorXd rho = (areas.array() + eps).inverse() * a_med;
  if (clip) rho = rho.cwiseMax(clip->first).cwiseMin(clip->second);
  return rho;
}

std::vector<int> adaptive_k(const Eigen::VectorXd& rho, const FieldConfig& cfg) {
  std::vector<int> k(static_cast<std::size_t>(rho.size()));
  for (Index i = 0; i < rho.size(); ++i) {
    const long raw = std::lround(cfg.k_base * std::pow(rho[i], cfg.alpha));
    k[static_cast<std::size_t>(i)] = static_cast<int>(std::clamp<long>(raw, cfg.k_min, cfg.k_max));
  }
  return k;
}

std::vector<KernelEntry> base_kernel(const Eigen::VectorXd& distances, int center, int k, double sigma) {
  const Index n = distances.size();
  if (k < 1 || k > n) data_error("kernel neighborhood size out of range");
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  for (Index v = 0; v < n; ++v) {
    if (v != center) order.push_back(static_cast<int>(v));
  }
  auto closer = [&](int a, int b) { return distances[a] < distances[b] || (distances[a] == distances[b] && a < b); };
  const auto others = static_cast<std::ptrdiff_t>(k - 1);
  std::partial_sort(order.begin(), order.begin() + others, order.end(), closer);

  std::vector<KernelEntry> row;
  row.reserve(static_cast<std::size_t>(k));
  const double inv_s2 = 1.0 / (sigma * sigma);
  row.push_back({center, std::exp(-distances[center] * distances[center] * inv_s2)});
  for (std::ptrdiff_t r = 0; r < others; ++r) {
    const int v = order[static_cast<std::size_t>(r)];
    row.push_back({v, std::exp(-distances[v] * distances[v] * inv_s2)});
  }
  return row;
}

ModulatedRow modulate(const std::vector<KernelEntry>& row, const Eigen::VectorXd& curvature, const Labels& labels,
                      int center, const FieldConfig& cfg) {
  ModulatedRow out;
  for (const KernelEntry& e : row) {
    double w = e.weight;
    if (cfg.use_curvature) w *= 1.0 + std::abs(curvature[e.index]);
    if (cfg.use_part_mask && labels[static_cast<std::size_t>(e.index)] != labels[static_cast<std::size_t>(center)]) {
      w = 0.0;
    }
    if (w > 0.0) out.entries.push_back({e.index, w});
  }
  const bool only_self = out.entries.size() == 1 && out.entries.front().index == center;
  if (out.entries.empty() || (only_self && row.size() > 1)) {
    out.degenerate = true;
    out.entries = {{center, 1.0}};
  }
  return out;
}

FieldRow normalize_row(const std::vector<KernelEntry>& row) {
  double total = 0.0;
  for (const auto& e : row) total += e.weight;
  FieldRow out;
  out.reserve(row.size());
  for (const auto& e : row) out.push_back({static_cast<std::uint32_t>(e.index), static_cast<float>(e.weight / total)});
  return out;
}

GeodesicField build_field(const TriMesh& tmpl, const Labels& labels, const DistanceProvider& geo,
                          const FieldConfig& cfg) {
  const Index n = tmpl.num_vertices();
  cfg.validate(n);
  if (static_cast<Index>(labels.size()) != n) data_error("labels must cover every template vertex");
  if (geo.size() != n) data_error("geodesic provider does not match the template");

  const double sigma = cfg.sigma_rel * tmpl.length_scale();
  const Eigen::VectorXd rho = density(tmpl.vertex_area(), cfg.eps, std::make_pair(cfg.rho_lo, cfg.rho_hi));
  GeodesicField field;
  field.neighborhood = adaptive_k(rho, cfg);
  field.k_max = cfg.k_max;
  field.rows.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const int center = static_cast<int>(i);
    auto base = base_kernel(geo.row(i), center, field.neighborhood[static_cast<std::size_t>(i)], sigma);
    auto mod = modulate(base, tmpl.curvature(), labels, center, cfg);
    if (mod.degenerate) ++field.degenerate_rows;
    field.rows[static_cast<std::size_t>(i)] = normalize_row(mod.entries);
  }
  return field;
}

GeodesicField hard_anchor_field(Index vertex_count) {
  GeodesicField f;
  f.k_max = 1;
  f.rows.resize(static_cast<std::size_t>(vertex_count));
  f.neighborhood.assign(static_cast<std::size_t>(vertex_count), 1);
  for (Index i = 0; i < vertex_count; ++i) f.rows[static_cast<std::size_t>(i)] = {{static_cast<std::uint32_t>(i), 1.0f}};
  return f;
}

std::vector<unsigned char> GeodesicField::serialize() const {
  BinaryWriter w;
  w.put_magic(kFieldMagic);
  w.put<std::uint32_t>(kFieldVersion);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(rows.size()));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(k_max));
  for (const FieldRow& row : rows) {
    w.put<std::uint32_t>(static_cast<std::uint32_t>(row.size()));
    for (const FieldEntry& e : row) {
      w.put<std::uint32_t>(e.index);
      w.put<float>(e.weight);
    }
  }
  return w.bytes();
}

GeodesicField GeodesicField::deserialize(std::vector<unsigned char> bytes, const std::string& origin) {
  BinaryReader r(std::move(bytes), origin);
  r.expect_magic(kFieldMagic);
  if (r.get<std::uint32_t>() != kFieldVersion) data_error("unsupported field version in " + origin);
  GeodesicField f;
  const auto n = r.get<std::uint32_t>();
  f.k_max = static_cast<int>(r.get<std::uint32_t>());
  f.rows.resize(n);
  for (auto& row : f.rows) {
    const auto count = r.get<std::uint32_t>();
    if (count == 0 || count > static_cast<std::uint32_t>(f.k_max)) data_error("bad field row length in " + origin);
    row.resize(count);
    for (auto& e : row) {
      e.index = r.get<std::uint32_t>();
      e.weight = r.get<float>();
      if (e.index >= n) data_error("field index out of range in " + origin);
    }
  }
  r.expect_end();
  return f;
}

void GeodesicField::save(const std::filesystem::path& path) const { write_binary_file(path, serialize()); }

GeodesicField GeodesicField::load(const std::filesystem::path& path) {
  return deserialize(read_binary_file(path), path.string());
}

AugmentedField::AugmentedField(std::shared_ptr<const GeodesicField> field, std::vector<int> h)
    : field_(std::move(field)), h_(std::move(h)) {
  for (int t : h_) {
    if (t < 0 || t >= static_cast<int>(field_->rows.size())) data_error("anchor index out of range for the field");
  }
}

AugmentedField field_for_augmented(std::shared_ptr<const GeodesicField> field, std::vector<int> h) {
  return AugmentedField(std::move(field), std::move(h));
}

}  // namespace geocorr
