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

#include <nlohmann/json.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <span>

namespace geocorr {

/// Parameters of the canonical correspondence field.
struct FieldConfig {
  double sigma_rel = 0.05;  ///< kernel width as a fraction of sqrt(total area)
  int k_base = 32;
  int k_min = 8;
  int k_max = 50;
  double alpha = 0.5;
  double rho_lo = 0.25;
  double rho_hi = 4.0;
  double eps = 1e-8;
  bool use_curvature = true;
  bool use_part_mask = true;

  /// Throws unless 0 < k_min <= k_base <= k_max <= vertex_count and the
  /// positive scalars are positive.
  void validate(Index vertex_count) const;
};

nlohmann::json to_json(const FieldConfig& cfg);
FieldConfig field_config_from_json(const nlohmann::json& j);

struct FieldEntry {
  std::uint32_t index;
  float weight;
  bool operator==(const FieldEntry&) const = default;
};
using FieldRow = std::vector<FieldEntry>;

/// Sparse rows of the normalized field, one per template vertex, ordered by
/// geodesic distance from the row's center.
struct GeodesicField {
  std::vector<FieldRow> rows;
  /// Neighborhood size K_i used per row; empty for fields read from disk.
  std::vector<int> neighborhood;
  int k_max = 0;
  int degenerate_rows = 0;

  Index size() const { return static_cast<Index>(rows.size()); }

  /// Header "GFLD", u32 version, u32 vertex count, u32 k_max; then per row
  /// u32 count followed by (u32 index, f32 weight) pairs.
  std::vector<unsigned char> serialize() const;
  static GeodesicField deserialize(std::vector<unsigned char> bytes, const std::string& origin = "<field>");
  void save(const std::filesystem::path& path) const;
  static GeodesicField load(const std::filesystem::path& path);
};

/// rho_i = a_med / (A_i + eps), optionally clipped to [lo, hi].
Eigen::VectorXd density(const Eigen::VectorXd& areas, double eps,
                        std::optional<std::pair<double, double>> clip = std::nullopt);

/// K_i = clip(round(k_base * rho_i^alpha), k_min, k_max).
std::vector<int> adaptive_k(const Eigen::VectorXd& rho, const FieldConfig& cfg);

/// Unnormalized kernel entry (target vertex, weight).
struct KernelEntry {
  int index;
  double weight;
};

/// Gaussian kernel over the K nearest vertices of `center` (itself included
/// first; remaining ties by lower index).
std::vector<KernelEntry> base_kernel(const Eigen::VectorXd& distances, int center, int k, double sigma);

struct ModulatedRow {
  std::vector<KernelEntry> entries;
  /// Set when the part mask left only the center itself.
  bool degenerate = false;
};

/// Multiplies by (1 + |kappa_v|) and the same-part indicator as configured,
/// dropping zero entries.
ModulatedRow modulate(const std::vector<KernelEntry>& row, const Eigen::VectorXd& curvature, const Labels& labels,
                      int center, const FieldConfig& cfg);

/// Normalizes a modulated row to sum 1.
FieldRow normalize_row(const std::vector<KernelEntry>& row);

GeodesicField build_field(const TriMesh& tmpl, const Labels& labels, const DistanceProvider& geo,
                          const FieldConfig& cfg);

/// One-hot rows (the hard-anchor ablation).
GeodesicField hard_anchor_field(Index vertex_count);

/// Field rows seen from an augmented mesh: row(i) is the template row h(i).
/// Rows alias the canonical storage.
class AugmentedField {
 public:
  AugmentedField(std::shared_ptr<const GeodesicField> field, std::vector<int> h);
  Index size() const { return static_cast<Index>(h_.size()); }
  std::span<const FieldEntry> row(Index i) const { return field_->rows[static_cast<std::size_t>(h_[static_cast<std::size_t>(i)])]; }
  const std::vector<int>& anchors() const { return h_; }
  const GeodesicField& canonical() const { return *field_; }

 private:
  std::shared_ptr<const GeodesicField> field_;
  std::vector<int> h_;
};

AugmentedField field_for_augmented(std::shared_ptr<const GeodesicField> field, std::vector<int> h);

}  // namespace geocorr
