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

#include "geocorr/patches.hpp"

#include <filesystem>

namespace geocorr {

/// Supplies raw per-patch input rows to the trainable encoder.
class FeatureProvider {
 public:
  virtual ~FeatureProvider() = default;
  virtual int dim() const = 0;
  /// N x dim() rows, one per patch in center order.
  virtual Eigen::MatrixXd patch_features(const TriMesh& mesh, const PatchSet& patches) const = 0;
};

/// Intrinsic statistics only (distances, areas, curvature), all scale-free:
///  - area-weighted quantiles of the distance from the center to the whole
///    surface, then the area-weighted mean and the max, over sqrt(area);
///  - member distances over the patch radius, nearest first;
///  - member area fractions times patch_size;
///  - member log(1 + |H| sqrt(area)).
class IntrinsicFeatures final : public FeatureProvider {
 public:
  IntrinsicFeatures(int patch_size, int quantiles) : patch_size_(patch_size), quantiles_(quantiles) {}
  static int dim_for(int patch_size, int quantiles) { return quantiles + 2 + 3 * patch_size; }
  int dim() const override { return dim_for(patch_size_, quantiles_); }
  Eigen::MatrixXd patch_features(const TriMesh& mesh, const PatchSet& patches) const override;

 private:
  int patch_size_;
  int quantiles_;
};

/// Per patch center: its coordinates in the principal frame over sqrt(area),
/// then quantiles, mean and max of the geodesic distance to the surface,
/// integrated over faces (2x2 sub-triangle samples per face) and divided by
/// the mean of that mean over all centers. Invariant to rigid motion and
/// scale; sensitive to remeshing only through the distances.
class FramedFeatures final : public FeatureProvider {
 public:
  explicit FramedFeatures(int quantiles) : quantiles_(quantiles) {}
  static int dim_for(int quantiles) { return 3 + quantiles + 2; }
  int dim() const override { return dim_for(quantiles_); }
  Eigen::MatrixXd patch_features(const TriMesh& mesh, const PatchSet& patches) const override;

 private:
  int quantiles_;
};

/// Precomputed per-vertex features; the rows at the patch centers are used.
class ExternalFeatures final : public FeatureProvider {
 public:
  explicit ExternalFeatures(RowMatrixX<float> per_vertex) : rows_(std::move(per_vertex)) {}
  int dim() const override { return static_cast<int>(rows_.cols()); }
  Eigen::MatrixXd patch_features(const TriMesh& mesh, const PatchSet& patches) const override;
  const RowMatrixX<float>& rows() const { return rows_; }

 private:
  RowMatrixX<float> rows_;
};

/// Per-vertex feature file: "GFEA", u32 version, u64 n, u64 dim, then
/// n*dim f32 row-major.
std::vector<unsigned char> serialize_feature_rows(const RowMatrixX<float>& rows);
RowMatrixX<float> deserialize_feature_rows(std::vector<unsigned char> bytes, const std::string& origin = "<features>");
void save_feature_rows(const std::filesystem::path& path, const RowMatrixX<float>& rows);
RowMatrixX<float> load_feature_rows(const std::filesystem::path& path);

/// Shared layout of the f32 row files.
std::vector<unsigned char> serialize_f32_rows(std::string_view magic, const RowMatrixX<float>& rows);
RowMatrixX<float> deserialize_f32_rows(std::string_view magic, std::vector<unsigned char> bytes,
                                        const std::string& origin);

}  // namespace geocorr
