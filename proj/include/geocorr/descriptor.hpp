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

#include "geocorr/features.hpp"
#include "geocorr/patches.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Core>

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace geocorr {

struct DescriptorConfig {
  int num_patches = 64;  ///< N
  int patch_size = 32;   ///< M
  UngroupParams ungroup;
  int semantic_dim = 64;    ///< D_s
  int geo_dim = 32;         ///< D_g
  int descriptor_dim = 64;  ///< D
  int num_parts = 6;        ///< C
  int encoder_width = 64;
  int taps = 3;  ///< encoder layers, each tapped for aggregation (2..4)
  int geo_hidden = 64;
  int fusion_hidden = 64;
  int quantiles = 16;
  /// Start the geodesic encoder's output layer at zero weights.
  bool zero_init_geo_output = false;
  /// Ablations: Euclidean grouping, and g_geo fixed at zero.
  bool geodesic_grouping = true;
  bool geodesic_encoding = true;
  /// "framed", "intrinsic" or "external"; external rows come from a
  /// per-vertex file.
  std::string features = "framed";
  int external_dim = 0;
  std::uint64_t seed = 0;

  void validate() const;
  int geo_input_dim() const { return num_patches * (num_patches - 1) / 2; }
  /// Width of the raw per-patch features.
  int feature_dim() const;
};

nlohmann::json to_json(const DescriptorConfig& cfg);
DescriptorConfig descriptor_config_from_json(const nlohmann::json& j);

/// Provider named by cfg.features. `external_rows` is required for
/// "external" and must be empty otherwise.
std::unique_ptr<FeatureProvider> make_feature_provider(const DescriptorConfig& cfg,
                                                       RowMatrixX<float> external_rows = {});

/// Constant per-mesh inputs of the network: patches, ungroup weights, raw
/// patch features and the geodesic vector.
struct MeshContext {
  PatchSet patches;
  UngroupMatrix ungroup;
  Eigen::MatrixXd features;  ///< N x feature_dim
  Eigen::RowVectorXd v_geo;
};

/// Groups with the configured distances (geodesic or the Euclidean fallback)
/// and evaluates the feature provider.
MeshContext prepare(const TriMesh& mesh, const DistanceProvider& geo, const DescriptorConfig& cfg,
                    const FeatureProvider& features);

/// Per-patch encoder with tapped layers, global geodesic encoder, fusion
/// and part head. Every tensor is a dense matrix; biases are 1 x out.
/// Parameters are kept representable in f32 so checkpoints are exact.
class DescriptorNet {
 public:
  DescriptorNet() = default;
  /// Glorot-uniform weights from cfg.seed, zero biases and tap logits.
  explicit DescriptorNet(const DescriptorConfig& cfg);

  const DescriptorConfig& config() const { return cfg_; }

  std::vector<Eigen::MatrixXd> encoder_w, encoder_b;
  std::vector<Eigen::MatrixXd> tap_w, tap_b;
  Eigen::MatrixXd tap_logits;  ///< 1 x taps
  Eigen::MatrixXd geo_w1, geo_b1, geo_w2, geo_b2, geo_w3, geo_b3;
  Eigen::MatrixXd fuse_w1, fuse_b1, fuse_w2, fuse_b2;
  Eigen::MatrixXd part_w, part_b;

  /// Calls f(name, tensor) for every parameter tensor in a fixed order.
  template <typename F>
  void visit(F&& f) {
    visit_tensors(*this, f);
  }
  template <typename F>
  void visit(F&& f) const {
    visit_tensors(*this, f);
  }

  /// Same shapes, all zeros.
  DescriptorNet zeros_like() const;
  Index parameter_count() const;
  bool all_finite() const;
  /// Rounds every parameter to the nearest f32.
  void round_to_storage();

  /// softmax(tap_logits).
  Eigen::RowVectorXd tap_weights() const;
  /// Forward pass of the geodesic encoder on one v_geo vector.
  Eigen::RowVectorXd encode_geodesic(const Eigen::RowVectorXd& v_geo) const;

 private:
  template <typename Self, typename F>
  static void visit_tensors(Self& self, F& f) {
    for (std::size_t l = 0; l < self.encoder_w.size(); ++l) {
      f("encoder." + std::to_string(l) + ".weight", self.encoder_w[l]);
      f("encoder." + std::to_string(l) + ".bias", self.encoder_b[l]);
    }
    for (std::size_t l = 0; l < self.tap_w.size(); ++l) {
      f("tap." + std::to_string(l) + ".weight", self.tap_w[l]);
      f("tap." + std::to_string(l) + ".bias", self.tap_b[l]);
    }
    f(std::string("tap_logits"), self.tap_logits);
    f(std::string("geo.0.weight"), self.geo_w1);
    f(std::string("geo.0.bias"), self.geo_b1);
    f(std::string("geo.1.weight"), self.geo_w2);
    f(std::string("geo.1.bias"), self.geo_b2);
    f(std::string("geo.2.weight"), self.geo_w3);
    f(std::string("geo.2.bias"), self.geo_b3);
    f(std::string("fusion.0.weight"), self.fuse_w1);
    f(std::string("fusion.0.bias"), self.fuse_b1);
    f(std::string("fusion.1.weight"), self.fuse_w2);
    f(std::string("fusion.1.bias"), self.fuse_b2);
    f(std::string("part.weight"), self.part_w);
    f(std::string("part.bias"), self.part_b);
  }

  DescriptorConfig cfg_;
};

/// Intermediates kept for the backward pass.
struct ForwardCache {
  std::vector<Eigen::MatrixXd> taps;       ///< encoder activations h_1..h_T
  std::vector<Eigen::MatrixXd> projected;  ///< H_l = h_l W + b
  Eigen::RowVectorXd alpha;
  Eigen::MatrixXd semantic;  ///< N x D_s
  Eigen::RowVectorXd g1, g2_inner, g2, g;
  Eigen::MatrixXd fused_in, fused_hidden, patch_emb;
  Eigen::MatrixXd z;  ///< ungrouped, before normalization
  Eigen::VectorXd norms;
};

struct ForwardResult {
  Eigen::MatrixXd descriptors;  ///< n x D, unit rows
  Eigen::MatrixXd logits;       ///< n x C
};

/// Throws a numerical error naming the stage if an intermediate is not finite.
ForwardResult forward(const DescriptorNet& net, const MeshContext& ctx, ForwardCache* cache = nullptr);

/// Adds d(loss)/d(params) to `grads` given the loss gradients with respect
/// to the unit descriptors and the part logits.
void backward(const DescriptorNet& net, const MeshContext& ctx, const ForwardCache& cache,
              const Eigen::MatrixXd& d_descriptors, const Eigen::MatrixXd& d_logits, DescriptorNet& grads);

/// Per-vertex unit descriptors. Stored in f32, the on-disk precision.
struct DescriptorSet {
  RowMatrixX<float> z;

  Index size() const { return z.rows(); }
  Index dim() const { return z.cols(); }

  /// Normalizes rows in double, then rounds to f32.
  static DescriptorSet from_rows(const Eigen::MatrixXd& rows);

  /// Header "GDSC", u32 version, u64 n, u64 dim; then n*dim f32 row-major.
  std::vector<unsigned char> serialize() const;
  static DescriptorSet deserialize(std::vector<unsigned char> bytes, const std::string& origin = "<descriptors>");
  void save(const std::filesystem::path& path) const;
  static DescriptorSet load(const std::filesystem::path& path);
};

/// Prepare + forward in one call.
struct Described {
  DescriptorSet descriptors;
  Eigen::MatrixXd logits;
};
Described describe(const TriMesh& mesh, const DistanceProvider& geo, const DescriptorNet& net,
                   const FeatureProvider& features);

/// Checkpoint: "GCKP", u32 version, u32 length + config JSON, u32 tensor
/// count, then per tensor u32 name length, name, u32 rank, u64 dims, f32
/// data row-major. Tensors beyond the network's own are returned as extras.
struct NamedTensor {
  std::string name;
  Eigen::MatrixXd value;
};
std::vector<unsigned char> serialize_checkpoint(const DescriptorNet& net, const std::vector<NamedTensor>& extra = {});
struct Checkpoint {
  DescriptorNet net;
  std::vector<NamedTensor> extra;
};
Checkpoint deserialize_checkpoint(std::vector<unsigned char> bytes, const std::string& origin = "<checkpoint>");
void save_checkpoint(const std::filesystem::path& path, const DescriptorNet& net,
                     const std::vector<NamedTensor>& extra = {});
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace geocorr
