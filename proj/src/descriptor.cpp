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
#include "geocorr/descriptor.hpp"

#include "geocorr/binary_io.hpp"
#include "geocorr/random.hpp"

#include <map>

namespace geocorr {

void DescriptorConfig::validate() const {
  auto positive = [](int v, const char* what) {
    if (v < 1) usage_error(std::string("descriptor config: ") + what + " must be positive");
  };
  positive(num_patches, "num_patches");
  positive(patch_size, "patch_size");
  positive(ungroup.k, "ungroup_k");
  positive(semantic_dim, "semantic_dim");
  positive(geo_dim, "geo_dim");
  positive(descriptor_dim, "descriptor_dim");
  positive(num_parts, "num_parts");
  positive(encoder_width, "encoder_width");
  positive(geo_hidden, "geo_hidden");
  positive(fusion_hidden, "fusion_hidden");
  positive(quantiles, "quantiles");
  if (taps < 2 || taps > 4) usage_error("descriptor config: taps must be in [2, 4]");
  if (!(ungroup.p >= 0.0) || !(ungroup.eps > 0.0)) usage_error("descriptor config: need ungroup_p >= 0, ungroup_eps > 0");
  if (features == "external") {
    positive(external_dim, "external_dim");
  } else if (features != "intrinsic" && features != "framed") {
    usage_error("descriptor config: features must be \"framed\", \"intrinsic\" or \"external\"");
  }
}

int DescriptorConfig::feature_dim() const {
  if (features == "external") return external_dim;
  if (features == "framed") return FramedFeatures::dim_for(quantiles);
  return IntrinsicFeatures::dim_for(patch_size, quantiles);
}

std::unique_ptr<FeatureProvider> make_feature_provider(const DescriptorConfig& cfg, RowMatrixX<float> external_rows) {
  if (cfg.features == "external") {
    if (external_rows.cols() != cfg.external_dim) {
      data_error("external features are " + std::to_string(external_rows.cols()) + " wide, config says " +
                 std::to_string(cfg.external_dim));
    }
    return std::make_unique<ExternalFeatures>(std::move(external_rows));
  }
  if (external_rows.size() != 0) usage_error("external feature rows given but features is \"" + cfg.features + "\"");
  if (cfg.features == "framed") return std::make_unique<FramedFeatures>(cfg.quantiles);
  return std::make_unique<IntrinsicFeatures>(cfg.patch_size, cfg.quantiles);
}

nlohmann::json to_json(const DescriptorConfig& c) {
  return {{"num_patches", c.num_patches},
          {"patch_size", c.patch_size},
          {"ungroup_k", c.ungroup.k},
          {"ungroup_p", c.ungroup.p},
          {"ungroup_eps", c.ungroup.eps},
          {"semantic_dim", c.semantic_dim},
          {"geo_dim", c.geo_dim},
          {"descriptor_dim", c.descriptor_dim},
          {"num_parts", c.num_parts},
          {"encoder_width", c.encoder_width},
          {"taps", c.taps},
          {"geo_hidden", c.geo_hidden},
          {"fusion_hidden", c.fusion_hidden},
          {"quantiles", c.quantiles},
          {"zero_init_geo_output", c.zero_init_geo_output},
          {"geodesic_grouping", c.geodesic_grouping},
          {"geodesic_encoding", c.geodesic_encoding},
          {"features", c.features},
          {"external_dim", c.external_dim},
          {"seed", c.seed}};
}

DescriptorConfig descriptor_config_from_json(const nlohmann::json& j) {
  DescriptorConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "num_patches") c.num_patches = value.get<int>();
      else if (key == "patch_size") c.patch_size = value.get<int>();
      else if (key == "ungroup_k") c.ungroup.k = value.get<int>();
      else if (key == "ungroup_p") c.ungroup.p = value.get<double>();
      else if (key == "ungroup_eps") c.ungroup.eps = value.get<double>();
      else if (key == "semantic_dim") c.semantic_dim = value.get<int>();
      else if (key == "geo_dim") c.geo_dim = value.get<int>();
      else if (key == "descriptor_dim") c.descriptor_dim = value.get<int>();
      else if (key == "num_parts") c.num_parts = value.get<int>();
      else if (key == "encoder_width") c.encoder_width = value.get<int>();
      else if (key == "taps") c.taps = value.get<int>();
      else if (key == "geo_hidden") c.geo_hidden = value.get<int>();
      else if (key == "fusion_hidden") c.fusion_hidden = value.get<int>();
      else if (key == "quantiles") c.quantiles = value.get<int>();
      else if (key == "zero_init_geo_output") c.zero_init_geo_output = value.get<bool>();
      else if (key == "geodesic_grouping") c.geodesic_grouping = value.get<bool>();
      else if (key == "geodesic_encoding") c.geodesic_encoding = value.get<bool>();
      else if (key == "features") c.features = value.get<std::string>();
      else if (key == "external_dim") c.external_dim = value.get<int>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else usage_error("unknown descriptor config key: " + key);
    }
  } catch (const nlohmann::json::exception& e) {
    usage_error(std::string("bad descriptor config: ") + e.what());
  }
  c.validate();
  return c;
}

MeshContext prepare(const TriMesh& mesh, const DistanceProvider& geo, const DescriptorConfig& cfg,
                    const FeatureProvider& features) {
  cfg.validate();
  if (features.dim() != cfg.feature_dim()) {
    usage_error("feature provider width " + std::to_string(features.dim()) + " does not match the config (" +
                std::to_string(cfg.feature_dim()) + ")");
  }
  MeshContext ctx;
  if (cfg.geodesic_grouping) {
    ctx.patches = group(mesh, geo, cfg.num_patches, cfg.patch_size, cfg.ungroup.k);
  } else {
    EuclideanDistances euclid(std::shared_ptr<const TriMesh>(&mesh, [](const TriMesh*) {}));
    ctx.patches = group(mesh, euclid, cfg.num_patches, cfg.patch_size, cfg.ungroup.k);
  }
  ctx.ungroup = ungroup_matrix(ctx.patches, cfg.ungroup);
  ctx.features = features.patch_features(mesh, ctx.patches);
  ctx.v_geo = geodesic_vector(ctx.patches);
  if (!ctx.features.allFinite()) numerical_error("non-finite patch features");
  return ctx;
}

namespace {

Eigen::MatrixXd glorot(Index fan_in, Index fan_out, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Eigen::MatrixXd w(fan_in, fan_out);
  for (Index j = 0; j < fan_out; ++j) {
    for (Index i = 0; i < fan_in; ++i) w(i, j) = (2.0 * unit_uniform(rng) - 1.0) * bound;
  }
  return w;
}

Eigen::MatrixXd dense(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out = x * w;
  out.rowwise() += b.row(0);
  return out;
}

Eigen::MatrixXd tanh_grad(const Eigen::MatrixXd& upstream, const Eigen::MatrixXd& activation) {
  return (upstream.array() * (1.0 - activation.array().square())).matrix();
}

void check_stage(const Eigen::MatrixXd& m, const char* stage) {
  if (!m.allFinite()) numerical_error(std::string("non-finite values after ") + stage);
}

}  // namespace

DescriptorNet::DescriptorNet(const DescriptorConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  std::mt19937_64 rng(cfg_.seed);
  const int T = cfg_.taps;
  const int H = cfg_.encoder_width;
  for (int l = 0; l < T; ++l) {
    encoder_w.push_back(glorot(l == 0 ? cfg_.feature_dim() : H, H, rng));
    encoder_b.push_back(Eigen::MatrixXd::Zero(1, H));
  }
  for (int l = 0; l < T; ++l) {
    tap_w.push_back(glorot(H, cfg_.semantic_dim, rng));
    tap_b.push_back(Eigen::MatrixXd::Zero(1, cfg_.semantic_dim));
  }
  tap_logits = Eigen::MatrixXd::Zero(1, T);
  geo_w1 = glorot(cfg_.geo_input_dim(), cfg_.geo_hidden, rng);
  geo_b1 = Eigen::MatrixXd::Zero(1, cfg_.geo_hidden);
  geo_w2 = glorot(cfg_.geo_hidden, cfg_.geo_hidden, rng);
  geo_b2 = Eigen::MatrixXd::Zero(1, cfg_.geo_hidden);
  geo_w3 = glorot(cfg_.geo_hidden, cfg_.geo_dim, rng);
  if (cfg_.zero_init_geo_output) geo_w3.setZero();
  geo_b3 = Eigen::MatrixXd::Zero(1, cfg_.geo_dim);
  fuse_w1 = glorot(cfg_.semantic_dim + cfg_.geo_dim, cfg_.fusion_hidden, rng);
  fuse_b1 = Eigen::MatrixXd::Zero(1, cfg_.fusion_hidden);
  fuse_w2 = glorot(cfg_.fusion_hidden, cfg_.descriptor_dim, rng);
  fuse_b2 = Eigen::MatrixXd::Zero(1, cfg_.descriptor_dim);
  part_w = glorot(cfg_.descriptor_dim, cfg_.num_parts, rng);
  part_b = Eigen::MatrixXd::Zero(1, cfg_.num_parts);
  round_to_storage();
}

DescriptorNet DescriptorNet::zeros_like() const {
  DescriptorNet z = *this;
  z.visit([](const std::string&, Eigen::MatrixXd& t) { t.setZero(); });
  return z;
}

Index DescriptorNet::parameter_count() const {
  Index total = 0;
  visit([&](const std::string&, const Eigen::MatrixXd& t) { total += t.size(); });
  return total;
}

bool DescriptorNet::all_finite() const {
  bool ok = true;
  visit([&](const std::string&, const Eigen::MatrixXd& t) { ok = ok && t.allFinite(); });
  return ok;
}

void DescriptorNet::round_to_storage() {
  visit([](const std::string&, Eigen::MatrixXd& t) { t = t.cast<float>().cast<double>(); });
}

Eigen::RowVectorXd DescriptorNet::tap_weights() const {
  Eigen::RowVectorXd e = (tap_logits.row(0).array() - tap_logits.maxCoeff()).exp();
  return e / e.sum();
}

Eigen::RowVectorXd DescriptorNet::encode_geodesic(const Eigen::RowVectorXd& v_geo) const {
  if (v_geo.size() != cfg_.geo_input_dim()) {
    usage_error("geodesic vector has length " + std::to_string(v_geo.size()) + ", expected " +
                std::to_string(cfg_.geo_input_dim()));
  }
  const Eigen::MatrixXd g1 = dense(v_geo, geo_w1, geo_b1).array().tanh();
  const Eigen::MatrixXd g2 = g1 + Eigen::MatrixXd(dense(g1, geo_w2, geo_b2).array().tanh());
  return dense(g2, geo_w3, geo_b3);
}

ForwardResult forward(const DescriptorNet& net, const MeshContext& ctx, ForwardCache* cache) {
  const DescriptorConfig& cfg = net.config();
  const int N = cfg.num_patches;
  if (ctx.features.rows() != N || ctx.features.cols() != cfg.feature_dim()) {
    usage_error("patch features are " + std::to_string(ctx.features.rows()) + "x" +
                std::to_string(ctx.features.cols()) + ", network expects " + std::to_string(N) + "x" +
                std::to_string(cfg.feature_dim()));
  }
  if (ctx.ungroup.cols() != N) usage_error("ungroup matrix does not match the patch count");

  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c.taps.clear();
  c.projected.clear();

  const Eigen::MatrixXd* input = &ctx.features;
  for (int l = 0; l < cfg.taps; ++l) {
    c.taps.push_back(dense(*input, net.encoder_w[l], net.encoder_b[l]).array().tanh());
    check_stage(c.taps.back(), "patch encoder");
    c.projected.push_back(dense(c.taps.back(), net.tap_w[l], net.tap_b[l]));
    input = &c.taps.back();
  }
  c.alpha = net.tap_weights();
  c.semantic = Eigen::MatrixXd::Zero(N, cfg.semantic_dim);
  for (int l = 0; l < cfg.taps; ++l) c.semantic += c.alpha[l] * c.projected[l];
  check_stage(c.semantic, "layer aggregation");

  if (cfg.geodesic_encoding) {
    if (ctx.v_geo.size() != cfg.geo_input_dim()) usage_error("geodesic vector length does not match the network");
    c.g1 = dense(ctx.v_geo, net.geo_w1, net.geo_b1).array().tanh();
    c.g2_inner = dense(c.g1, net.geo_w2, net.geo_b2).array().tanh();
    c.g2 = c.g1 + c.g2_inner;
    c.g = dense(c.g2, net.geo_w3, net.geo_b3);
  } else {
    c.g = Eigen::RowVectorXd::Zero(cfg.geo_dim);
  }
  check_stage(c.g, "geodesic encoder");

  c.fused_in.resize(N, cfg.semantic_dim + cfg.geo_dim);
  c.fused_in.leftCols(cfg.semantic_dim) = c.semantic;
  c.fused_in.rightCols(cfg.geo_dim).rowwise() = c.g;
  c.fused_hidden = dense(c.fused_in, net.fuse_w1, net.fuse_b1).array().tanh();
  c.patch_emb = dense(c.fused_hidden, net.fuse_w2, net.fuse_b2);
  check_stage(c.patch_emb, "fusion");

  c.z = ctx.ungroup * c.patch_emb;
  check_stage(c.z, "ungrouping");
  c.norms = c.z.rowwise().norm();
  if (!(c.norms.minCoeff() > 0.0)) numerical_error("zero-length descriptor before normalization");

  ForwardResult out;
  out.descriptors = c.z.array().colwise() / c.norms.array();
  out.logits = dense(c.z, net.part_w, net.part_b);
  check_stage(out.logits, "part head");
  return out;
}

void backward(const DescriptorNet& net, const MeshContext& ctx, const ForwardCache& c,
              const Eigen::MatrixXd& d_descriptors, const Eigen::MatrixXd& d_logits, DescriptorNet& grads) {
  const DescriptorConfig& cfg = net.config();
  const Eigen::MatrixXd unit = c.z.array().colwise() / c.norms.array();

  // Through row normalization: dz = (dzhat - zhat <zhat, dzhat>) / |z|.
  const Eigen::VectorXd radial = (unit.array() * d_descriptors.array()).rowwise().sum();
  Eigen::MatrixXd dz = (d_descriptors - unit.cwiseProduct(radial.replicate(1, unit.cols())));
  dz.array().colwise() /= c.norms.array();
  dz += d_logits * net.part_w.transpose();
  grads.part_w += c.z.transpose() * d_logits;
  grads.part_b += d_logits.colwise().sum();

  const Eigen::MatrixXd d_emb = ctx.ungroup.transpose() * dz;
  grads.fuse_w2 += c.fused_hidden.transpose() * d_emb;
  grads.fuse_b2 += d_emb.colwise().sum();
  const Eigen::MatrixXd d_hidden_pre = tanh_grad(d_emb * net.fuse_w2.transpose(), c.fused_hidden);
  grads.fuse_w1 += c.fused_in.transpose() * d_hidden_pre;
  grads.fuse_b1 += d_hidden_pre.colwise().sum();
  const Eigen::MatrixXd d_in = d_hidden_pre * net.fuse_w1.transpose();
  const Eigen::MatrixXd d_sem = d_in.leftCols(cfg.semantic_dim);

  if (cfg.geodesic_encoding) {
    const Eigen::RowVectorXd d_g = d_in.rightCols(cfg.geo_dim).colwise().sum();
    grads.geo_w3 += c.g2.transpose() * d_g;
    grads.geo_b3 += d_g;
    const Eigen::RowVectorXd d_g2 = d_g * net.geo_w3.transpose();
    const Eigen::RowVectorXd d_inner = d_g2.array() * (1.0 - c.g2_inner.array().square());
    grads.geo_w2 += c.g1.transpose() * d_inner;
    grads.geo_b2 += d_inner;
    const Eigen::RowVectorXd d_g1 = d_g2 + d_inner * net.geo_w2.transpose();
    const Eigen::RowVectorXd d_pre1 = d_g1.array() * (1.0 - c.g1.array().square());
    grads.geo_w1 += ctx.v_geo.transpose() * d_pre1;
    grads.geo_b1 += d_pre1;
  }

  // Softmax over tap logits.
  Eigen::RowVectorXd d_alpha(cfg.taps);
  for (int l = 0; l < cfg.taps; ++l) d_alpha[l] = (d_sem.array() * c.projected[l].array()).sum();
  const double mixed = c.alpha.dot(d_alpha);
  std::vector<Eigen::MatrixXd> d_tap(static_cast<std::size_t>(cfg.taps));
  for (int l = 0; l < cfg.taps; ++l) {
    grads.tap_logits(0, l) += c.alpha[l] * (d_alpha[l] - mixed);
    const Eigen::MatrixXd d_proj = c.alpha[l] * d_sem;
    grads.tap_w[l] += c.taps[l].transpose() * d_proj;
    grads.tap_b[l] += d_proj.colwise().sum();
    d_tap[l] = d_proj * net.tap_w[l].transpose();
  }

  Eigen::MatrixXd carry;
  for (int l = cfg.taps - 1; l >= 0; --l) {
    Eigen::MatrixXd d_h = d_tap[l];
    if (carry.size() != 0) d_h += carry;
    const Eigen::MatrixXd d_pre = tanh_grad(d_h, c.taps[l]);
    const Eigen::MatrixXd& input = l == 0 ? ctx.features : c.taps[l - 1];
    grads.encoder_w[l] += input.transpose() * d_pre;
    grads.encoder_b[l] += d_pre.colwise().sum();
    if (l > 0) carry = d_pre * net.encoder_w[l].transpose();
  }
}

DescriptorSet DescriptorSet::from_rows(const Eigen::MatrixXd& rows) {
  const Eigen::VectorXd norms = rows.rowwise().norm();
  if (rows.rows() > 0 && !(norms.minCoeff() > 0.0)) numerical_error("zero-length descriptor");
  if (!rows.allFinite()) numerical_error("non-finite descriptor");
  DescriptorSet out;
  out.z = (rows.array().colwise() / norms.array()).cast<float>();
  return out;
}

std::vector<unsigned char> DescriptorSet::serialize() const { return serialize_f32_rows("GDSC", z); }

DescriptorSet DescriptorSet::deserialize(std::vector<unsigned char> bytes, const std::string& origin) {
  DescriptorSet out;
  out.z = deserialize_f32_rows("GDSC", std::move(bytes), origin);
  if (!out.z.allFinite()) data_error(origin + ": non-finite descriptor");
  return out;
}

void DescriptorSet::save(const std::filesystem::path& path) const { write_binary_file(path, serialize()); }

DescriptorSet DescriptorSet::load(const std::filesystem::path& path) {
  return deserialize(read_binary_file(path), path.string());
}

Described describe(const TriMesh& mesh, const DistanceProvider& geo, const DescriptorNet& net,
                   const FeatureProvider& features) {
  const MeshContext ctx = prepare(mesh, geo, net.config(), features);
  ForwardResult r = forward(net, ctx);
  return {DescriptorSet::from_rows(r.descriptors), std::move(r.logits)};
}

namespace {

void put_tensor(BinaryWriter& w, const std::string& name, const Eigen::MatrixXd& t) {
  w.put<std::uint32_t>(static_cast<std::uint32_t>(name.size()));
  w.put_bytes(name);
  w.put<std::uint32_t>(2);
  w.put<std::uint64_t>(static_cast<std::uint64_t>(t.rows()));
  w.put<std::uint64_t>(static_cast<std::uint64_t>(t.cols()));
  for (Index i = 0; i < t.rows(); ++i) {
    for (Index j = 0; j < t.cols(); ++j) w.put<float>(static_cast<float>(t(i, j)));
  }
}

}  // namespace

std::vector<unsigned char> serialize_checkpoint(const DescriptorNet& net, const std::vector<NamedTensor>& extra) {
  BinaryWriter w;
  w.put_magic("GCKP");
  w.put<std::uint32_t>(1);
  const std::string cfg = to_json(net.config()).dump();
  w.put<std::uint32_t>(static_cast<std::uint32_t>(cfg.size()));
  w.put_bytes(cfg);
  std::uint32_t count = static_cast<std::uint32_t>(extra.size());
  net.visit([&](const std::string&, const Eigen::MatrixXd&) { ++count; });
  w.put<std::uint32_t>(count);
  net.visit([&](const std::string& name, const Eigen::MatrixXd& t) { put_tensor(w, name, t); });
  for (const auto& t : extra) put_tensor(w, t.name, t.value);
  return w.bytes();
}

Checkpoint deserialize_checkpoint(std::vector<unsigned char> bytes, const std::string& origin) {
  BinaryReader r(std::move(bytes), origin);
  r.expect_magic("GCKP");
  if (r.get<std::uint32_t>() != 1) data_error(origin + ": unsupported checkpoint version");
  DescriptorConfig cfg;
  try {
    cfg = descriptor_config_from_json(nlohmann::json::parse(r.get_bytes(r.get<std::uint32_t>())));
  } catch (const nlohmann::json::exception& e) {
    data_error(origin + ": bad config block: " + e.what());
  } catch (const Error& e) {
    data_error(origin + ": " + e.what());
  }

  std::map<std::string, Eigen::MatrixXd> loaded;
  std::vector<std::string> order;
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t k = 0; k < count; ++k) {
    std::string name = r.get_bytes(r.get<std::uint32_t>());
    if (r.get<std::uint32_t>() != 2) data_error(origin + ": tensor " + name + " is not rank 2");
    const auto rows = r.get<std::uint64_t>();
    const auto cols = r.get<std::uint64_t>();
    if (rows > (1u << 28) || cols > (1u << 28) || rows * cols > (1u << 28)) {
      data_error(origin + ": tensor " + name + " has an implausible shape");
    }
    Eigen::MatrixXd t(static_cast<Index>(rows), static_cast<Index>(cols));
    for (Index i = 0; i < t.rows(); ++i) {
      for (Index j = 0; j < t.cols(); ++j) t(i, j) = r.get<float>();
    }
    if (!t.allFinite()) data_error(origin + ": tensor " + name + " has non-finite values");
    if (!loaded.emplace(name, std::move(t)).second) data_error(origin + ": duplicate tensor " + name);
    order.push_back(std::move(name));
  }
  r.expect_end();

  Checkpoint out{DescriptorNet(cfg), {}};
  std::map<std::string, bool> used;
  out.net.visit([&](const std::string& name, Eigen::MatrixXd& t) {
    auto it = loaded.find(name);
    if (it == loaded.end()) data_error(origin + ": missing tensor " + name);
    if (it->second.rows() != t.rows() || it->second.cols() != t.cols()) {
      data_error(origin + ": tensor " + name + " has the wrong shape");
    }
    t = it->second;
    used[name] = true;
  });
  for (const auto& name : order) {
    if (!used.count(name)) out.extra.push_back({name, loaded[name]});
  }
  return out;
}

void save_checkpoint(const std::filesystem::path& path, const DescriptorNet& net,
                     const std::vector<NamedTensor>& extra) {
  write_binary_file(path, serialize_checkpoint(net, extra));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  return deserialize_checkpoint(read_binary_file(path), path.string());
}

}  // namespace geocorr
