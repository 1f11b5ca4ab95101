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
// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include "cli.hpp"

#include "geocorr/augment.hpp"
#include "geocorr/binary_io.hpp"
#include "geocorr/matching.hpp"
#include "geocorr/mesh_io.hpp"
#include "geocorr/primitives.hpp"
#include "geocorr/synth.hpp"
#include "geocorr/training.hpp"

#include "test_support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>

using namespace geocorr;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

// ---- 1 -------------------------------------------------------------------

Outcome geodesic_oracle() {
  const auto t0 = Clock::now();
  const std::vector<TriMesh> meshes = {make_tetrahedron(1.3),      make_strip(20, 0.7, 1.1), test::random_patch(9, 9, 4),
                                       test::bumpy_sphere(1, 3),  make_icosphere(2.0, 2),   make_grid(12, 12, 0.5)};
  double worst = 0.0;
  long violations = 0;
  std::mt19937_64 rng(17);
  for (const auto& m : meshes) {
    if (m.num_vertices() > 200) return {false, "oracle mesh above 200 vertices"};
    const GeoMatrix geo = all_pairs(m);
    const Eigen::MatrixXd fw = test::floyd_warshall(m);
    worst = std::max(worst, (geo.matrix() - fw).cwiseAbs().maxCoeff());
    const double tol = 1e-12 * m.length_scale();
    const auto n = static_cast<std::uint64_t>(m.num_vertices());
    for (int t = 0; t < 10000; ++t) {
      const Index x = static_cast<Index>(rng() % n), y = static_cast<Index>(rng() % n), z = static_cast<Index>(rng() % n);
      if (geo(x, x) != 0.0 || geo(x, y) < 0.0 || geo(x, y) != geo(y, x) || (x != y && !(geo(x, y) > 0.0)) ||
          geo(x, z) > geo(x, y) + geo(y, z) + tol) {
        ++violations;
      }
    }
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-9 && violations == 0 && secs < 10.0,
          std::to_string(meshes.size()) + " meshes, max |d - FW| " + fmt("%.2e", worst) + ", axiom violations " +
              std::to_string(violations) + ", " + fmt("%.2f s", secs)};
}

// ---- shared humanoid fixture -------------------------------------------------

struct Humanoid {
  SynthSpec spec = default_humanoid();
  SynthMesh body;
  std::shared_ptr<const TriMesh> mesh;
  std::shared_ptr<DenseGeodesics> geo;

  Humanoid() : body(generate_humanoid(spec)) {
    mesh = std::make_shared<const TriMesh>(body.mesh);
    geo = std::make_shared<DenseGeodesics>(std::make_shared<const GeoMatrix>(all_pairs(*mesh)));
  }
};

struct Aug {
  AugmentedMesh am;
  std::shared_ptr<DenseGeodesics> geo;
};

std::vector<Aug> make_augs(const Humanoid& h, const std::vector<AugmentSpec>& specs) {
  std::vector<Aug> out;
  for (const auto& s : specs) {
    Aug a{augment(*h.mesh, h.body.labels, s), nullptr};
    a.geo = std::make_shared<DenseGeodesics>(std::make_shared<const GeoMatrix>(all_pairs(a.am.mesh)));
    out.push_back(std::move(a));
  }
  return out;
}

// The four training augmentations: identity topology, coarser, finer, mixed.
std::vector<AugmentSpec> training_chains(int n0) {
  return {{{RotateStep{}}, 1},
          {{DecimateStep{static_cast<int>(0.7 * n0)}, RotateStep{}}, 2},
          {{SubdivideStep{}, DecimateStep{static_cast<int>(1.6 * n0)}, RotateStep{}}, 3},
          {{DecimateStep{static_cast<int>(0.5 * n0)}, SubdivideStep{}, RotateStep{}}, 4}};
}

// ---- 2 -------------------------------------------------------------------

Outcome field_invariants(const Humanoid& h) {
  const auto t0 = Clock::now();
  if (h.mesh->num_vertices() > 2000) return {false, "template above 2000 vertices"};
  long bad_sum = 0, bad_len = 0, bad_part = 0, bad_mono = 0;
  for (bool curvature : {true, false}) {
    FieldConfig cfg;
    cfg.use_curvature = curvature;
    const GeodesicField f = build_field(*h.mesh, h.body.labels, *h.geo, cfg);
    for (Index i = 0; i < f.size(); ++i) {
      const auto& row = f.rows[static_cast<std::size_t>(i)];
      double sum = 0.0;
      for (const auto& e : row) sum += e.weight;
      if (std::abs(sum - 1.0) > 1e-6) ++bad_sum;
      if (row.size() > 50 || row.empty()) ++bad_len;
      for (const auto& e : row) {
        if (h.body.labels[e.index] != h.body.labels[static_cast<std::size_t>(i)]) ++bad_part;
      }
      if (!curvature) {
        for (const auto& a : row) {
          for (const auto& b : row) {
            if (h.geo->matrix()(i, a.index) <= h.geo->matrix()(i, b.index) && a.weight < b.weight) ++bad_mono;
          }
        }
      }
    }
  }
  const double secs = seconds_since(t0);
  return {bad_sum + bad_len + bad_part + bad_mono == 0 && secs < 30.0,
          std::to_string(h.mesh->num_vertices()) + " rows x 2 configs; violations: sum " + std::to_string(bad_sum) +
              ", length " + std::to_string(bad_len) + ", part " + std::to_string(bad_part) + ", monotone " +
              std::to_string(bad_mono) + ", " + fmt("%.2f s", secs)};
}

// ---- 3 -------------------------------------------------------------------

Outcome topology_invariant_supervision(const Humanoid& h) {
  const auto field = std::make_shared<const GeodesicField>(build_field(*h.mesh, h.body.labels, *h.geo, FieldConfig{}));
  const int n0 = static_cast<int>(h.mesh->num_vertices());
  const std::vector<AugmentSpec> specs = {{{SubdivideStep{}, RotateStep{}}, 11},
                                          {{DecimateStep{n0 / 2}, RotateStep{}}, 12},
                                          {{SubdivideStep{}, DecimateStep{3 * n0 / 2}, RotateStep{}}, 13},
                                          {{DecimateStep{2 * n0 / 3}, SubdivideStep{}}, 14},
                                          {{RotateStep{}, SubdivideStep{}, SubdivideStep{}, DecimateStep{2 * n0}}, 15}};
  std::map<int, std::vector<FieldEntry>> first_seen;
  long compared = 0, mismatched = 0;
  for (const auto& s : specs) {
    const AugmentedMesh am = augment(*h.mesh, h.body.labels, s);
    const AugmentedField af = field_for_augmented(field, am.anchors.h);
    for (Index i = 0; i < af.size(); ++i) {
      const auto row = af.row(i);
      std::vector<FieldEntry> copy(row.begin(), row.end());
      auto [it, inserted] = first_seen.try_emplace(am.anchors.h[static_cast<std::size_t>(i)], copy);
      if (!inserted) {
        ++compared;
        if (it->second != copy) ++mismatched;
      }
    }
  }
  return {mismatched == 0 && compared > 0,
          std::to_string(compared) + " same-anchor pairs across 5 augmentations, " + std::to_string(mismatched) +
              " differing rows"};
}

// ---- 4 -------------------------------------------------------------------

Labels thirds(const TriMesh& mesh) {
  Labels l;
  for (Index v = 0; v < mesh.num_vertices(); ++v) {
    const double x = mesh.vertices()(v, 0);
    l.push_back(x < -0.3 ? 0 : (x > 0.3 ? 2 : 1));
  }
  return l;
}

Outcome gradient_check() {
  const auto t0 = Clock::now();
  DescriptorConfig dcfg = test::tiny_config();
  TrainConfig tcfg;
  tcfg.sym_pairs = {{0, 2}};
  const TriMesh base = test::bumpy_sphere(1, 21);
  const Labels labels = thirds(base);
  DenseGeodesics geo(std::make_shared<const GeoMatrix>(all_pairs(base)));
  const auto feats = make_feature_provider(dcfg);
  FieldConfig fcfg;
  fcfg.k_min = 4;
  fcfg.k_base = 8;
  fcfg.k_max = 16;
  fcfg.sigma_rel = 0.1;
  TemplateData tmpl;
  tmpl.labels = labels;
  tmpl.context = prepare(base, geo, dcfg, *feats);
  tmpl.field = std::make_shared<const GeodesicField>(build_field(base, labels, geo, fcfg));
  const AugmentedMesh am = augment(base, labels, {{SubdivideStep{}, RotateStep{}}, 5});
  DenseGeodesics ageo(std::make_shared<const GeoMatrix>(all_pairs(am.mesh)));
  const Sample sample = make_sample(tmpl, prepare(am.mesh, ageo, dcfg, *feats), am.anchors, tcfg);

  DescriptorNet net(dcfg);
  const LossWeights w{0.3, 0.6, 0.3};
  const GradientResult g = gradients(net, tmpl, {&sample}, tcfg, w);
  std::vector<Eigen::MatrixXd*> params;
  net.visit([&](const std::string&, Eigen::MatrixXd& t) { params.push_back(&t); });
  std::vector<const Eigen::MatrixXd*> grads;
  g.grads.visit([&](const std::string&, const Eigen::MatrixXd& t) { grads.push_back(&t); });

  std::mt19937_64 rng(99);
  double worst = 0.0;
  const int trials = 40;
  for (int t = 0; t < trials; ++t) {
    const std::size_t k = rng() % params.size();
    Eigen::MatrixXd& p = *params[k];
    const Index idx = static_cast<Index>(rng() % static_cast<std::uint64_t>(p.size()));
    const double saved = p.data()[idx];
    p.data()[idx] = saved + 1e-4;
    const double up = evaluate_losses(net, tmpl, sample, tcfg, w).total;
    p.data()[idx] = saved - 1e-4;
    const double down = evaluate_losses(net, tmpl, sample, tcfg, w).total;
    p.data()[idx] = saved;
    const double numeric = (up - down) / 2e-4;
    const double analytic = grads[k]->data()[idx];
    const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(analytic - numeric) / scale);
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-4 && secs < 60.0,
          std::to_string(trials) + " parameters (N=8, M=8, D=16), max relative error " + fmt("%.2e", worst) + ", " +
              fmt("%.2f s", secs)};
}

// ---- 5 -------------------------------------------------------------------

Outcome loss_closed_forms() {
  const Index n = 7, m = 13;
  auto f = std::make_shared<GeodesicField>();
  for (Index v = 0; v < m; ++v) f->rows.push_back({{static_cast<std::uint32_t>(v), 0.6f}, {static_cast<std::uint32_t>((v + 1) % m), 0.4f}});
  std::vector<int> hmap;
  for (Index i = 0; i < n; ++i) hmap.push_back(static_cast<int>((3 * i) % m));
  const AugmentedField field = field_for_augmented(f, hmap);
  const double soft = soft_infonce(Eigen::MatrixXd::Constant(n, m, 0.37), field, 0.07);
  const Labels labels = {0, 1, 2, 3, 4, 0, 1};
  const double part =
      part_loss(Eigen::MatrixXd::Constant(n, 5, -1.2), Eigen::MatrixXd::Constant(n, 5, 2.5), labels, labels, 0.1);
  Eigen::Matrix2d a, mask;
  a << 0.8, 0.1, -0.3, 0.5;
  mask << 1, 0, 0, 0;
  const double sym = sym_loss(a, mask);
  const double e1 = std::abs(soft - std::log(static_cast<double>(m)));
  const double e2 = std::abs(part - std::log(5.0));
  const double e3 = std::abs(sym - 0.4);
  return {e1 <= 1e-6 && e2 <= 1e-6 && e3 <= 1e-9, "|soft - log m| " + fmt("%.1e", e1) + ", |part - log C| " +
                                                      fmt("%.1e", e2) + ", |sym - 0.4| " + fmt("%.1e", e3)};
}

// ---- 6, 7, 8 ---------------------------------------------------------------

DescriptorConfig overfit_descriptor_config() {
  DescriptorConfig d;
  d.num_patches = 128;
  d.patch_size = 16;
  d.descriptor_dim = 32;
  d.quantiles = 16;
  d.zero_init_geo_output = true;
  return d;
}

TrainConfig overfit_train_config(const SynthSpec& spec) {
  TrainConfig t;
  t.total_epochs = 50;  // 4 samples per epoch: 200 steps
  t.warmup_epochs = 5;
  t.transition_epochs = 10;
  t.lr = 2e-3;
  t.tau = 2e-4;
  t.sym_pairs = spec.sym_pairs;
  return t;
}

struct OverfitRun {
  TrainResult result;
  DescriptorNet net;
  DescriptorSet template_desc;
  double mean_error = 0.0;
  double accuracy = 0.0;
  double masked_similarity = 0.0;
  double flip_rate = 0.0;
  double soft_start = 0.0, soft_end = 0.0;
  double seconds = 0.0;
};

OverfitRun overfit(const Humanoid& h, const std::vector<Aug>& augs, const DescriptorConfig& dcfg,
                   const TrainConfig& tcfg, const std::shared_ptr<const GeodesicField>& field) {
  const auto t0 = Clock::now();
  const auto feats = make_feature_provider(dcfg);
  TemplateData tmpl;
  tmpl.labels = h.body.labels;
  tmpl.context = prepare(*h.mesh, *h.geo, dcfg, *feats);
  tmpl.field = field;
  std::vector<Sample> samples;
  for (const auto& a : augs) samples.push_back(make_sample(tmpl, prepare(a.am.mesh, *a.geo, dcfg, *feats), a.am.anchors, tcfg));

  OverfitRun run;
  run.net = DescriptorNet(dcfg);
  run.result = train(run.net, tmpl, samples, tcfg);
  run.template_desc = describe(*h.mesh, *h.geo, run.net, *feats).descriptors;
  const Eigen::MatrixXd zt = run.template_desc.z.cast<double>();
  for (std::size_t k = 0; k < augs.size(); ++k) {
    const DescriptorSet d = describe(augs[k].am.mesh, *augs[k].geo, run.net, *feats).descriptors;
    const Correspondence c = retrieve(d, run.template_desc);
    const Labels transferred = label_transfer(c, h.body.labels);
    run.mean_error += mean_geodesic_error(c, augs[k].am.anchors.h, *h.mesh, *h.geo);
    run.accuracy += label_accuracy(augs[k].am.anchors.labels_aug, transferred);
    run.flip_rate += symmetric_flip_rate(augs[k].am.anchors.labels_aug, transferred, tcfg.sym_pairs);
    run.masked_similarity += masked_mean_similarity(d.z.cast<double>(), zt, samples[k].sym_mask);
  }
  const double na = static_cast<double>(augs.size());
  run.mean_error /= na;
  run.accuracy /= na;
  run.flip_rate /= na;
  run.masked_similarity /= na;

  // Moving average of L_soft over 10 steps: first window after warmup vs last.
  const auto& tr = run.result.trace;
  const std::size_t window = 10, start = static_cast<std::size_t>(tcfg.warmup_epochs) * samples.size();
  auto avg = [&](std::size_t from) {
    double s = 0.0;
    for (std::size_t k = from; k < from + window; ++k) s += tr[k].losses.soft;
    return s / static_cast<double>(window);
  };
  if (tr.size() >= start + window) {
    run.soft_start = avg(start);
    run.soft_end = avg(tr.size() - window);
  }
  run.seconds = seconds_since(t0);
  return run;
}

// ---- 9 -------------------------------------------------------------------

Outcome ablation_switches(const Humanoid& h, const std::vector<Aug>& augs,
                          const std::shared_ptr<const GeodesicField>& field) {
  DescriptorConfig base_d = overfit_descriptor_config();
  base_d.num_patches = 32;
  base_d.zero_init_geo_output = false;
  TrainConfig base_t = overfit_train_config(h.spec);
  base_t.total_epochs = 2;
  base_t.warmup_epochs = 0;
  base_t.transition_epochs = 1;

  auto trace_hash = [&](const json& dpatch, const json& tpatch) {
    json dj = to_json(base_d), tj = to_json(base_t);
    dj.merge_patch(dpatch);
    tj.merge_patch(tpatch);
    const DescriptorConfig d = descriptor_config_from_json(dj);
    const TrainConfig t = train_config_from_json(tj);
    const auto feats = make_feature_provider(d);
    TemplateData tmpl;
    tmpl.labels = h.body.labels;
    tmpl.context = prepare(*h.mesh, *h.geo, d, *feats);
    tmpl.field = field;
    std::vector<Sample> samples;
    for (const auto& a : augs) samples.push_back(make_sample(tmpl, prepare(a.am.mesh, *a.geo, d, *feats), a.am.anchors, t));
    DescriptorNet net(d);
    return cli::sha256_hex(loss_trace_csv(train(net, tmpl, samples, t).trace));
  };
  const std::string full = trace_hash(json::object(), json::object());
  const std::vector<std::pair<std::string, std::pair<json, json>>> switches = {
      {"field", {json::object(), {{"use_field", false}}}},
      {"contrastive", {json::object(), {{"use_contrastive", false}}}},
      {"geodesic grouping", {{{"geodesic_grouping", false}}, json::object()}},
      {"geodesic encoding", {{{"geodesic_encoding", false}}, json::object()}},
      {"symmetry loss", {json::object(), {{"lambda_sym", 0.0}}}}};
  std::string same;
  for (const auto& [name, patches] : switches) {
    if (trace_hash(patches.first, patches.second) == full) same += (same.empty() ? "" : ", ") + name;
  }
  return {same.empty(), same.empty() ? "5 switches, each trace hash differs from the full model's"
                                     : "unchanged trace: " + same};
}

// ---- 10 ------------------------------------------------------------------

struct CwdGuard {
  fs::path saved = fs::current_path();
  ~CwdGuard() { fs::current_path(saved); }
};

int cli(const std::vector<std::string>& args) {
  std::vector<std::string> full = {"geocorr"};
  full.insert(full.end(), args.begin(), args.end());
  return cli::run(full);
}

// The whole pipeline in the current directory, relative paths throughout.
bool run_pipeline() {
  write_text_file("gen.json", R"({"count": 1, "variants": 2})");
  write_text_file("train.json",
                  R"({"descriptor": {"num_patches": 32, "patch_size": 16}, "train": {"total_epochs": 2, "warmup_epochs": 1, "transition_epochs": 1}})");
  const std::vector<std::vector<std::string>> steps = {
      {"gen-data", "--config", "gen.json", "--out", "data", "--seed", "5"},
      {"build-field", "--mesh", "data/template.obj", "--labels", "data/template.labels", "--out", "field"},
      {"train", "--data", "data", "--field", "field/field.gfld", "--config", "train.json", "--out", "model"},
      {"describe", "--checkpoint", "model/model.gckp", "--mesh", "data/template.obj", "--mesh",
       "data/base_000_var_00.obj", "--out", "desc"},
      {"match", "--source", "desc/base_000_var_00.gdsc", "--target", "desc/template.gdsc", "--out", "match"},
      {"eval", "--pred", "match/correspondence.txt", "--gt", "data/base_000_var_00.gt", "--target-mesh",
       "data/template.obj", "--out", "eval"},
      {"analyze", "--mesh", "data/base_000_var_00.obj", "--errors", "eval/per_vertex_error_0.txt", "--descriptors",
       "desc/base_000_var_00.gdsc", "--out", "analyze"}};
  for (const auto& s : steps) {
    if (cli(s) != 0) return false;
  }
  return true;
}

// Run summaries carry timings; everything else must match byte for byte.
std::string comparable(const fs::path& p) {
  if (p.filename() != "run_summary.json") return read_text_file(p);
  json j = json::parse(read_text_file(p));
  j.erase("wall_clock_seconds");
  j.erase("retrieval_seconds");
  return j.dump();
}

template <typename T, typename Ser, typename De>
bool round_trips(const T& value, Ser ser, De de) {
  const auto bytes = ser(value);
  return ser(de(bytes)) == bytes;
}

Outcome determinism_and_serialization(const Humanoid& h, const OverfitRun& run) {
  const fs::path root = test::scratch_dir("acceptance_determinism");
  long files = 0;
  std::string differing;
  {
    CwdGuard guard;
    for (const char* name : {"a", "b"}) {
      fs::create_directories(root / name);
      fs::current_path(root / name);
      if (!run_pipeline()) return {false, std::string("pipeline failed in run ") + name};
      fs::current_path(guard.saved);
    }
  }
  for (const auto& entry : fs::recursive_directory_iterator(root / "a")) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), root / "a");
    ++files;
    if (!fs::exists(root / "b" / rel) || comparable(entry.path()) != comparable(root / "b" / rel)) {
      differing += " " + rel.string();
    }
  }

  // Binary formats.
  std::string broken;
  if (!round_trips(h.geo->matrix(), [](const GeoMatrix& g) { return g.serialize(); },
                   [](const std::vector<unsigned char>& b) { return GeoMatrix::deserialize(b); })) {
    broken += " geo";
  }
  const GeodesicField field = build_field(*h.mesh, h.body.labels, *h.geo, FieldConfig{});
  if (!round_trips(field, [](const GeodesicField& f) { return f.serialize(); },
                   [](const std::vector<unsigned char>& b) { return GeodesicField::deserialize(b); })) {
    broken += " field";
  }
  if (!round_trips(run.template_desc, [](const DescriptorSet& d) { return d.serialize(); },
                   [](const std::vector<unsigned char>& b) { return DescriptorSet::deserialize(b); })) {
    broken += " descriptors";
  }
  const auto extra = run.result.optimizer.to_tensors(run.net);
  if (!round_trips(run.net, [&](const DescriptorNet& n) { return serialize_checkpoint(n, extra); },
                   [](const std::vector<unsigned char>& b) { return deserialize_checkpoint(b).net; })) {
    broken += " checkpoint";
  }
  const RowMatrixX<float> rows = run.template_desc.z.leftCols(5);
  if (!round_trips(rows, serialize_feature_rows,
                   [](const std::vector<unsigned char>& b) { return deserialize_feature_rows(b); })) {
    broken += " features";
  }
  const Correspondence corr = retrieve(run.template_desc, run.template_desc);
  const fs::path cpath = root / "corr.txt";
  save_correspondence(corr, cpath);
  if (format_correspondence(load_correspondence(cpath)) != read_text_file(cpath)) broken += " correspondence";

  const bool ok = differing.empty() && broken.empty() && files > 0;
  return {ok, std::to_string(files) + " pipeline files compared across two runs" +
                  (differing.empty() ? "" : ", differing:" + differing) +
                  (broken.empty() ? "; geo, field, descriptor, checkpoint, feature and correspondence files round-trip"
                                  : "; not round-tripping:" + broken)};
}

// ---- 11 ------------------------------------------------------------------

Outcome retrieval_efficiency(const OverfitRun& run) {
  SynthSpec spec = default_humanoid();
  spec.resolution = 1;
  const SynthMesh fine = generate_humanoid(spec);
  const auto tmesh = std::make_shared<const TriMesh>(fine.mesh);
  const AugmentedMesh src = augment(fine.mesh, fine.labels, {{SubdivideStep{}, DecimateStep{2000}, RotateStep{}}, 31});
  const AugmentedMesh tgt = augment(fine.mesh, fine.labels, {{DecimateStep{2000}, RotateStep{}}, 32});
  const fs::path dir = test::scratch_dir("acceptance_match");
  const auto feats = make_feature_provider(run.net.config());
  for (const auto* m : {&src, &tgt}) {
    DenseGeodesics geo(std::make_shared<const GeoMatrix>(all_pairs(m->mesh)));
    describe(m->mesh, geo, run.net, *feats).descriptors.save(dir / (m == &src ? "src.gdsc" : "tgt.gdsc"));
  }
  const int rc = cli({"match", "--source", (dir / "src.gdsc").string(), "--target", (dir / "tgt.gdsc").string(),
                      "--out", (dir / "out").string()});
  if (rc != 0) return {false, "match exited with " + std::to_string(rc)};
  const json summary = json::parse(read_text_file(dir / "out" / "run_summary.json"));
  const double secs = summary.at("retrieval_seconds").get<double>();
  const double wall = summary.at("wall_clock_seconds").get<double>();
  return {secs < 1.0 && src.mesh.num_vertices() >= 1900 && tgt.mesh.num_vertices() >= 1900,
          std::to_string(src.mesh.num_vertices()) + " x " + std::to_string(tgt.mesh.num_vertices()) +
              " vertices, retrieval " + fmt("%.3f s", secs) + " (command " + fmt("%.3f s", wall) + ")"};
}

}  // namespace

int main() {
  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<Outcome()>& check) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << id << " " << name << ": " << o.detail << std::endl;
  };

  report(1, "geodesic oracle", geodesic_oracle);
  const Humanoid h;
  report(2, "field invariants", [&] { return field_invariants(h); });
  report(3, "topology-invariant supervision", [&] { return topology_invariant_supervision(h); });
  report(4, "gradient correctness", gradient_check);
  report(5, "loss closed forms", loss_closed_forms);

  const std::vector<Aug> augs = make_augs(h, training_chains(static_cast<int>(h.mesh->num_vertices())));
  const auto field = std::make_shared<const GeodesicField>(build_field(*h.mesh, h.body.labels, *h.geo, FieldConfig{}));
  const DescriptorConfig dcfg = overfit_descriptor_config();
  const TrainConfig tcfg = overfit_train_config(h.spec);
  std::optional<OverfitRun> with_sym;
  report(6, "overfit", [&] {
    with_sym = overfit(h, augs, dcfg, tcfg, field);
    const OverfitRun& r = *with_sym;
    const double drop = r.soft_start > 0.0 ? 1.0 - r.soft_end / r.soft_start : 0.0;
    const bool ok = h.mesh->num_vertices() <= 500 && r.result.trace.size() == 200 && !r.result.diverged &&
                    drop >= 0.5 && r.mean_error < 5.0 && r.accuracy >= 0.9 && r.seconds < 600.0;
    return Outcome{ok, std::to_string(h.mesh->num_vertices()) + "-vertex template, " +
                           std::to_string(r.result.trace.size()) + " steps; soft MA " + fmt("%.3g", r.soft_start) +
                           " -> " + fmt("%.3g", r.soft_end) + " (drop " + fmt("%.0f%%", 100 * drop) + "), error " +
                           fmt("%.2f%%", r.mean_error) + ", accuracy " + fmt("%.1f%%", 100 * r.accuracy) + ", " +
                           fmt("%.1f s", r.seconds)};
  });
  report(7, "pearson", [&] {
    if (!with_sym) return Outcome{false, "no trained model"};
    const double r = pearson_local(with_sym->template_desc, *h.geo, 50);
    return Outcome{r <= -0.5, "r = " + fmt("%.3f", r) + " (K = 50, template)"};
  });
  report(8, "symmetry-loss effect", [&] {
    if (!with_sym) return Outcome{false, "no trained model"};
    TrainConfig off = tcfg;
    off.lambda_sym = 0.0;
    const OverfitRun without = overfit(h, augs, dcfg, off, field);
    const bool ok = with_sym->masked_similarity < without.masked_similarity && with_sym->flip_rate <= without.flip_rate;
    return Outcome{ok, "masked similarity " + fmt("%.3f", with_sym->masked_similarity) + " vs " +
                           fmt("%.3f", without.masked_similarity) + ", flip rate " + fmt("%.4f", with_sym->flip_rate) +
                           " vs " + fmt("%.4f", without.flip_rate) + " (lambda_sym 0.3 vs 0)"};
  });
  report(9, "ablation switches", [&] { return ablation_switches(h, augs, field); });
  report(10, "determinism and serialization", [&] {
    if (!with_sym) return Outcome{false, "no trained model"};
    return determinism_and_serialization(h, *with_sym);
  });
  report(11, "retrieval efficiency", [&] {
    if (!with_sym) return Outcome{false, "no trained model"};
    return retrieval_efficiency(*with_sym);
  });
  return failures == 0 ? 0 : 1;
}
