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
#include "cli.hpp"

#include "geocorr/augment.hpp"
#include "geocorr/binary_io.hpp"
#include "geocorr/matching.hpp"
#include "geocorr/mesh_io.hpp"
#include "geocorr/random.hpp"
#include "geocorr/synth.hpp"
#include "geocorr/training.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

namespace geocorr::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

json read_json(const fs::path& path) {
  try {
    return json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    data_error(path.string() + ": " + e.what());
  }
}

void write_json(const fs::path& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Top-level keys of a command config; anything else is rejected.
void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& what) {
  if (!j.is_object()) data_error(what + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }) == allowed.end()) {
      data_error(what + ": unknown key \"" + key + "\"");
    }
  }
}

json load_config(const std::optional<fs::path>& path) { return path ? read_json(*path) : json::object(); }

/// Run summary: command, inputs with content hashes, effective config, the
/// config hash over all of them, outputs, and wall-clock time.
class Summary {
 public:
  explicit Summary(std::string command) : command_(std::move(command)), start_(Clock::now()) {}

  void input(const std::string& key, const fs::path& path) { inputs_[key] = path; }
  void config(json c) { config_ = std::move(c); }
  void output(const fs::path& path) { outputs_.push_back(path.filename().string()); }
  json& extra() { return extra_; }

  void write(const fs::path& out_dir) const {
    std::string material = command_ + "\n" + config_.dump() + "\n";
    json inputs = json::object();
    for (const auto& [key, path] : inputs_) {
      const auto bytes = read_binary_file(path);
      const std::string digest = sha256_hex({reinterpret_cast<const char*>(bytes.data()), bytes.size()});
      material += key + " " + digest + "\n";
      inputs[key] = {{"path", path.string()}, {"sha256", digest}};
    }
    json j = {{"command", command_},
              {"inputs", inputs},
              {"config", config_},
              {"config_hash", sha256_hex(material)},
              {"outputs", outputs_},
              {"wall_clock_seconds", std::chrono::duration<double>(Clock::now() - start_).count()}};
    for (const auto& [key, value] : extra_.items()) j[key] = value;
    write_json(out_dir / "run_summary.json", j);
  }

 private:
  std::string command_;
  Clock::time_point start_;
  std::map<std::string, fs::path> inputs_;
  json config_ = json::object();
  std::vector<std::string> outputs_;
  json extra_ = json::object();
};

std::shared_ptr<const TriMesh> load_shared_mesh(const fs::path& path) {
  return std::make_shared<const TriMesh>(load_mesh(path));
}

/// External rows come from `override_path`, or from the mesh path with a
/// .gfea extension.
std::unique_ptr<FeatureProvider> features_for(const DescriptorConfig& cfg, const fs::path& mesh_path,
                                              const std::optional<fs::path>& override_path = std::nullopt) {
  if (cfg.features != "external") return make_feature_provider(cfg);
  const fs::path p = override_path ? *override_path : fs::path(mesh_path).replace_extension(".gfea");
  if (!fs::exists(p)) data_error("external features not found: " + p.string());
  return make_feature_provider(cfg, load_feature_rows(p));
}

std::vector<double> load_values(const fs::path& path) {
  std::istringstream in(read_text_file(path));
  std::vector<double> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(line, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || line.find_first_not_of(" \t\r", used) != std::string::npos) {
      data_error(path.string() + ":" + std::to_string(line_no) + ": expected one number");
    }
    out.push_back(v);
  }
  return out;
}

// Augmentation chains for the variants of each posed base, cycled by
// variant index. n0 is the base vertex count.
AugmentSpec variant_chain(int variant, int n0, std::uint64_t seed) {
  AugmentSpec a;
  a.seed = seed;
  switch (variant % 4) {
    case 0:
      a.steps = {SubdivideStep{}, DecimateStep{static_cast<int>(1.6 * n0)}, RotateStep{}};
      break;
    case 1:
      a.steps = {DecimateStep{static_cast<int>(0.7 * n0)}, RotateStep{}};
      break;
    case 2:
      a.steps = {DecimateStep{static_cast<int>(0.5 * n0)}, SubdivideStep{}, RotateStep{}};
      break;
    default:
      a.steps = {RotateStep{}};
  }
  return a;
}

struct Common {
  std::optional<fs::path> config;
  fs::path out;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Common& c, bool config = true) {
  if (config) cmd->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "output directory")->required();
  cmd->add_option("--seed", c.seed, "overrides the config seed");
}

void gen_data(const Common& c) {
  Summary summary("gen-data");
  const json cfg = load_config(c.config);
  check_keys(cfg, {"synth", "count", "variants"}, "gen-data config");
  if (c.config) summary.input("config", *c.config);
  SynthSpec spec = cfg.contains("synth") ? synth_spec_from_json(cfg["synth"]) : default_humanoid();
  if (c.seed) spec.seed = *c.seed;
  const int count = cfg.value("count", 1), variants = cfg.value("variants", 1);
  if (count < 1 || variants < 0) usage_error("gen-data: need count >= 1 and variants >= 0");
  summary.config({{"synth", to_json(spec)}, {"count", count}, {"variants", variants}});

  fs::create_directories(c.out);
  auto emit = [&](const std::string& name) {
    summary.output(name);
    return c.out / name;
  };
  json manifest = {{"seed", spec.seed}, {"synth", to_json(spec)}, {"count", count}, {"variants", variants}};

  const SynthMesh tmpl = generate_humanoid(spec);
  save_obj(tmpl.mesh, emit("template.obj"));
  save_labels(tmpl.labels, emit("template.labels"));
  manifest["template"] = {{"mesh", "template.obj"}, {"labels", "template.labels"}};

  manifest["bases"] = json::array();
  manifest["variant_meshes"] = json::array();
  for (int b = 0; b < count; ++b) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "base_%03d", b);
    const std::uint64_t pose_seed = derive_seed(spec.seed, static_cast<std::uint64_t>(b));
    const Pose pose = random_pose(spec, pose_seed);
    const SynthMesh base = generate_humanoid(spec, &pose);
    save_obj(base.mesh, emit(std::string(stem) + ".obj"));
    save_labels(base.labels, emit(std::string(stem) + ".labels"));
    manifest["bases"].push_back({{"mesh", std::string(stem) + ".obj"},
                                 {"labels", std::string(stem) + ".labels"},
                                 {"pose_seed", pose_seed}});

    for (int v = 0; v < variants; ++v) {
      char vstem[48];
      std::snprintf(vstem, sizeof vstem, "%s_var_%02d", stem, v);
      const AugmentSpec chain = variant_chain(v, static_cast<int>(base.mesh.num_vertices()),
                                              derive_seed(pose_seed, static_cast<std::uint64_t>(v) + 1));
      // Posed bases share the template's vertex order, so h indexes the template.
      const AugmentedMesh am = augment(base.mesh, base.labels, chain);
      const std::string s(vstem);
      save_obj(am.mesh, emit(s + ".obj"));
      save_labels(am.anchors.labels_aug, emit(s + ".labels"));
      write_json(emit(s + ".anchors.json"), to_json(am.anchors));
      save_labels(am.anchors.h, emit(s + ".gt"));
      manifest["variant_meshes"].push_back({{"base", b},
                                            {"mesh", s + ".obj"},
                                            {"labels", s + ".labels"},
                                            {"anchors", s + ".anchors.json"},
                                            {"gt", s + ".gt"},
                                            {"augment", to_json(chain)}});
    }
  }
  write_json(emit("manifest.json"), manifest);
  summary.write(c.out);
}

void build_field_cmd(const Common& c, const fs::path& mesh_path, const fs::path& labels_path) {
  Summary summary("build-field");
  summary.input("mesh", mesh_path);
  summary.input("labels", labels_path);
  if (c.config) summary.input("config", *c.config);
  const FieldConfig cfg = field_config_from_json(load_config(c.config));
  summary.config(to_json(cfg));

  const auto mesh = load_shared_mesh(mesh_path);
  const Labels labels = load_labels(labels_path);
  const auto geo = make_geodesic_provider(mesh);
  const GeodesicField field = build_field(*mesh, labels, *geo, cfg);
  fs::create_directories(c.out);
  field.save(c.out / "field.gfld");
  summary.output("field.gfld");
  summary.extra()["rows"] = field.size();
  summary.extra()["degenerate_rows"] = field.degenerate_rows;
  summary.write(c.out);
}

void train_cmd(const Common& c, const fs::path& data_dir, const fs::path& field_path) {
  Summary summary("train");
  const json cfg = load_config(c.config);
  check_keys(cfg, {"descriptor", "train"}, "train config");
  if (c.config) summary.input("config", *c.config);
  DescriptorConfig dcfg = descriptor_config_from_json(cfg.value("descriptor", json::object()));
  TrainConfig tcfg = train_config_from_json(cfg.value("train", json::object()));
  if (c.seed) dcfg.seed = tcfg.seed = *c.seed;

  const json manifest = read_json(data_dir / "manifest.json");
  summary.input("manifest", data_dir / "manifest.json");
  const bool pairs_given = cfg.contains("train") && cfg["train"].contains("sym_pairs");
  if (!pairs_given) tcfg.sym_pairs = synth_spec_from_json(manifest.at("synth")).sym_pairs;
  summary.config({{"descriptor", to_json(dcfg)}, {"train", to_json(tcfg)}});

  const fs::path tmesh_path = data_dir / manifest.at("template").at("mesh").get<std::string>();
  const fs::path tlabels_path = data_dir / manifest.at("template").at("labels").get<std::string>();
  summary.input("template.mesh", tmesh_path);
  summary.input("template.labels", tlabels_path);
  summary.input("field", field_path);

  const auto tmesh = load_shared_mesh(tmesh_path);
  const auto tgeo = make_geodesic_provider(tmesh);
  TemplateData tmpl;
  tmpl.labels = load_labels(tlabels_path);
  tmpl.context = prepare(*tmesh, *tgeo, dcfg, *features_for(dcfg, tmesh_path));
  tmpl.field = std::make_shared<const GeodesicField>(GeodesicField::load(field_path));
  if (tmpl.field->size() != tmesh->num_vertices()) data_error("field rows do not match the template vertices");

  std::vector<Sample> samples;
  int k = 0;
  for (const auto& entry : manifest.at("variant_meshes")) {
    const fs::path mesh_path = data_dir / entry.at("mesh").get<std::string>();
    const fs::path anchors_path = data_dir / entry.at("anchors").get<std::string>();
    summary.input("variant." + std::to_string(k) + ".mesh", mesh_path);
    summary.input("variant." + std::to_string(k) + ".anchors", anchors_path);
    ++k;
    const auto mesh = load_shared_mesh(mesh_path);
    const auto geo = make_geodesic_provider(mesh);
    const AnchorMap anchors = anchor_map_from_json(read_json(anchors_path));
    samples.push_back(make_sample(tmpl, prepare(*mesh, *geo, dcfg, *features_for(dcfg, mesh_path)), anchors, tcfg));
  }
  if (samples.empty()) data_error("train: the dataset has no variant meshes");

  DescriptorNet net(dcfg);
  const TrainResult result = train(net, tmpl, samples, tcfg);
  fs::create_directories(c.out);
  write_text_file(c.out / "loss_trace.csv", loss_trace_csv(result.trace));
  summary.output("loss_trace.csv");
  if (result.diverged) {
    summary.extra()["diverged"] = result.message;
    summary.write(c.out);
    numerical_error("training diverged: " + result.message);
  }
  save_checkpoint(c.out / "model.gckp", net, result.optimizer.to_tensors(net));
  summary.output("model.gckp");
  summary.extra()["steps"] = result.trace.size();
  if (!result.trace.empty()) {
    const auto& last = result.trace.back().losses;
    summary.extra()["final_losses"] = {{"soft", last.soft}, {"part", last.part}, {"sym", last.sym}, {"total", last.total}};
  }
  summary.write(c.out);
}

void describe_cmd(const Common& c, const fs::path& checkpoint, const std::vector<fs::path>& meshes,
                  const std::vector<fs::path>& features) {
  Summary summary("describe");
  summary.input("checkpoint", checkpoint);
  if (!features.empty() && features.size() != meshes.size()) usage_error("describe: one --features per --mesh");
  const Checkpoint ckpt = load_checkpoint(checkpoint);
  json cfg = to_json(ckpt.net.config());
  summary.config(cfg);
  fs::create_directories(c.out);
  for (std::size_t k = 0; k < meshes.size(); ++k) {
    summary.input("mesh." + std::to_string(k), meshes[k]);
    std::optional<fs::path> feat;
    if (!features.empty()) {
      feat = features[k];
      summary.input("features." + std::to_string(k), features[k]);
    }
    const auto mesh = load_shared_mesh(meshes[k]);
    const auto geo = make_geodesic_provider(mesh);
    const Described d = describe(*mesh, *geo, ckpt.net, *features_for(ckpt.net.config(), meshes[k], feat));
    const std::string name = meshes[k].stem().string() + ".gdsc";
    d.descriptors.save(c.out / name);
    summary.output(name);
  }
  summary.write(c.out);
}

void match_cmd(const Common& c, const fs::path& source, const fs::path& target) {
  Summary summary("match");
  summary.input("source", source);
  summary.input("target", target);
  const DescriptorSet src = DescriptorSet::load(source);
  const DescriptorSet tgt = DescriptorSet::load(target);
  const auto t0 = Clock::now();
  const Correspondence corr = retrieve(src, tgt);
  const double seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  fs::create_directories(c.out);
  save_correspondence(corr, c.out / "correspondence.txt");
  summary.output("correspondence.txt");
  summary.extra()["retrieval_seconds"] = seconds;
  summary.extra()["source_vertices"] = src.size();
  summary.extra()["target_vertices"] = tgt.size();
  summary.write(c.out);
}

void eval_cmd(const Common& c, const std::vector<fs::path>& preds, const std::vector<fs::path>& gts,
              const std::vector<fs::path>& targets, const std::optional<fs::path>& source_labels,
              const std::optional<fs::path>& target_labels) {
  Summary summary("eval");
  const json cfg = load_config(c.config);
  check_keys(cfg, {"sym_pairs"}, "eval config");
  if (c.config) summary.input("config", *c.config);
  summary.config(cfg);
  if (preds.size() != gts.size()) usage_error("eval: one --gt per --pred");
  if (targets.size() != 1 && targets.size() != preds.size()) {
    usage_error("eval: give one --target-mesh, or one per --pred");
  }
  if (source_labels.has_value() != target_labels.has_value()) {
    usage_error("eval: --source-labels and --target-labels go together");
  }
  std::vector<std::pair<int, int>> sym_pairs;
  if (cfg.contains("sym_pairs")) sym_pairs = cfg["sym_pairs"].get<std::vector<std::pair<int, int>>>();

  fs::create_directories(c.out);
  std::string csv = source_labels ? "pair,vertices,mean_error_percent,label_accuracy,flip_rate\n"
                                  : "pair,vertices,mean_error_percent\n";
  double total = 0.0;
  Index vertices = 0;
  std::shared_ptr<const TriMesh> mesh;
  std::unique_ptr<DistanceProvider> geo;
  for (std::size_t k = 0; k < preds.size(); ++k) {
    const std::string id = std::to_string(k);
    summary.input("pred." + id, preds[k]);
    summary.input("gt." + id, gts[k]);
    const fs::path& target = targets.size() == 1 ? targets[0] : targets[k];
    if (k == 0 || targets.size() > 1) {
      summary.input("target." + id, target);
      mesh = load_shared_mesh(target);
      geo = make_geodesic_provider(mesh);
    }
    const Correspondence pred = load_correspondence(preds[k]);
    const GeodesicErrors e = geodesic_errors(pred, load_indices(gts[k]), *mesh, *geo);
    std::string dump;
    for (Index i = 0; i < e.per_vertex.size(); ++i) dump += format_double(e.per_vertex[i]) + "\n";
    write_text_file(c.out / ("per_vertex_error_" + id + ".txt"), dump);
    summary.output("per_vertex_error_" + id + ".txt");

    csv += id + "," + std::to_string(pred.size()) + "," + format_double(e.mean_percent);
    if (source_labels) {
      const Labels transferred = label_transfer(pred, load_labels(*target_labels));
      const Labels truth = load_labels(*source_labels);
      csv += "," + format_double(label_accuracy(truth, transferred)) + "," +
             format_double(symmetric_flip_rate(truth, transferred, sym_pairs));
    }
    csv += "\n";
    total += e.mean_percent * static_cast<double>(pred.size());
    vertices += pred.size();
  }
  if (source_labels) {
    summary.input("source_labels", *source_labels);
    summary.input("target_labels", *target_labels);
  }
  const double mean = vertices > 0 ? total / static_cast<double>(vertices) : 0.0;
  csv += "mean," + std::to_string(vertices) + "," + format_double(mean) + (source_labels ? ",,\n" : "\n");
  write_text_file(c.out / "report.csv", csv);
  summary.output("report.csv");
  summary.extra()["mean_error_percent"] = mean;
  summary.write(c.out);
}

void analyze_cmd(const Common& c, const fs::path& mesh_path, const fs::path& errors_path,
                 const std::optional<fs::path>& descriptors) {
  Summary summary("analyze");
  json cfg = load_config(c.config);
  check_keys(cfg, {"k", "cap"}, "analyze config");
  if (c.config) summary.input("config", *c.config);
  const int k = cfg.value("k", 50);
  const double cap = cfg.value("cap", 0.3);
  if (k < 1) usage_error("analyze: k must be positive");
  if (!(cap > 0.0)) usage_error("analyze: cap must be positive");
  summary.config({{"k", k}, {"cap", cap}});
  summary.input("mesh", mesh_path);
  summary.input("errors", errors_path);

  const auto mesh = load_shared_mesh(mesh_path);
  const std::vector<double> values = load_values(errors_path);
  if (static_cast<Index>(values.size()) != mesh->num_vertices()) {
    data_error("analyze: " + std::to_string(values.size()) + " error values for " +
               std::to_string(mesh->num_vertices()) + " vertices");
  }
  fs::create_directories(c.out);
  save_ply(*mesh, c.out / "errors.ply", error_colors(Eigen::Map<const Eigen::VectorXd>(values.data(), values.size()), cap));
  summary.output("errors.ply");
  json analysis = {{"k", k}, {"cap", cap}};
  if (descriptors) {
    summary.input("descriptors", *descriptors);
    const DescriptorSet desc = DescriptorSet::load(*descriptors);
    if (desc.size() != mesh->num_vertices()) data_error("analyze: descriptors do not match the mesh");
    const auto geo = make_geodesic_provider(mesh);
    analysis["pearson"] = pearson_local(desc, *geo, k);
  }
  write_json(c.out / "analysis.json", analysis);
  summary.output("analysis.json");
  summary.extra()["analysis"] = analysis;
  summary.write(c.out);
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage:
      return 2;
    case ErrorKind::Data:
      return 3;
    case ErrorKind::Numerical:
      return 4;
  }
  return 1;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    numerical_error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 15];
  }
  return out;
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"Geodesic-field shape correspondence pipeline", "geocorr"};
  app.require_subcommand(1);

  Common c;
  fs::path mesh, labels, data, field, checkpoint, source, target, errors;
  std::vector<fs::path> meshes, features, preds, gts, targets;
  std::optional<fs::path> source_labels, target_labels, descriptors;

  auto* gen = app.add_subcommand("gen-data", "synthetic template, posed bases and augmented variants");
  add_common(gen, c);

  auto* bf = app.add_subcommand("build-field", "canonical field of a labeled template");
  add_common(bf, c);
  bf->add_option("--mesh", mesh)->required()->check(CLI::ExistingFile);
  bf->add_option("--labels", labels)->required()->check(CLI::ExistingFile);

  auto* tr = app.add_subcommand("train", "train the descriptor network on a generated dataset");
  add_common(tr, c);
  tr->add_option("--data", data, "gen-data output directory")->required()->check(CLI::ExistingDirectory);
  tr->add_option("--field", field)->required()->check(CLI::ExistingFile);

  auto* de = app.add_subcommand("describe", "per-vertex descriptors from a checkpoint");
  add_common(de, c, false);
  de->add_option("--checkpoint", checkpoint)->required()->check(CLI::ExistingFile);
  de->add_option("--mesh", meshes)->required()->check(CLI::ExistingFile);
  de->add_option("--features", features, "external feature rows, one per mesh")->check(CLI::ExistingFile);

  auto* ma = app.add_subcommand("match", "nearest-descriptor correspondence");
  add_common(ma, c, false);
  ma->add_option("--source", source)->required()->check(CLI::ExistingFile);
  ma->add_option("--target", target)->required()->check(CLI::ExistingFile);

  auto* ev = app.add_subcommand("eval", "geodesic error of predicted correspondences");
  add_common(ev, c);
  ev->add_option("--pred", preds)->required()->check(CLI::ExistingFile);
  ev->add_option("--gt", gts)->required()->check(CLI::ExistingFile);
  ev->add_option("--target-mesh", targets)->required()->check(CLI::ExistingFile);
  ev->add_option("--source-labels", source_labels)->check(CLI::ExistingFile);
  ev->add_option("--target-labels", target_labels)->check(CLI::ExistingFile);

  auto* an = app.add_subcommand("analyze", "error colors and local Pearson correlation");
  add_common(an, c);
  an->add_option("--mesh", mesh)->required()->check(CLI::ExistingFile);
  an->add_option("--errors", errors, "per-vertex error file from eval")->required()->check(CLI::ExistingFile);
  an->add_option("--descriptors", descriptors)->check(CLI::ExistingFile);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) gen_data(c);
    else if (*bf) build_field_cmd(c, mesh, labels);
    else if (*tr) train_cmd(c, data, field);
    else if (*de) describe_cmd(c, checkpoint, meshes, features);
    else if (*ma) match_cmd(c, source, target);
    else if (*ev) eval_cmd(c, preds, gts, targets, source_labels, target_labels);
    else if (*an) analyze_cmd(c, mesh, errors, descriptors);
    return 0;
  } catch (const Error& e) {
    std::cerr << "geocorr: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "geocorr: " << e.what() << "\n";
    return 3;
  } catch (const json::exception& e) {
    std::cerr << "geocorr: bad JSON value: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace geocorr::cli
