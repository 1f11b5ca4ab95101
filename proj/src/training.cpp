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
#include "geocorr/training.hpp"

#include "geocorr/random.hpp"

#include <cstdio>
#include <numbers>
#include <numeric>

namespace geocorr {

void TrainConfig::validate() const {
  if (!(tau > 0.0)) usage_error("train config: tau must be positive");
  if (lambda_soft < 0.0 || lambda_part < 0.0 || lambda_sym < 0.0 || lambda_part_warmup < 0.0) {
    usage_error("train config: loss weights must be non-negative");
  }
  if (!(label_smoothing >= 0.0 && label_smoothing < 1.0)) usage_error("train config: label_smoothing must be in [0, 1)");
  if (warmup_epochs < 0 || transition_epochs < 0 || total_epochs < 0) usage_error("train config: negative epoch count");
  if (warmup_epochs + transition_epochs > total_epochs && total_epochs > 0) {
    usage_error("train config: warmup + transition exceeds total_epochs");
  }
  if (lr < 0.0 || weight_decay < 0.0) usage_error("train config: lr and weight_decay must be non-negative");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) usage_error("train config: betas must be in [0, 1)");
  if (!(opt_eps > 0.0)) usage_error("train config: opt_eps must be positive");
  if (soft_subsample_above < 0 || soft_subsample_size < 1) usage_error("train config: bad subsample settings");
}

nlohmann::json to_json(const TrainConfig& c) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [a, b] : c.sym_pairs) pairs.push_back({a, b});
  return {{"tau", c.tau},
          {"lambda_soft", c.lambda_soft},
          {"lambda_part", c.lambda_part},
          {"lambda_sym", c.lambda_sym},
          {"lambda_part_warmup", c.lambda_part_warmup},
          {"label_smoothing", c.label_smoothing},
          {"warmup_epochs", c.warmup_epochs},
          {"transition_epochs", c.transition_epochs},
          {"total_epochs", c.total_epochs},
          {"lr", c.lr},
          {"weight_decay", c.weight_decay},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"opt_eps", c.opt_eps},
          {"seed", c.seed},
          {"sym_pairs", pairs},
          {"use_field", c.use_field},
          {"use_contrastive", c.use_contrastive},
          {"soft_subsample_above", c.soft_subsample_above},
          {"soft_subsample_size", c.soft_subsample_size},
          {"shuffle", c.shuffle}};
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "tau") c.tau = value.get<double>();
      else if (key == "lambda_soft") c.lambda_soft = value.get<double>();
      else if (key == "lambda_part") c.lambda_part = value.get<double>();
      else if (key == "lambda_sym") c.lambda_sym = value.get<double>();
      else if (key == "lambda_part_warmup") c.lambda_part_warmup = value.get<double>();
      else if (key == "label_smoothing") c.label_smoothing = value.get<double>();
      else if (key == "warmup_epochs") c.warmup_epochs = value.get<int>();
      else if (key == "transition_epochs") c.transition_epochs = value.get<int>();
      else if (key == "total_epochs") c.total_epochs = value.get<int>();
      else if (key == "lr") c.lr = value.get<double>();
      else if (key == "weight_decay") c.weight_decay = value.get<double>();
      else if (key == "beta1") c.beta1 = value.get<double>();
      else if (key == "beta2") c.beta2 = value.get<double>();
      else if (key == "opt_eps") c.opt_eps = value.get<double>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else if (key == "sym_pairs") {
        c.sym_pairs.clear();
        for (const auto& p : value) {
          if (p.size() != 2) usage_error("train config: sym_pairs entries must be [a, b]");
          c.sym_pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
        }
      } else if (key == "use_field") c.use_field = value.get<bool>();
      else if (key == "use_contrastive") c.use_contrastive = value.get<bool>();
      else if (key == "soft_subsample_above") c.soft_subsample_above = value.get<int>();
      else if (key == "soft_subsample_size") c.soft_subsample_size = value.get<int>();
      else if (key == "shuffle") c.shuffle = value.get<bool>();
      else usage_error("unknown train config key: " + key);
    }
  } catch (const nlohmann::json::exception& e) {
    usage_error(std::string("bad train config: ") + e.what());
  }
  c.validate();
  return c;
}

LossWeights curriculum(double epoch, const TrainConfig& cfg) {
  if (!(epoch >= 0.0 && epoch < cfg.total_epochs)) {
    usage_error("curriculum epoch " + std::to_string(epoch) + " outside [0, " + std::to_string(cfg.total_epochs) + ")");
  }
  LossWeights w;
  w.sym = cfg.lambda_sym;
  const double end = cfg.warmup_epochs + cfg.transition_epochs;
  if (epoch < cfg.warmup_epochs) {
    w.part = cfg.lambda_part_warmup;
  } else if (epoch < end) {
    const double t = (epoch - cfg.warmup_epochs) / cfg.transition_epochs;
    const double s = 0.5 * (1.0 - std::cos(std::numbers::pi * t));
    w.part = cfg.lambda_part_warmup + s * (cfg.lambda_part - cfg.lambda_part_warmup);
    w.soft = s * cfg.lambda_soft;
  } else {
    w.part = cfg.lambda_part;
    w.soft = cfg.lambda_soft;
  }
  return w;
}

Eigen::MatrixXd sym_mask(const Labels& labels_aug, const Labels& labels_tmp,
                         const std::vector<std::pair<int, int>>& sym_pairs) {
  Eigen::MatrixXd mask = Eigen::MatrixXd::Zero(static_cast<Index>(labels_aug.size()),
                                               static_cast<Index>(labels_tmp.size()));
  auto symmetric = [&](int a, int b) {
    for (const auto& [p, q] : sym_pairs) {
      if ((a == p && b == q) || (a == q && b == p)) return true;
    }
    return false;
  };
  for (std::size_t v = 0; v < labels_tmp.size(); ++v) {
    for (std::size_t i = 0; i < labels_aug.size(); ++i) {
      if (symmetric(labels_aug[i], labels_tmp[v])) mask(static_cast<Index>(i), static_cast<Index>(v)) = 1.0;
    }
  }
  return mask;
}

Sample make_sample(const TemplateData& tmpl, MeshContext context, const AnchorMap& anchors, const TrainConfig& cfg) {
  const Index n = context.ungroup.rows();
  if (static_cast<Index>(anchors.h.size()) != n || static_cast<Index>(anchors.labels_aug.size()) != n) {
    data_error("anchor map does not match the augmented mesh");
  }
  auto field = cfg.use_field ? tmpl.field
                             : std::make_shared<const GeodesicField>(hard_anchor_field(tmpl.field->size()));
  Eigen::MatrixXd mask = sym_mask(anchors.labels_aug, tmpl.labels, cfg.sym_pairs);
  return {std::move(context), anchors.labels_aug, field_for_augmented(field, anchors.h), std::move(mask)};
}

namespace {

std::vector<char> column_sample(Index m, const TrainConfig& cfg, std::uint64_t step) {
  std::mt19937_64 rng(cfg.seed * 0x9E3779B97F4A7C15ULL + step + 1);
  std::vector<int> idx(static_cast<std::size_t>(m));
  std::iota(idx.begin(), idx.end(), 0);
  const std::size_t keep = std::min<std::size_t>(idx.size(), static_cast<std::size_t>(cfg.soft_subsample_size));
  for (std::size_t k = 0; k < keep; ++k) {
    const std::size_t j = k + static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(idx.size() - k));
    std::swap(idx[k], idx[j]);
  }
  std::vector<char> cols(static_cast<std::size_t>(m), 0);
  for (std::size_t k = 0; k < keep; ++k) cols[static_cast<std::size_t>(idx[k])] = 1;
  return cols;
}

bool subsampling(Index m, const TrainConfig& cfg) {
  return cfg.soft_subsample_above > 0 && m > cfg.soft_subsample_above;
}

struct PairTerms {
  LossBreakdown losses;
  Eigen::MatrixXd d_aug, d_tmp, dl_aug, dl_tmp;
};

PairTerms pair_terms(const ForwardResult& rt, const ForwardResult& ra, const TemplateData& tmpl, const Sample& s,
                     const TrainConfig& cfg, const LossWeights& w, std::uint64_t step, bool want_grads) {
  PairTerms out;
  const Eigen::MatrixXd A = ra.descriptors * rt.descriptors.transpose();
  std::vector<char> cols;
  if (subsampling(A.cols(), cfg)) cols = column_sample(A.cols(), cfg, step);
  Eigen::MatrixXd d_soft;
  const bool soft_grad = want_grads && w.soft != 0.0;
  out.losses.soft = soft_infonce(A, s.field, cfg.tau, soft_grad ? &d_soft : nullptr, cols.empty() ? nullptr : &cols);
  out.losses.part = part_loss(ra.logits, rt.logits, s.labels, tmpl.labels, cfg.label_smoothing,
                              want_grads ? &out.dl_aug : nullptr, want_grads ? &out.dl_tmp : nullptr);
  out.losses.sym = sym_loss(A, s.sym_mask);
  out.losses.total = total_loss(out.losses.soft, out.losses.part, out.losses.sym, w);
  if (!want_grads) return out;

  Eigen::MatrixXd dA = Eigen::MatrixXd::Zero(A.rows(), A.cols());
  if (soft_grad) dA += w.soft * d_soft;
  if (w.sym != 0.0) dA += (w.sym / static_cast<double>(A.rows())) * s.sym_mask;
  out.d_aug = dA * rt.descriptors;
  out.d_tmp = dA.transpose() * ra.descriptors;
  out.dl_aug *= w.part;
  out.dl_tmp *= w.part;
  return out;
}

}  // namespace

GradientResult gradients(const DescriptorNet& net, const TemplateData& tmpl, const std::vector<const Sample*>& batch,
                         const TrainConfig& cfg, const LossWeights& weights, std::uint64_t step) {
  if (batch.empty()) usage_error("empty batch");
  GradientResult out{net.zeros_like(), {}};
  const bool any = weights.soft != 0.0 || weights.part != 0.0 || weights.sym != 0.0;

  ForwardCache ct;
  const ForwardResult rt = forward(net, tmpl.context, &ct);
  for (const Sample* s : batch) {
    ForwardCache ca;
    const ForwardResult ra = forward(net, s->context, &ca);
    PairTerms t = pair_terms(rt, ra, tmpl, *s, cfg, weights, step, any);
    out.losses.soft += t.losses.soft;
    out.losses.part += t.losses.part;
    out.losses.sym += t.losses.sym;
    out.losses.total += t.losses.total;
    if (!any) continue;
    backward(net, s->context, ca, t.d_aug, t.dl_aug, out.grads);
    backward(net, tmpl.context, ct, t.d_tmp, t.dl_tmp, out.grads);
  }

  const double inv = 1.0 / static_cast<double>(batch.size());
  out.losses.soft *= inv;
  out.losses.part *= inv;
  out.losses.sym *= inv;
  out.losses.total *= inv;
  out.grads.visit([&](const std::string& name, Eigen::MatrixXd& g) {
    if (batch.size() > 1) g *= inv;
    if (!g.allFinite()) numerical_error("non-finite gradient in " + name);
  });
  return out;
}

LossBreakdown evaluate_losses(const DescriptorNet& net, const TemplateData& tmpl, const Sample& sample,
                              const TrainConfig& cfg, const LossWeights& weights, std::uint64_t step) {
  const ForwardResult rt = forward(net, tmpl.context);
  const ForwardResult ra = forward(net, sample.context);
  return pair_terms(rt, ra, tmpl, sample, cfg, weights, step, false).losses;
}

std::vector<NamedTensor> AdamState::to_tensors(const DescriptorNet& net) const {
  std::vector<std::string> names;
  net.visit([&](const std::string& name, const Eigen::MatrixXd&) { names.push_back(name); });
  std::vector<NamedTensor> out;
  if (m.size() == names.size()) {
    for (std::size_t k = 0; k < names.size(); ++k) out.push_back({"adam.m." + names[k], m[k]});
    for (std::size_t k = 0; k < names.size(); ++k) out.push_back({"adam.v." + names[k], v[k]});
  }
  out.push_back({"adam.step", Eigen::MatrixXd::Constant(1, 1, static_cast<double>(step))});
  return out;
}

AdamState AdamState::from_tensors(const DescriptorNet& net, const std::vector<NamedTensor>& tensors) {
  AdamState s;
  auto find = [&](const std::string& name) -> const Eigen::MatrixXd* {
    for (const auto& t : tensors) {
      if (t.name == name) return &t.value;
    }
    return nullptr;
  };
  if (const auto* st = find("adam.step")) s.step = static_cast<std::int64_t>((*st)(0, 0));
  bool complete = true;
  net.visit([&](const std::string& name, const Eigen::MatrixXd& p) {
    const auto* m = find("adam.m." + name);
    const auto* v = find("adam.v." + name);
    if (!m || !v || m->rows() != p.rows() || m->cols() != p.cols() || v->rows() != p.rows() || v->cols() != p.cols()) {
      complete = false;
      return;
    }
    s.m.push_back(*m);
    s.v.push_back(*v);
  });
  if (!complete) {
    s.m.clear();
    s.v.clear();
  }
  return s;
}

void adamw_step(std::vector<Eigen::MatrixXd*> params, const std::vector<const Eigen::MatrixXd*>& grads,
                AdamState& state, const TrainConfig& cfg) {
  if (params.size() != grads.size()) usage_error("adamw: parameter and gradient counts differ");
  if (state.m.empty()) {
    for (const auto* p : params) {
      state.m.push_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
      state.v.push_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
    }
  }
  if (state.m.size() != params.size() || state.v.size() != params.size()) usage_error("adamw: state size mismatch");
  for (std::size_t k = 0; k < params.size(); ++k) {
    const auto& p = *params[k];
    const auto& g = *grads[k];
    if (g.rows() != p.rows() || g.cols() != p.cols() || state.m[k].rows() != p.rows() ||
        state.m[k].cols() != p.cols() || state.v[k].rows() != p.rows() || state.v[k].cols() != p.cols()) {
      usage_error("adamw: shape mismatch at tensor " + std::to_string(k));
    }
  }

  ++state.step;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  const double decay = 1.0 - cfg.lr * cfg.weight_decay;
  for (std::size_t k = 0; k < params.size(); ++k) {
    Eigen::MatrixXd& p = *params[k];
    const Eigen::MatrixXd& g = *grads[k];
    if (cfg.weight_decay != 0.0) p *= decay;
    state.m[k] = cfg.beta1 * state.m[k] + (1.0 - cfg.beta1) * g;
    state.v[k] = cfg.beta2 * state.v[k] + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    p.array() -= cfg.lr * (state.m[k].array() / bc1) / ((state.v[k].array() / bc2).sqrt() + cfg.opt_eps);
  }
}

void adamw_step(DescriptorNet& net, const DescriptorNet& grads, AdamState& state, const TrainConfig& cfg) {
  std::vector<Eigen::MatrixXd*> params;
  std::vector<const Eigen::MatrixXd*> g;
  net.visit([&](const std::string&, Eigen::MatrixXd& t) { params.push_back(&t); });
  grads.visit([&](const std::string&, const Eigen::MatrixXd& t) { g.push_back(&t); });
  adamw_step(std::move(params), g, state, cfg);
}

TrainResult train(DescriptorNet& net, const TemplateData& tmpl, const std::vector<Sample>& samples,
                  const TrainConfig& cfg, const std::function<void(const LossRecord&)>& on_step) {
  cfg.validate();
  if (samples.empty()) usage_error("training needs at least one augmented sample");
  TrainResult out;
  const std::size_t per_epoch = samples.size();
  std::vector<std::size_t> order(per_epoch);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(cfg.seed);

  for (int epoch = 0; epoch < cfg.total_epochs; ++epoch) {
    if (cfg.shuffle) {
      for (std::size_t k = per_epoch; k > 1; --k) {
        std::swap(order[k - 1], order[static_cast<std::size_t>(unit_uniform(rng) * static_cast<double>(k))]);
      }
    }
    for (std::size_t k = 0; k < per_epoch; ++k) {
      const auto step = static_cast<std::int64_t>(static_cast<std::size_t>(epoch) * per_epoch + k);
      const double epoch_f = static_cast<double>(step) / static_cast<double>(per_epoch);
      LossWeights w = curriculum(epoch_f, cfg);
      if (!cfg.use_contrastive) w.soft = 0.0;

      GradientResult g;
      try {
        g = gradients(net, tmpl, {&samples[order[k]]}, cfg, w, static_cast<std::uint64_t>(step));
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::Numerical) throw;
        out.diverged = true;
        out.message = "step " + std::to_string(step) + ": " + e.what();
        return out;
      }
      if (!std::isfinite(g.losses.total)) {
        out.diverged = true;
        out.message = "step " + std::to_string(step) + ": non-finite loss";
        return out;
      }
      DescriptorNet previous = net;
      adamw_step(net, g.grads, out.optimizer, cfg);
      net.round_to_storage();
      if (!net.all_finite()) {
        net = std::move(previous);
        out.diverged = true;
        out.message = "step " + std::to_string(step) + ": non-finite parameters after the update";
        return out;
      }
      out.trace.push_back({step, epoch_f, g.losses, w});
      if (on_step) on_step(out.trace.back());
    }
  }
  return out;
}

std::string loss_trace_csv(const std::vector<LossRecord>& trace) {
  std::string out = "step,epoch,l_soft,l_part,l_sym,total,lambda_part,lambda_soft\n";
  char line[512];
  for (const auto& r : trace) {
    std::snprintf(line, sizeof line, "%lld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", static_cast<long long>(r.step),
                  r.epoch, r.losses.soft, r.losses.part, r.losses.sym, r.losses.total, r.weights.part, r.weights.soft);
    out += line;
  }
  return out;
}

double masked_mean_similarity(const Eigen::MatrixXd& z_aug, const Eigen::MatrixXd& z_tmp, const Eigen::MatrixXd& mask) {
  const double count = mask.sum();
  if (count == 0.0) return 0.0;
  return (z_aug * z_tmp.transpose()).cwiseProduct(mask).sum() / count;
}

}  // namespace geocorr
