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

#include "geocorr/augment.hpp"
#include "geocorr/descriptor.hpp"
#include "geocorr/losses.hpp"

#include <nlohmann/json.hpp>

#include <functional>

namespace geocorr {

struct TrainConfig {
  double tau = 0.07;
  /// Final weights after the transition; lambda_part_warmup holds during warmup.
  double lambda_soft = 0.3;
  double lambda_part = 0.6;
  double lambda_sym = 0.3;
  double lambda_part_warmup = 1.0;
  double label_smoothing = 0.1;
  int warmup_epochs = 1;
  int transition_epochs = 3;
  int total_epochs = 13;
  double lr = 1e-3;
  double weight_decay = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double opt_eps = 1e-8;
  std::uint64_t seed = 0;
  std::vector<std::pair<int, int>> sym_pairs;
  /// Ablations: one-hot hard-anchor rows instead of the field, and no
  /// contrastive term at all.
  bool use_field = true;
  bool use_contrastive = true;
  /// Above this many template vertices, the softmax denominator uses a
  /// uniform column sample of soft_subsample_size (0 disables).
  int soft_subsample_above = 0;
  int soft_subsample_size = 1024;
  bool shuffle = true;

  void validate() const;
};

nlohmann::json to_json(const TrainConfig& cfg);
TrainConfig train_config_from_json(const nlohmann::json& j);

/// (lambda_part, lambda_soft) at a fractional epoch: warmup, then a cosine
/// blend, then the final weights. lambda_sym is constant.
LossWeights curriculum(double epoch, const TrainConfig& cfg);

/// Template side of training: context, labels and the canonical field.
struct TemplateData {
  MeshContext context;
  Labels labels;
  std::shared_ptr<const GeodesicField> field;
};

/// One augmented mesh with everything its loss terms need.
struct Sample {
  MeshContext context;
  Labels labels;
  AugmentedField field;
  Eigen::MatrixXd sym_mask;
};

/// Uses the hard-anchor field instead of `tmpl.field` when cfg.use_field is off.
Sample make_sample(const TemplateData& tmpl, MeshContext context, const AnchorMap& anchors, const TrainConfig& cfg);

struct LossBreakdown {
  double soft = 0.0;
  double part = 0.0;
  double sym = 0.0;
  double total = 0.0;
};

struct GradientResult {
  DescriptorNet grads;
  LossBreakdown losses;  ///< batch means
};

/// Exact gradients of the weighted total loss, averaged over the batch.
/// `step` seeds the optional column subsample.
GradientResult gradients(const DescriptorNet& net, const TemplateData& tmpl, const std::vector<const Sample*>& batch,
                         const TrainConfig& cfg, const LossWeights& weights, std::uint64_t step = 0);

/// Losses only; the forward half of `gradients`.
LossBreakdown evaluate_losses(const DescriptorNet& net, const TemplateData& tmpl, const Sample& sample,
                              const TrainConfig& cfg, const LossWeights& weights, std::uint64_t step = 0);

struct AdamState {
  std::vector<Eigen::MatrixXd> m, v;
  std::int64_t step = 0;

  /// Moments as checkpoint tensors ("adam.m.<name>", "adam.v.<name>", "adam.step").
  std::vector<NamedTensor> to_tensors(const DescriptorNet& net) const;
  static AdamState from_tensors(const DescriptorNet& net, const std::vector<NamedTensor>& tensors);
};

/// One decoupled-decay Adam update: p <- p (1 - lr wd), then the
/// bias-corrected moment step.
void adamw_step(std::vector<Eigen::MatrixXd*> params, const std::vector<const Eigen::MatrixXd*>& grads,
                AdamState& state, const TrainConfig& cfg);
void adamw_step(DescriptorNet& net, const DescriptorNet& grads, AdamState& state, const TrainConfig& cfg);

struct LossRecord {
  std::int64_t step;
  double epoch;
  LossBreakdown losses;
  LossWeights weights;
};

struct TrainResult {
  std::vector<LossRecord> trace;
  AdamState optimizer;
  /// Set when a loss or parameter went non-finite; the net holds the last
  /// finite parameters.
  bool diverged = false;
  std::string message;
};

/// Epochs over the samples, one (template, sample) pair per step.
TrainResult train(DescriptorNet& net, const TemplateData& tmpl, const std::vector<Sample>& samples,
                  const TrainConfig& cfg, const std::function<void(const LossRecord&)>& on_step = {});

/// CSV with step, epoch, l_soft, l_part, l_sym, total, lambda_part, lambda_soft.
std::string loss_trace_csv(const std::vector<LossRecord>& trace);

/// Mean cosine similarity over the masked pairs (0 when the mask is empty).
double masked_mean_similarity(const Eigen::MatrixXd& z_aug, const Eigen::MatrixXd& z_tmp, const Eigen::MatrixXd& mask);

}  // namespace geocorr
