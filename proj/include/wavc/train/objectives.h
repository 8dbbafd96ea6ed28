// Copyright 2026 The wavc Authors. All Rights Reserved.
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

// Loss functions. Every loss returns a 0-dim tensor so it can be
// back-propagated; LossReport holds the plain numbers for logging.

#ifndef WAVC_TRAIN_OBJECTIVES_H_
#define WAVC_TRAIN_OBJECTIVES_H_

#include <optional>
#include <utility>

#include <json.hpp>
#include <torch/torch.h>

namespace wavc::train {

inline constexpr double kProbabilityFloor = 1e-12;

/// mean((d_real - 1)^2) + mean(d_fake^2)
torch::Tensor LsganDLoss(const torch::Tensor &d_real, const torch::Tensor &d_fake);
/// mean((d_fake - 1)^2)
torch::Tensor LsganGLoss(const torch::Tensor &d_fake);

/// Mean absolute error over all elements; shapes must match.
torch::Tensor CycleLoss(const torch::Tensor &x, const torch::Tensor &x_cyc);
torch::Tensor IdentityLoss(const torch::Tensor &x, const torch::Tensor &g_xx);
torch::Tensor SpkRecLoss(const torch::Tensor &e_target, const torch::Tensor &e_converted);

/// Mean negative log-likelihood of the labelled speaker under posteriors
/// p [B, N]; probabilities are floored at kProbabilityFloor.
torch::Tensor DomainClsLoss(const torch::Tensor &posteriors, const torch::Tensor &speaker_ids);

/// Plain (non least-squares) adversarial pair:
///   g = -mean(d_fake)
///   d = -mean(d_real) - mean(1 - d_fake)
/// Unbounded below by construction.
std::pair<torch::Tensor, torch::Tensor> StarGanVcAdvLosses(const torch::Tensor &d_real,
                                                           const torch::Tensor &d_fake);

/// [B, E] x [B, E] -> [B, 2E]; also accepts single vectors [E].
torch::Tensor ConcatSpeakerPair(const torch::Tensor &e_x, const torch::Tensor &e_y);

struct LossWeights {
  double lambda_cyc = 10.0;
  double lambda_spk = 1.0;
  double lambda_id = 5.0;
  bool use_identity = false;

  void Validate() const;
  bool operator==(const LossWeights &) const = default;
};
void to_json(nlohmann::json &j, const LossWeights &w);
void from_json(const nlohmann::json &j, LossWeights &w);

/// Raw loss components of one iteration.
struct LossComponents {
  double g_adv = 0.0;
  double d_adv = 0.0;
  double cyc = 0.0;
  double spk_rec = 0.0;
  std::optional<double> id;
  std::optional<double> domain;
};

struct LossReport {
  LossComponents components;
  double weighted_total_g = 0.0;
  double weighted_total_d = 0.0;
  // Bookkeeping filled by the training loop.
  std::int64_t iteration = 0;
  double g_lr = 0.0;
  double d_lr = 0.0;
  double e_lr = 0.0;
  double wall_seconds = 0.0;
};
void to_json(nlohmann::json &j, const LossReport &r);
void from_json(const nlohmann::json &j, LossReport &r);

/// weighted_total_g = g_adv + l_cyc*cyc + l_spk*spk_rec (+ l_id*id when
/// use_identity and id is present); weighted_total_d = d_adv.
LossReport TotalLosses(const LossComponents &c, const LossWeights &w);

/// Same weighting on differentiable terms; `id` may be undefined.
torch::Tensor WeightedGeneratorLoss(const torch::Tensor &g_adv, const torch::Tensor &cyc,
                                    const torch::Tensor &spk_rec, const torch::Tensor &id,
                                    const LossWeights &w);

}  // namespace wavc::train

#endif  // WAVC_TRAIN_OBJECTIVES_H_
