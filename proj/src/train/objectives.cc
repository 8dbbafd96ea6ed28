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

#include "wavc/train/objectives.h"

#include <sstream>

#include "wavc/common/error.h"

namespace wavc::train {
namespace {

void CheckNonEmpty(const torch::Tensor &t, const char *who) {
  if (!t.defined() || t.numel() == 0) throw InvalidArgument(std::string(who) + ": empty batch");
}

torch::Tensor L1(const torch::Tensor &a, const torch::Tensor &b, const char *who) {
  CheckNonEmpty(a, who);
  if (a.sizes() != b.sizes()) {
    std::ostringstream os;
    os << who << ": shapes differ " << a.sizes() << " vs " << b.sizes();
    throw ShapeError(os.str());
  }
  return (a - b).abs().mean();
}

}  // namespace

torch::Tensor LsganDLoss(const torch::Tensor &d_real, const torch::Tensor &d_fake) {
  CheckNonEmpty(d_real, "LsganDLoss");
  CheckNonEmpty(d_fake, "LsganDLoss");
  return (d_real - 1.0).pow(2).mean() + d_fake.pow(2).mean();
}

torch::Tensor LsganGLoss(const torch::Tensor &d_fake) {
  CheckNonEmpty(d_fake, "LsganGLoss");
  return (d_fake - 1.0).pow(2).mean();
}

torch::Tensor CycleLoss(const torch::Tensor &x, const torch::Tensor &x_cyc) {
  return L1(x, x_cyc, "CycleLoss");
}

torch::Tensor IdentityLoss(const torch::Tensor &x, const torch::Tensor &g_xx) {
  return L1(x, g_xx, "IdentityLoss");
}

torch::Tensor SpkRecLoss(const torch::Tensor &e_target, const torch::Tensor &e_converted) {
  return L1(e_target, e_converted, "SpkRecLoss");
}

torch::Tensor DomainClsLoss(const torch::Tensor &posteriors, const torch::Tensor &speaker_ids) {
  CheckNonEmpty(posteriors, "DomainClsLoss");
  if (posteriors.dim() != 2 || speaker_ids.dim() != 1 || speaker_ids.size(0) != posteriors.size(0))
    throw ShapeError("DomainClsLoss: expected posteriors [B, N] and ids [B]");
  auto ids = speaker_ids.to(torch::kLong);
  if (ids.min().item<int64_t>() < 0 || ids.max().item<int64_t>() >= posteriors.size(1))
    throw InvalidArgument("DomainClsLoss: speaker id out of range");
  auto p = posteriors.gather(1, ids.unsqueeze(1)).squeeze(1);
  return -p.clamp_min(kProbabilityFloor).log().mean();
}

std::pair<torch::Tensor, torch::Tensor> StarGanVcAdvLosses(const torch::Tensor &d_real,
                                                           const torch::Tensor &d_fake) {
  CheckNonEmpty(d_real, "StarGanVcAdvLosses");
  CheckNonEmpty(d_fake, "StarGanVcAdvLosses");
  auto g = -d_fake.mean();
  auto d = -d_real.mean() - (1.0 - d_fake).mean();
  return {g, d};
}

torch::Tensor ConcatSpeakerPair(const torch::Tensor &e_x, const torch::Tensor &e_y) {
  if (e_x.sizes() != e_y.sizes() || e_x.dim() < 1 || e_x.dim() > 2)
    throw ShapeError("ConcatSpeakerPair: embeddings must share shape [E] or [B, E]");
  return torch::cat({e_x, e_y}, e_x.dim() - 1);
}

void LossWeights::Validate() const {
  if (lambda_cyc < 0 || lambda_spk < 0 || lambda_id < 0)
    throw ConfigError("loss weights must be non-negative");
}

void to_json(nlohmann::json &j, const LossWeights &w) {
  j = {{"lambda_cyc", w.lambda_cyc},
       {"lambda_spk", w.lambda_spk},
       {"lambda_id", w.lambda_id},
       {"use_identity", w.use_identity}};
}

void from_json(const nlohmann::json &j, LossWeights &w) {
  j.at("lambda_cyc").get_to(w.lambda_cyc);
  j.at("lambda_spk").get_to(w.lambda_spk);
  j.at("lambda_id").get_to(w.lambda_id);
  j.at("use_identity").get_to(w.use_identity);
}

void to_json(nlohmann::json &j, const LossReport &r) {
  const auto &c = r.components;
  j = {{"iteration", r.iteration},   {"g_adv", c.g_adv}, {"d_adv", c.d_adv},
       {"cyc", c.cyc},               {"spk_rec", c.spk_rec},
       {"weighted_total_g", r.weighted_total_g},
       {"weighted_total_d", r.weighted_total_d},
       {"g_lr", r.g_lr},             {"d_lr", r.d_lr},   {"e_lr", r.e_lr},
       {"wall_seconds", r.wall_seconds}};
  if (c.id) j["id"] = *c.id;
  if (c.domain) j["domain"] = *c.domain;
}

void from_json(const nlohmann::json &j, LossReport &r) {
  auto &c = r.components;
  j.at("iteration").get_to(r.iteration);
  j.at("g_adv").get_to(c.g_adv);
  j.at("d_adv").get_to(c.d_adv);
  j.at("cyc").get_to(c.cyc);
  j.at("spk_rec").get_to(c.spk_rec);
  j.at("weighted_total_g").get_to(r.weighted_total_g);
  j.at("weighted_total_d").get_to(r.weighted_total_d);
  j.at("g_lr").get_to(r.g_lr);
  j.at("d_lr").get_to(r.d_lr);
  j.at("e_lr").get_to(r.e_lr);
  j.at("wall_seconds").get_to(r.wall_seconds);
  c.id = j.contains("id") ? std::optional<double>(j["id"].get<double>()) : std::nullopt;
  c.domain = j.contains("domain") ? std::optional<double>(j["domain"].get<double>()) : std::nullopt;
}

LossReport TotalLosses(const LossComponents &c, const LossWeights &w) {
  LossReport r;
  r.components = c;
  r.weighted_total_g = c.g_adv + w.lambda_cyc * c.cyc + w.lambda_spk * c.spk_rec;
  if (w.use_identity && c.id) r.weighted_total_g += w.lambda_id * *c.id;
  r.weighted_total_d = c.d_adv;
  return r;
}

torch::Tensor WeightedGeneratorLoss(const torch::Tensor &g_adv, const torch::Tensor &cyc,
                                    const torch::Tensor &spk_rec, const torch::Tensor &id,
                                    const LossWeights &w) {
  auto total = g_adv + w.lambda_cyc * cyc + w.lambda_spk * spk_rec;
  if (w.use_identity && id.defined()) total = total + w.lambda_id * id;
  return total;
}

}  // namespace wavc::train
