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

#include "wavc/train/training.h"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "wavc/acoustic/feature_cache.h"
#include "wavc/common/error.h"
#include "wavc/common/log.h"

namespace wavc::train {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void Require(bool ok, const std::string &msg) {
  if (!ok) throw ConfigError(msg);
}

void PutTensor(TensorContainer &c, const std::string &name, const torch::Tensor &t) {
  auto cpu = t.detach().to(torch::kCPU).contiguous();
  std::vector<std::int64_t> shape(cpu.sizes().begin(), cpu.sizes().end());
  switch (cpu.scalar_type()) {
    case torch::kFloat:
      c.Put<float>(name, std::span<const float>(cpu.data_ptr<float>(), cpu.numel()), shape);
      break;
    case torch::kDouble:
      c.Put<double>(name, std::span<const double>(cpu.data_ptr<double>(), cpu.numel()), shape);
      break;
    case torch::kLong:
      c.Put<std::int64_t>(name, std::span<const std::int64_t>(cpu.data_ptr<std::int64_t>(), cpu.numel()), shape);
      break;
    default:
      throw IoError("cannot store tensor '" + name + "' of this dtype");
  }
}

torch::Tensor GetTensor(const TensorContainer &c, const std::string &name) {
  const auto &a = c.At(name);
  torch::ScalarType type;
  switch (a.dtype) {
    case DType::kF32: type = torch::kFloat; break;
    case DType::kF64: type = torch::kDouble; break;
    case DType::kI64: type = torch::kLong; break;
    default: throw IoError("unknown dtype for '" + name + "'");
  }
  auto t = torch::empty(a.shape, torch::TensorOptions().dtype(type));
  if (t.nbytes() != a.bytes.size()) throw IoError("'" + name + "': byte size does not match shape");
  if (!a.bytes.empty()) std::memcpy(t.data_ptr(), a.bytes.data(), a.bytes.size());
  return t;
}

void CopyInto(torch::Tensor &dst, const torch::Tensor &src, const std::string &name) {
  if (dst.sizes() != src.sizes()) {
    std::ostringstream os;
    os << "checkpoint tensor '" << name << "' has shape " << src.sizes() << ", model expects " << dst.sizes();
    throw ConfigError(os.str());
  }
  torch::NoGradGuard guard;
  dst.copy_(src.to(dst.scalar_type()));
}

void CheckFinite(double v, const char *component) {
  if (!std::isfinite(v)) throw TrainingError("non-finite " + std::string(component) + " loss");
}

std::vector<std::pair<std::string, torch::Tensor>> Prefixed(const torch::nn::Module &m, const std::string &prefix) {
  std::vector<std::pair<std::string, torch::Tensor>> out;
  for (const auto &p : m.named_parameters()) out.emplace_back(prefix + "." + p.key(), p.value());
  return out;
}

void SaveAdam(TensorContainer &c, const std::string &prefix, const torch::optim::Adam &opt,
              const torch::nn::Module &m) {
  const auto &state = opt.state();
  for (const auto &p : m.named_parameters()) {
    auto it = state.find(p.value().unsafeGetTensorImpl());
    if (it == state.end()) continue;
    const auto &s = static_cast<const torch::optim::AdamParamState &>(*it->second);
    const std::string base = prefix + "." + p.key();
    PutTensor(c, base + ".exp_avg", s.exp_avg());
    PutTensor(c, base + ".exp_avg_sq", s.exp_avg_sq());
    std::int64_t step = s.step();
    c.Put<std::int64_t>(base + ".step", std::span<const std::int64_t>(&step, 1), {1});
  }
}

void LoadAdam(const TensorContainer &c, const std::string &prefix, torch::optim::Adam &opt,
              const torch::nn::Module &m) {
  auto &state = opt.state();
  state.clear();
  for (const auto &p : m.named_parameters()) {
    const std::string base = prefix + "." + p.key();
    if (!c.Has(base + ".step")) continue;
    auto s = std::make_unique<torch::optim::AdamParamState>();
    s->step(c.Get<std::int64_t>(base + ".step").at(0));
    auto avg = torch::zeros_like(p.value());
    auto avg_sq = torch::zeros_like(p.value());
    CopyInto(avg, GetTensor(c, base + ".exp_avg"), base);
    CopyInto(avg_sq, GetTensor(c, base + ".exp_avg_sq"), base);
    s->exp_avg(avg);
    s->exp_avg_sq(avg_sq);
    state[p.value().unsafeGetTensorImpl()] = std::move(s);
  }
}

json StatsJson(const std::map<std::string, LogF0Stats> &stats) {
  json j = json::object();
  for (const auto &[spk, s] : stats) {
    j[spk] = {{"n_voiced", s.n_voiced}, {"mean", nullptr}, {"std", nullptr}};
    if (s.defined()) {
      j[spk]["mean"] = s.mean;
      j[spk]["std"] = s.std;
    }
  }
  return j;
}

std::map<std::string, LogF0Stats> StatsFromJson(const json &j) {
  std::map<std::string, LogF0Stats> out;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto &[spk, v] : j.items()) {
    LogF0Stats s;
    s.n_voiced = v.at("n_voiced").get<std::int64_t>();
    s.mean = v.at("mean").is_null() ? nan : v["mean"].get<double>();
    s.std = v.at("std").is_null() ? nan : v["std"].get<double>();
    out[spk] = s;
  }
  return out;
}

}  // namespace

void TrainingConfig::Validate(std::int64_t time_multiple) const {
  Require(batch_size >= 1, "training.batch_size must be >= 1");
  Require(segment_frames >= 1, "training.segment_frames must be >= 1");
  Require(time_multiple >= 1 && segment_frames % time_multiple == 0,
          "training.segment_frames must be a multiple of " + std::to_string(time_multiple));
  Require(g_lr >= 0 && d_lr >= 0 && e_lr >= 0, "learning rates must be >= 0");
  Require(adam_beta1 >= 0 && adam_beta1 < 1 && adam_beta2 >= 0 && adam_beta2 < 1,
          "adam betas must be in [0, 1)");
  Require(total_iterations >= 0, "training.total_iterations must be >= 0");
  Require(checkpoint_every >= 0, "training.checkpoint_every must be >= 0");
  weights.Validate();
}

void to_json(json &j, const TrainingConfig &c) {
  j = {{"batch_size", c.batch_size},
       {"segment_frames", c.segment_frames},
       {"g_lr", c.g_lr},
       {"d_lr", c.d_lr},
       {"e_lr", c.e_lr},
       {"adam_beta1", c.adam_beta1},
       {"adam_beta2", c.adam_beta2},
       {"total_iterations", c.total_iterations},
       {"checkpoint_every", c.checkpoint_every},
       {"seed", c.seed},
       {"deterministic", c.deterministic},
       {"weights", c.weights}};
}

void from_json(const json &j, TrainingConfig &c) {
  j.at("batch_size").get_to(c.batch_size);
  j.at("segment_frames").get_to(c.segment_frames);
  j.at("g_lr").get_to(c.g_lr);
  j.at("d_lr").get_to(c.d_lr);
  j.at("e_lr").get_to(c.e_lr);
  j.at("adam_beta1").get_to(c.adam_beta1);
  j.at("adam_beta2").get_to(c.adam_beta2);
  j.at("total_iterations").get_to(c.total_iterations);
  j.at("checkpoint_every").get_to(c.checkpoint_every);
  j.at("seed").get_to(c.seed);
  j.at("deterministic").get_to(c.deterministic);
  j.at("weights").get_to(c.weights);
}

void ModelConfig::Harmonize(std::int64_t mcep_dim, std::int64_t n_speakers) {
  generator.mcep_dim = discriminator.mcep_dim = encoder.mcep_dim = mcep_dim;
  discriminator.n_speakers = encoder.n_speakers = n_speakers;
  encoder.embedding_dim = generator.embedding_dim;
}

void ModelConfig::Validate() const {
  generator.Validate();
  discriminator.Validate();
  encoder.Validate();
  Require(generator.mcep_dim == discriminator.mcep_dim && generator.mcep_dim == encoder.mcep_dim,
          "generator, discriminator and encoder mcep_dim differ");
  Require(discriminator.n_speakers == encoder.n_speakers, "discriminator and encoder n_speakers differ");
  Require(encoder.embedding_dim == generator.embedding_dim, "encoder and generator embedding_dim differ");
}

void to_json(json &j, const ModelConfig &c) {
  j = {{"generator", c.generator}, {"discriminator", c.discriminator}, {"encoder", c.encoder}};
}

void from_json(const json &j, ModelConfig &c) {
  j.at("generator").get_to(c.generator);
  j.at("discriminator").get_to(c.discriminator);
  j.at("encoder").get_to(c.encoder);
}

torch::Tensor FeatureNormalizer::Normalize(const torch::Tensor &mcep) const {
  const auto d = static_cast<std::int64_t>(mean.size());
  auto m = torch::tensor(mean).view({d, 1}).to(mcep.scalar_type());
  auto s = torch::tensor(std).view({d, 1}).to(mcep.scalar_type());
  return (mcep - m) / s;
}

torch::Tensor FeatureNormalizer::Denormalize(const torch::Tensor &mcep) const {
  const auto d = static_cast<std::int64_t>(mean.size());
  auto m = torch::tensor(mean).view({d, 1}).to(mcep.scalar_type());
  auto s = torch::tensor(std).view({d, 1}).to(mcep.scalar_type());
  return mcep * s + m;
}

FeatureBank::FeatureBank(std::vector<BankUtterance> raw, FeatureNormalizer norm) : norm_(std::move(norm)) {
  for (auto &u : raw) {
    if (u.mcep.dim() != 2 || u.mcep.size(1) < 1)
      throw ShapeError("FeatureBank: utterance " + u.utt_id + " is not a [D, T] matrix");
    u.mcep = norm_.Normalize(u.mcep.to(torch::kFloat)).contiguous();
    utts_.push_back(std::move(u));
  }
}

FeatureNormalizer FeatureBank::FitNormalizer(const std::vector<BankUtterance> &utts) {
  if (utts.empty()) throw InvalidArgument("cannot fit a normalizer on no utterances");
  std::vector<torch::Tensor> all;
  for (const auto &u : utts) all.push_back(u.mcep.to(torch::kDouble));
  auto x = torch::cat(all, 1);
  auto mean = x.mean(1);
  auto std = (x - mean.unsqueeze(1)).pow(2).mean(1).sqrt().clamp_min(1e-6);
  FeatureNormalizer n;
  for (std::int64_t d = 0; d < x.size(0); ++d) {
    n.mean.push_back(static_cast<float>(mean[d].item<double>()));
    n.std.push_back(static_cast<float>(std[d].item<double>()));
  }
  return n;
}

FeatureBank FeatureBank::FromManifest(const data::Manifest &m) {
  std::vector<BankUtterance> raw;
  for (const auto &r : m.records) {
    if (r.split != data::Split::kTrain) continue;
    if (r.feature_path.empty())
      throw InvalidArgument("utterance " + r.utt_id + " has no cached features");
    FeatureSet f;
    try {
      f = LoadFeatures(r.feature_path);
    } catch (const Error &e) {
      throw InvalidArgument("utterance " + r.utt_id + ": cannot load features: " + e.what());
    }
    const auto t = static_cast<std::int64_t>(f.mcep.coeffs.rows());
    const auto d = static_cast<std::int64_t>(f.mcep.coeffs.cols());
    auto mcep = torch::from_blob(const_cast<double *>(f.mcep.coeffs.data()), {t, d}, torch::kDouble)
                    .t()
                    .to(torch::kFloat)
                    .contiguous();
    raw.push_back({r.utt_id, r.speaker_index, mcep});
  }
  if (raw.empty()) throw InvalidArgument("manifest has no training utterances");
  auto norm = FitNormalizer(raw);
  return FeatureBank(std::move(raw), std::move(norm));
}

std::int64_t FeatureBank::mcep_dim() const { return utts_.empty() ? 0 : utts_.front().mcep.size(0); }

std::int64_t FeatureBank::n_speakers() const {
  std::int64_t n = 0;
  for (const auto &u : utts_) n = std::max(n, u.speaker + 1);
  return n;
}

torch::Tensor CropWrapped(const torch::Tensor &mcep, std::int64_t start, std::int64_t segment) {
  const auto t = mcep.size(-1);
  if (t >= segment && start + segment <= t) return mcep.narrow(-1, start, segment);
  auto idx = (torch::arange(segment, torch::kLong) + start).remainder(t);
  return mcep.index_select(-1, idx);
}

TrainBatch SampleBatch(const FeatureBank &bank, std::int64_t batch_size, std::int64_t segment, Rng &rng) {
  if (bank.empty()) throw InvalidArgument("cannot sample from an empty feature bank");
  const auto &u = bank.utterances();
  TrainBatch b;
  std::vector<torch::Tensor> xs, xt;
  std::vector<std::int64_t> sx, sy;
  auto draw = [&](std::vector<torch::Tensor> &x, std::vector<std::int64_t> &s, std::vector<std::string> &ids) {
    const auto &utt = u[rng.UniformIndex(u.size())];
    const auto t = utt.mcep.size(1);
    const auto start = static_cast<std::int64_t>(t >= segment ? rng.UniformIndex(t - segment + 1) : rng.UniformIndex(t));
    x.push_back(CropWrapped(utt.mcep, start, segment));
    s.push_back(utt.speaker);
    ids.push_back(utt.utt_id);
  };
  for (std::int64_t i = 0; i < batch_size; ++i) {
    draw(xs, sx, b.src_ids);
    draw(xt, sy, b.tgt_ids);
  }
  b.x_s = torch::stack(xs).unsqueeze(1);
  b.x_t = torch::stack(xt).unsqueeze(1);
  b.s_x = torch::tensor(sx, torch::kLong);
  b.s_y = torch::tensor(sy, torch::kLong);
  return b;
}

Models Models::Create(const ModelConfig &config, std::uint64_t seed) {
  config.Validate();
  torch::manual_seed(seed);
  Models m;
  m.g = nn::Generator(config.generator);
  m.d = nn::Discriminator(config.discriminator);
  m.e = nn::SpeakerEncoder(config.encoder);
  return m;
}

void Models::Train(bool on) {
  g->train(on);
  d->train(on);
  e->train(on);
}

std::vector<std::pair<std::string, torch::Tensor>> Models::NamedParameters() const {
  auto out = Prefixed(*g, "generator");
  for (auto &p : Prefixed(*d, "discriminator")) out.push_back(std::move(p));
  for (auto &p : Prefixed(*e, "encoder")) out.push_back(std::move(p));
  return out;
}

Optimizers Optimizers::Create(Models &models, const TrainingConfig &cfg) {
  auto options = [&](double lr) {
    return torch::optim::AdamOptions(lr).betas({cfg.adam_beta1, cfg.adam_beta2});
  };
  Optimizers o;
  o.g = std::make_unique<torch::optim::Adam>(models.g->parameters(), options(cfg.g_lr));
  o.d = std::make_unique<torch::optim::Adam>(models.d->parameters(), options(cfg.d_lr));
  o.e = std::make_unique<torch::optim::Adam>(models.e->parameters(), options(cfg.e_lr));
  return o;
}

LossReport TrainStep(const TrainBatch &batch, Models &models, Optimizers &opt, const TrainingConfig &cfg) {
  auto &G = models.g;
  auto &D = models.d;
  auto &E = models.e;
  LossComponents c;

  // Discriminator update on detached conversions.
  torch::Tensor fake_detached;
  {
    torch::NoGradGuard no_grad;
    fake_detached = G(batch.x_s, E(batch.x_t, batch.s_y));
  }
  auto d_loss = LsganDLoss(D(batch.x_s, batch.s_x), D(fake_detached, batch.s_y));
  c.d_adv = d_loss.item<double>();
  CheckFinite(c.d_adv, "d_adv");
  opt.d->zero_grad();
  d_loss.backward();
  opt.d->step();

  // Joint generator + encoder update.
  opt.g->zero_grad();
  opt.e->zero_grad();
  auto e_t = E(batch.x_t, batch.s_y);
  auto fake = G(batch.x_s, e_t);
  auto g_adv = LsganGLoss(D(fake, batch.s_y));
  auto e_s = E(batch.x_s, batch.s_x);
  auto cyc = CycleLoss(batch.x_s, G(fake, e_s));
  auto spk = SpkRecLoss(e_t, E(fake, batch.s_y));
  torch::Tensor id;
  if (cfg.weights.use_identity) id = IdentityLoss(batch.x_s, G(batch.x_s, e_s));
  auto total = WeightedGeneratorLoss(g_adv, cyc, spk, id, cfg.weights);

  c.g_adv = g_adv.item<double>();
  c.cyc = cyc.item<double>();
  c.spk_rec = spk.item<double>();
  if (id.defined()) c.id = id.item<double>();
  CheckFinite(c.g_adv, "g_adv");
  CheckFinite(c.cyc, "cyc");
  CheckFinite(c.spk_rec, "spk_rec");
  if (c.id) CheckFinite(*c.id, "id");
  total.backward();
  opt.g->step();
  opt.e->step();
  // The generator loss also reaches D's parameters; those gradients are
  // never applied.
  opt.d->zero_grad();
  return TotalLosses(c, cfg.weights);
}

TrainingState TrainingState::Create(const ModelConfig &mc, const TrainingConfig &tc, FeatureNormalizer norm,
                                    std::vector<std::string> speakers,
                                    std::map<std::string, LogF0Stats> f0_stats) {
  tc.Validate(mc.generator.time_multiple());
  TrainingState s;
  s.model_config = mc;
  s.training_config = tc;
  s.models = Models::Create(mc, tc.seed);
  s.models.Train(true);
  s.optimizers = Optimizers::Create(s.models, tc);
  s.rng = Rng(tc.seed);
  s.normalizer = std::move(norm);
  s.speakers = std::move(speakers);
  s.f0_stats = std::move(f0_stats);
  return s;
}

void ConfigureDeterminism(const TrainingConfig &cfg) {
  if (!cfg.deterministic) return;
  torch::set_num_threads(1);
  at::globalContext().setDeterministicAlgorithms(true, /*warn_only=*/false);
}

void SaveCheckpoint(const fs::path &path, const TrainingState &s) {
  TensorContainer c;
  for (const auto &[name, t] : s.models.NamedParameters()) PutTensor(c, "param." + name, t);
  SaveAdam(c, "adam.generator", *s.optimizers.g, *s.models.g);
  SaveAdam(c, "adam.discriminator", *s.optimizers.d, *s.models.d);
  SaveAdam(c, "adam.encoder", *s.optimizers.e, *s.models.e);
  if (!s.normalizer.empty()) {
    c.Put<float>("normalizer.mean", s.normalizer.mean, {static_cast<std::int64_t>(s.normalizer.mean.size())});
    c.Put<float>("normalizer.std", s.normalizer.std, {static_cast<std::int64_t>(s.normalizer.std.size())});
  }
  auto &m = c.metadata();
  m["format"] = kCheckpointFormat;
  m["version"] = std::to_string(kCheckpointVersion);
  m["iteration"] = std::to_string(s.iteration);
  m["rng_state"] = s.rng.Serialize();
  m["model_config"] = json(s.model_config).dump();
  m["training_config"] = json(s.training_config).dump();
  m["speakers"] = json(s.speakers).dump();
  m["f0_stats"] = StatsJson(s.f0_stats).dump();
  c.Save(path);
}

TrainingState LoadCheckpoint(const fs::path &path) {
  auto c = TensorContainer::Load(path);
  try {
    if (c.Meta("format") != kCheckpointFormat) throw IoError(path.string() + ": not a checkpoint");
    if (std::stoi(c.Meta("version")) != kCheckpointVersion)
      throw IoError(path.string() + ": unsupported checkpoint version " + c.Meta("version"));
    TrainingState s;
    s.model_config = json::parse(c.Meta("model_config")).get<ModelConfig>();
    s.training_config = json::parse(c.Meta("training_config")).get<TrainingConfig>();
    s.models = Models::Create(s.model_config, s.training_config.seed);
    s.models.Train(true);
    for (auto &[name, t] : s.models.NamedParameters()) {
      if (!c.Has("param." + name)) throw IoError(path.string() + ": missing parameter " + name);
      CopyInto(t, GetTensor(c, "param." + name), name);
    }
    s.optimizers = Optimizers::Create(s.models, s.training_config);
    LoadAdam(c, "adam.generator", *s.optimizers.g, *s.models.g);
    LoadAdam(c, "adam.discriminator", *s.optimizers.d, *s.models.d);
    LoadAdam(c, "adam.encoder", *s.optimizers.e, *s.models.e);
    if (c.Has("normalizer.mean")) {
      s.normalizer.mean = c.Get<float>("normalizer.mean");
      s.normalizer.std = c.Get<float>("normalizer.std");
    }
    s.iteration = std::stoll(c.Meta("iteration"));
    s.rng.Restore(c.Meta("rng_state"));
    s.speakers = json::parse(c.Meta("speakers")).get<std::vector<std::string>>();
    s.f0_stats = StatsFromJson(json::parse(c.Meta("f0_stats")));
    return s;
  } catch (const json::exception &e) {
    throw IoError(path.string() + ": malformed checkpoint metadata: " + e.what());
  } catch (const std::invalid_argument &) {
    throw IoError(path.string() + ": malformed checkpoint metadata");
  }
}

void CheckResumeCompatible(const TrainingState &stored, const ModelConfig &mc, const TrainingConfig &tc) {
  std::string diff;
  if (!(stored.model_config == mc)) diff += " model";
  auto a = stored.training_config, b = tc;
  a.total_iterations = b.total_iterations = 0;
  a.checkpoint_every = b.checkpoint_every = 0;
  if (!(a == b)) diff += " training";
  if (!diff.empty()) throw ConfigError("checkpoint configuration differs from the requested one in:" + diff);
}

fs::path Train(const FeatureBank &bank, const ModelConfig &mc, const TrainingConfig &tc,
               const std::vector<std::string> &speakers, const std::map<std::string, LogF0Stats> &f0_stats,
               const TrainOptions &options) {
  ConfigureDeterminism(tc);
  if (bank.empty()) throw InvalidArgument("no training utterances");
  TrainingState state;
  if (!options.resume_from.empty()) {
    state = LoadCheckpoint(options.resume_from);
    CheckResumeCompatible(state, mc, tc);
    state.training_config = tc;
    WAVC_INFO << "resuming from " << options.resume_from.string() << " at iteration " << state.iteration;
  } else {
    state = TrainingState::Create(mc, tc, bank.normalizer(), speakers, f0_stats);
  }
  fs::create_directories(options.out_dir);
  const fs::path log_path = options.out_dir / "train_log.jsonl";

  // Drop log records written after the checkpoint we resume from.
  if (!options.resume_from.empty() && fs::exists(log_path)) {
    std::ifstream in(log_path);
    std::string line, kept;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (json::parse(line).at("iteration").get<std::int64_t>() <= state.iteration) kept += line + "\n";
    }
    in.close();
    AtomicWriteFile(log_path, std::as_bytes(std::span(kept.data(), kept.size())));
  } else if (options.resume_from.empty()) {
    std::ofstream(log_path, std::ios::trunc);
  }
  std::ofstream log(log_path, std::ios::app);
  if (!log) throw IoError(log_path.string() + ": cannot open training log");

  const auto t0 = std::chrono::steady_clock::now();
  while (state.iteration < tc.total_iterations) {
    auto batch = SampleBatch(bank, tc.batch_size, tc.segment_frames, state.rng);
    LossReport report;
    try {
      report = TrainStep(batch, state.models, state.optimizers, tc);
    } catch (const TrainingError &e) {
      throw TrainingError(std::string(e.what()) + " (iteration " + std::to_string(state.iteration + 1) + ")");
    }
    ++state.iteration;
    report.iteration = state.iteration;
    report.g_lr = tc.g_lr;
    report.d_lr = tc.d_lr;
    report.e_lr = tc.e_lr;
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    log << json(report).dump() << "\n";
    log.flush();
    if (options.on_report) options.on_report(report);
    if (tc.checkpoint_every > 0 && state.iteration % tc.checkpoint_every == 0) {
      char name[64];
      std::snprintf(name, sizeof(name), "ckpt_%08lld.wvc", static_cast<long long>(state.iteration));
      SaveCheckpoint(options.out_dir / name, state);
    }
  }
  const fs::path final_path = options.out_dir / "final.wvc";
  SaveCheckpoint(final_path, state);
  return final_path;
}

}  // namespace wavc::train
