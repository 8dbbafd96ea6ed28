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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "gradcheck.h"
#include "oracles.h"
#include "toy.h"
#include "wavc/acoustic/f0.h"
#include "wavc/acoustic/vocoder.h"
#include "wavc/acoustic/waveform.h"
#include "wavc/common/log.h"
#include "wavc/data/manifest.h"
#include "wavc/eval/evaluation.h"
#include "wavc/io/wav_io.h"
#include "wavc/nn/networks.h"
#include "wavc/nn/norm_layers.h"
#include "wavc/train/objectives.h"
#include "wavc/train/training.h"

using namespace wavc;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char *format, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

double MaxAbs(const torch::Tensor &t) { return t.abs().max().item<double>(); }

std::vector<double> ToVector(const torch::Tensor &t) {
  auto c = t.to(torch::kDouble).contiguous();
  return {c.data_ptr<double>(), c.data_ptr<double>() + c.numel()};
}

fs::path TempDir(const std::string &name) {
  auto p = fs::temp_directory_path() / ("wavc_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Random gamma with magnitudes in [0.5, 2] and random signs, [B, J].
torch::Tensor RandomGamma(int64_t b, int64_t j, torch::Dtype dtype) {
  auto mag = torch::rand({b, j}, dtype) * 1.5 + 0.5;
  auto sign = torch::where(torch::rand({b, j}) < 0.5, -1.0, 1.0).to(dtype);
  return mag * sign;
}

Outcome DemodulationInvariant() {
  torch::manual_seed(101);
  std::mt19937 gen(101);
  std::uniform_int_distribution<int> bd(1, 4), id(2, 16), jd(1, 8), kd(1, 5);
  double worst_mean = 0, worst_std = 0, worst_std_eps = 0;
  for (int draw = 0; draw < 1000; ++draw) {
    const int B = bd(gen), I = id(gen), J = jd(gen), K = kd(gen);
    auto w = torch::randn({I, J, K});
    nn::AffineParams p{torch::randn({B, J}), torch::randn({B, J})};
    auto out = nn::WAdaINModulate(w, p, 0.0);
    auto mean = out.mean(1);
    auto std = (out - mean.unsqueeze(1)).pow(2).mean(1).sqrt();
    worst_mean = std::max(worst_mean, MaxAbs(mean));
    worst_std = std::max(worst_std, MaxAbs(std - 1));
    auto with_eps = nn::WAdaINModulate(w, {RandomGamma(B, J, torch::kFloat), p.beta});
    auto se = (with_eps - with_eps.mean(1, true)).pow(2).mean(1).sqrt();
    worst_std_eps = std::max(worst_std_eps, MaxAbs(se - 1));
  }
  return {worst_mean < 1e-5 && worst_std < 1e-3,
          Fmt("max |mean| %.2e, max |std-1| %.2e at eps 0; |std-1| %.2e at eps 1e-5 with |gamma| >= 0.5",
              worst_mean, worst_std, worst_std_eps)};
}

Outcome ScaleInvariance() {
  torch::manual_seed(102);
  std::mt19937 gen(102);
  std::uniform_int_distribution<int> bd(1, 4), id(2, 8), jd(1, 8), kd(1, 5);
  double worst = 0, worst_eps = 0;
  for (int draw = 0; draw < 100; ++draw) {
    const int B = bd(gen), I = id(gen), J = jd(gen), K = kd(gen);
    auto w = torch::randn({I, J, K});
    auto gamma = torch::randn({B, J});
    auto scale = torch::exp(torch::randn({B, J}) * 2.0);
    auto beta0 = torch::zeros({B, J});
    worst = std::max(worst, MaxAbs(nn::WAdaINModulate(w, {gamma, beta0}, 0.0) -
                                   nn::WAdaINModulate(w, {gamma * scale, beta0}, 0.0)));
    worst_eps = std::max(worst_eps, MaxAbs(nn::WAdaINModulate(w, {gamma, beta0}) -
                                           nn::WAdaINModulate(w, {gamma * scale, beta0})));
  }
  return {worst < 1e-6, Fmt("max-abs change %.2e at eps 0; %.2e at eps 1e-5", worst, worst_eps)};
}

Outcome ModulateOracle() {
  torch::manual_seed(103);
  std::mt19937 gen(103);
  std::uniform_int_distribution<int> bd(1, 4), id(2, 8), jd(1, 8), kd(1, 5);
  double worst = 0;
  for (int draw = 0; draw < 100; ++draw) {
    const int B = bd(gen), I = id(gen), J = jd(gen), K = kd(gen);
    auto w = torch::randn({I, J, K}, torch::kDouble);
    auto g = torch::randn({B, J}, torch::kDouble);
    auto b = torch::randn({B, J}, torch::kDouble);
    auto got = ToVector(nn::WAdaINModulate(w, {g, b}));
    auto want = oracle::WAdaInLoop(ToVector(w), ToVector(g), ToVector(b), B, I, J, K, nn::kNormEps);
    for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
  }
  return {worst < 1e-6, Fmt("max-abs difference %.2e over 100 shapes", worst)};
}

Outcome GradientCheck() {
  torch::manual_seed(104);
  const int B = 2, I = 3, J = 2, K = 3, T = 5, E = 4;
  nn::WAdaINConv1d conv(J, I, K, E, 0.5);
  conv->to(torch::kDouble);
  auto f = torch::randn({B, J, T}, torch::kDouble).requires_grad_(true);
  auto e = torch::randn({B, E}, torch::kDouble);
  auto r = torch::randn({B, I, T}, torch::kDouble);
  auto c = testing::GradCheck([&] { return (conv(f, e) * r).sum(); },
                              {{"f", f},
                               {"w", conv->weight},
                               {"gamma.weight", conv->affine->gamma->weight},
                               {"gamma.bias", conv->affine->gamma->bias},
                               {"beta.weight", conv->affine->beta->weight},
                               {"beta.bias", conv->affine->beta->bias}});

  auto x = torch::randn({B, 2 * J, T}, torch::kDouble).requires_grad_(true);
  auto rg = torch::randn({B, J, T}, torch::kDouble);
  auto g = testing::GradCheck([&] { return (nn::Glu(x) * rg).sum(); }, {{"f", x}});

  nn::BottleneckBlock block(J, K, E, 0.5, nn::kNormEps);
  block->to(torch::kDouble);
  {
    torch::NoGradGuard no_grad;
    block->bias.normal_(0.0, 0.3);
  }
  auto xb = torch::randn({B, J, T}, torch::kDouble).requires_grad_(true);
  auto rb = torch::randn({B, J, T}, torch::kDouble);
  std::vector<std::pair<std::string, torch::Tensor>> inputs{{"x", xb}};
  for (const auto &p : block->named_parameters()) inputs.emplace_back(p.key(), p.value());
  auto b = testing::GradCheck([&] { return (block(xb, e) * rb).sum(); }, inputs);

  return {c.ok && g.ok && b.ok, Fmt("max relative error wadain_conv %.2e, glu %.2e, bottleneck block %.2e",
                                    c.max_error, g.max_error, b.max_error)};
}

Outcome GeneratorContract() {
  int bad = 0;
  for (int draw = 0; draw < 100; ++draw) {
    torch::manual_seed(1000 + draw);
    nn::Generator g(nn::GeneratorConfig{});
    torch::NoGradGuard no_grad;
    auto x = torch::randn({8, 1, 37, 256});
    auto y = g(x, torch::randn({8, g->config().embedding_dim}));
    if (y.sizes() != x.sizes() || !torch::isfinite(y).all().item<bool>()) ++bad;
  }
  return {bad == 0, Fmt("%.0f of 100 draws gave a finite 8x1x37x256 output", 100 - bad)};
}

Outcome LossSuite() {
  using namespace train;
  auto T = [](std::vector<double> v) { return torch::tensor(v, torch::kDouble); };
  auto V = [](const torch::Tensor &t) { return t.item<double>(); };
  std::vector<std::string> failed;
  auto expect = [&](bool ok, const std::string &what) {
    if (!ok) failed.push_back(what);
  };
  expect(V(LsganDLoss(torch::ones({4}), torch::zeros({4}))) == 0.0, "lsgan_d perfect");
  expect(V(LsganDLoss(torch::zeros({4}), torch::ones({4}))) == 2.0, "lsgan_d inverted");
  expect(V(LsganDLoss(T({0.5}), T({0.5}))) == 0.5, "lsgan_d 0.5");
  expect(V(LsganGLoss(torch::ones({3}))) == 0.0, "lsgan_g ones");
  expect(V(LsganGLoss(torch::zeros({3}))) == 1.0, "lsgan_g zeros");
  expect(V(LsganGLoss(T({0.5, 1.5}))) == 0.25, "lsgan_g 0.25");

  torch::manual_seed(105);
  auto x = torch::randn({2, 1, 4, 8}, torch::kDouble);
  auto y = torch::randn_like(x);
  for (auto [loss, name] : {std::pair{&CycleLoss, "cycle"}, {&IdentityLoss, "identity"}}) {
    expect(V(loss(x, x)) == 0.0, std::string(name) + " zero");
    expect(std::abs(V(loss(x, x + 0.5)) - 0.5) < 1e-12, std::string(name) + " offset");
    expect(std::abs(V(loss(x, y)) - oracle::L1Loop(ToVector(x), ToVector(y))) < 1e-7, std::string(name) + " oracle");
  }
  auto e = torch::randn({3, 5}, torch::kDouble), e2 = torch::randn({3, 5}, torch::kDouble);
  expect(V(SpkRecLoss(e, e)) == 0.0, "spk_rec zero");
  expect(std::abs(V(SpkRecLoss(e, e + 1)) - 1.0) < 1e-12, "spk_rec offset");
  expect(std::abs(V(SpkRecLoss(e, e2)) - oracle::L1Loop(ToVector(e), ToVector(e2))) < 1e-7, "spk_rec oracle");

  auto onehot = torch::zeros({2, 3}, torch::kDouble);
  onehot[0][1] = 1.0;
  onehot[1][2] = 1.0;
  expect(V(DomainClsLoss(onehot, torch::tensor({1, 2}, torch::kLong))) == 0.0, "domain_cls certain");
  const double ln4 = V(DomainClsLoss(torch::full({3, 4}, 0.25, torch::kDouble), torch::tensor({0, 3, 2}, torch::kLong)));
  expect(std::abs(ln4 - std::log(4.0)) < 1e-12, "domain_cls ln 4");
  const double capped = V(DomainClsLoss(onehot, torch::tensor({0, 0}, torch::kLong)));
  expect(std::isfinite(capped) && capped > 20, "domain_cls floor");

  auto [g0, d0] = StarGanVcAdvLosses(torch::ones({3}, torch::kDouble), torch::zeros({3}, torch::kDouble));
  expect(V(g0) == 0.0 && V(d0) == -2.0, "stargan adv literal");
  auto [g1, d1] = StarGanVcAdvLosses(T({0.2, 0.6}), T({0.3, 0.9}));
  expect(std::abs(V(g1) + 0.6) < 1e-12 && std::abs(V(d1) + 0.8) < 1e-12, "stargan adv hand");

  auto a = torch::randn({5}), b = torch::randn({5});
  auto cat = ConcatSpeakerPair(a, b);
  expect(cat.numel() == 10 && torch::equal(cat.narrow(0, 0, 5), a) && torch::equal(cat.narrow(0, 5, 5), b),
         "concat_speaker_pair");

  LossWeights w;
  expect(TotalLosses({}, w).weighted_total_g == 0.0, "total zero");
  LossComponents comp{0.3, 0.7, 0.11, 0.05, 0.2, std::nullopt};
  expect(std::abs(TotalLosses(comp, w).weighted_total_g - (0.3 + w.lambda_cyc * 0.11 + w.lambda_spk * 0.05)) < 1e-12,
         "total weighted");
  w.lambda_cyc = 0;
  expect(std::abs(TotalLosses(comp, w).weighted_total_g - (0.3 + w.lambda_spk * 0.05)) < 1e-12, "total lambda 0");

  std::string detail = failed.empty() ? "all examples hold" : "failed:";
  for (const auto &f : failed) detail += " " + f;
  return {failed.empty(), detail};
}

Outcome EerOracle() {
  using namespace eval;
  auto trials = [](std::vector<double> t, std::vector<double> n) {
    TrialScoreSet s;
    for (double v : t) s.Add(v, true, "t");
    for (double v : n) s.Add(v, false, "n");
    return s;
  };
  std::mt19937_64 gen(106);
  std::uniform_int_distribution<int> size(2, 20), level(0, 9);
  int mismatches = 0;
  for (int set = 0; set < 100; ++set) {
    const int n = size(gen);
    TrialScoreSet t;
    for (int i = 0; i < n; ++i) t.Add(level(gen) / 10.0, i == 0 || (i > 1 && gen() % 2), "x");
    mismatches += ComputeEer(t) != oracle::BruteForceEer(t.scores, t.labels);
  }
  const double separated = ComputeEer(trials({0.9, 0.8}, {0.7, 0.1}));
  const double third = ComputeEer(trials({0.9, 0.8, 0.3}, {0.7, 0.2, 0.1}));
  std::normal_distribution<double> normal(0.0, 1.0);
  TrialScoreSet same;
  for (int i = 0; i < 10000; ++i) {
    same.Add(normal(gen), true, "t");
    same.Add(normal(gen), false, "n");
  }
  const double chance = ComputeEer(same);
  return {mismatches == 0 && separated == 0.0 && std::abs(third - 33.33) <= 0.01 && std::abs(chance - 50) <= 2,
          Fmt("%.0f brute-force mismatches; separated %.2f, 3+3 fixture %.4f, same-distribution %.2f", mismatches,
              separated, third, chance)};
}

Outcome F0Transform() {
  std::mt19937_64 gen(107);
  std::uniform_real_distribution<double> hz(80.0, 400.0), coin(0.0, 1.0);
  std::vector<double> contour(1000);
  for (auto &v : contour) v = coin(gen) < 0.3 ? 0.0 : hz(gen);
  auto src = ComputeLogF0Stats(contour);
  LogF0Stats target{std::log(140.0), 0.12, 1};
  auto mapped = ComputeLogF0Stats(TransformLogF0(contour, src, target));
  const double stats_err = std::max(std::abs(mapped.mean - target.mean), std::abs(mapped.std - target.std));
  auto same = TransformLogF0(contour, src, src);
  double identity_err = 0;
  for (std::size_t i = 0; i < contour.size(); ++i)
    identity_err = std::max(identity_err, std::abs(same[i] - contour[i]) / std::max(contour[i], 1.0));
  const double hand = TransformLogF0(std::vector<double>{std::exp(5.5)}, {5.3, 0.2, 10}, {4.8, 0.1, 10})[0];
  return {stats_err < 1e-9 && identity_err < 1e-9 && std::abs(hand - 134.29) <= 0.01,
          Fmt("stats error %.2e, identity relative error %.2e, hand case %.4f Hz", stats_err, identity_err, hand)};
}

Outcome PipelineRoundTrip() {
  std::vector<double> x(kDefaultSampleRate, 0.0);
  for (int h = 1; h <= 8; ++h) {
    auto partial = oracle::Sine(220.0 * h, 1.0, kDefaultSampleRate, 0.4 / h);
    for (std::size_t n = 0; n < x.size(); ++n) x[n] += partial[n];
  }
  WorldVocoder voc;
  auto analysis = Analyze(voc, Waveform{x, kDefaultSampleRate}, 5.0, "tone");
  auto y = Synthesize(voc, analysis);
  auto again = Analyze(voc, y, 5.0, "resynthesized");
  std::vector<double> voiced;
  for (double f : again.f0)
    if (f > 0) voiced.push_back(f);
  const double dur_ms = std::abs(y.duration_seconds() - 1.0) * 1000;
  const double median = voiced.empty() ? 0.0 : oracle::Median(voiced);
  const double rel = std::abs(median - 220.0) / 220.0;
  return {dur_ms <= 5.0 && rel < 0.02,
          Fmt("duration error %.2f ms, median f0 %.2f Hz (%.2f%% off) over %.0f voiced frames", dur_ms, median,
              rel * 100, static_cast<double>(voiced.size()))};
}

// Converts a normalized [D, T] source to speaker `target` using reference
// `ref`, edge-padding to the generator's time multiple.
torch::Tensor ConvertNormalized(train::Models &m, const torch::Tensor &src, const torch::Tensor &ref,
                                int64_t target) {
  namespace F = torch::nn::functional;
  const auto p = m.g->config().time_multiple();
  const auto frames = src.size(1), padded = (frames + p - 1) / p * p;
  const auto left = (padded - frames) / 2;
  auto x = F::pad(src.unsqueeze(0), F::PadFuncOptions({left, padded - frames - left}).mode(torch::kReplicate));
  auto e = m.e(ref.unsqueeze(0).unsqueeze(0), torch::tensor({target}, torch::kLong));
  return m.g(x.unsqueeze(1), e).squeeze(0).squeeze(0).narrow(1, left, frames);
}

Outcome ToySmoke() {
  constexpr int kDim = 37, kIterations = 1000;
  const auto start = std::chrono::steady_clock::now();
  auto utts = toy::MakeUtterances(2, 3, kDim, 200, 108);
  auto norm = train::FeatureBank::FitNormalizer(utts);
  train::FeatureBank bank(utts, norm);
  auto mc = toy::SmallModels(kDim, 2);
  train::TrainingConfig tc;
  tc.batch_size = 8;
  tc.segment_frames = 64;
  tc.total_iterations = kIterations;
  tc.checkpoint_every = 0;
  tc.seed = 108;
  train::ConfigureDeterminism(tc);
  auto state = train::TrainingState::Create(mc, tc, norm, toy::SpeakerNames(2), {});

  std::vector<double> spk;
  for (int i = 0; i < kIterations; ++i) {
    auto batch = train::SampleBatch(bank, tc.batch_size, tc.segment_frames, state.rng);
    spk.push_back(train::TrainStep(batch, state.models, state.optimizers, tc).components.spk_rec);
  }
  double early = 0, late = 0;
  for (int i = 0; i < 10; ++i) {
    early += spk[i] / 10;
    late += spk[kIterations - 10 + i] / 10;
  }

  std::vector<eval::LabeledFeatures> real;
  for (const auto &u : bank.utterances()) real.push_back({u.utt_id, u.speaker, u.mcep});
  eval::ClassifierConfig cc;
  cc.channels = 32;
  cc.embedding_dim = 32;
  cc.iterations = 200;
  cc.batch_size = 8;
  cc.segment_frames = 64;
  cc.seed = 108;
  auto clf = eval::TrainSpeakerClassifier(real, cc);
  const double real_acc = eval::IdentificationAccuracy(clf, real);

  torch::NoGradGuard no_grad;
  state.models.Train(false);
  std::vector<torch::Tensor> reference(2);
  for (const auto &u : bank.utterances())
    if (!reference[u.speaker].defined() || u.mcep.size(1) > reference[u.speaker].size(1)) reference[u.speaker] = u.mcep;
  std::vector<eval::LabeledFeatures> converted, cross;
  for (const auto &u : bank.utterances())
    for (int64_t t = 0; t < 2; ++t) {
      eval::LabeledFeatures c{u.utt_id + "->" + std::to_string(t), t,
                              ConvertNormalized(state.models, u.mcep, reference[t], t)};
      converted.push_back(c);
      if (t != u.speaker) cross.push_back(c);
    }
  const double acc = eval::IdentificationAccuracy(clf, converted);
  const double cross_acc = eval::IdentificationAccuracy(clf, cross);
  const double minutes = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / 60;
  return {late <= 0.5 * early && acc >= 80.0 && minutes < 15.0,
          Fmt("spk_rec %.4f -> %.4f (%.1f%%); ", early, late, 100 * late / early) +
              Fmt("ACC %.1f%% (cross-speaker %.1f%%, real %.1f%%); ", acc, cross_acc, real_acc) +
              Fmt("%.0f iterations in %.1f min", kIterations, minutes)};
}

Outcome Resumability() {
  constexpr int kDim = 37;
  auto bank = toy::MakeBank(2, 3, kDim, 120, 109);
  auto mc = toy::SmallModels(kDim, 2);
  train::TrainingConfig tc;
  tc.batch_size = 8;
  tc.segment_frames = 64;
  tc.total_iterations = 100;
  tc.checkpoint_every = 50;
  tc.seed = 109;
  auto full_dir = TempDir("full");
  auto full = train::LoadCheckpoint(train::Train(bank, mc, tc, toy::SpeakerNames(2), {}, {full_dir, {}, {}}));
  auto split_dir = TempDir("split");
  auto first = tc;
  first.total_iterations = 50;
  train::Train(bank, mc, first, toy::SpeakerNames(2), {}, {split_dir, {}, {}});
  auto resumed = train::LoadCheckpoint(
      train::Train(bank, mc, tc, toy::SpeakerNames(2), {}, {split_dir, split_dir / "final.wvc", {}}));
  auto a = full.models.NamedParameters(), b = resumed.models.NamedParameters();
  int differing = 0;
  for (std::size_t i = 0; i < a.size(); ++i) differing += a[i].first != b[i].first || !torch::equal(a[i].second, b[i].second);
  return {differing == 0 && a.size() == b.size() && resumed.iteration == 100,
          Fmt("%.0f of %.0f parameter tensors differ after 50+50 vs 100 iterations", differing,
              static_cast<double>(a.size()))};
}

Outcome Subsetting() {
  auto root = TempDir("corpus");
  for (int s = 0; s < 10; ++s) {
    char spk[16];
    std::snprintf(spk, sizeof(spk), "p%03d", s);
    fs::create_directories(root / spk);
    for (int f = 0; f < 20; ++f) {
      char stem[32];
      std::snprintf(stem, sizeof(stem), "%s_%03d.wav", spk, f);
      WriteWav(root / spk / stem, Waveform{oracle::Sine(120.0 + 10 * s + f, 0.02, 22050, 0.3), 22050});
    }
  }
  auto full = data::BuildManifest(root);
  auto a = data::SubsetLowResource(full, 2, 5, 110);
  auto b = data::SubsetLowResource(full, 2, 5, 110);
  std::map<std::string, int> per_speaker;
  for (const auto &r : a.records) ++per_speaker[r.speaker];
  bool balanced = per_speaker.size() == 2;
  for (const auto &[spk, n] : per_speaker) balanced = balanced && n == 5;
  a.Save(root / "subset.jsonl");
  auto loaded = data::Manifest::Load(root / "subset.jsonl");
  const bool provenance = loaded.provenance.subsets.size() == 1 &&
                          data::Rederive(loaded.provenance).ToJsonLines() == a.ToJsonLines();
  return {a.records.size() == 10 && balanced && a.ToJsonLines() == b.ToJsonLines() && provenance,
          Fmt("%.0f records, %.0f speakers, ", static_cast<double>(a.records.size()),
              static_cast<double>(per_speaker.size())) +
              (a.ToJsonLines() == b.ToJsonLines() ? "seeded rerun identical, " : "seeded rerun differs, ") +
              (provenance ? "provenance round trip reproduces the subset" : "provenance round trip differs")};
}

}  // namespace

int main() {
  SetLogLevel(LogLevel::kError);
  torch::set_num_threads(1);
  struct Criterion {
    std::string name;
    std::function<Outcome()> check;
    double max_seconds = 0;  // 0: no limit
  };
  const std::vector<Criterion> criteria = {
      {"W-AdaIN demodulation invariant (1000 draws, float32)", DemodulationInvariant, 10},
      {"W-AdaIN positive-scale invariance (100 draws)", ScaleInvariance},
      {"W-AdaIN scalar-loop oracle equivalence (100 shapes)", ModulateOracle},
      {"gradient check: wadain_conv, glu, bottleneck block", GradientCheck, 60},
      {"generator contract 8x1x37x256 (100 draws)", GeneratorContract},
      {"loss unit suite", LossSuite},
      {"EER oracle", EerOracle},
      {"log-F0 transform", F0Transform},
      {"pipeline round trip on a 1 s 220 Hz tone", PipelineRoundTrip},
      {"toy overfit smoke (2 speakers x 3 utterances)", ToySmoke, 15 * 60},
      {"resumability (50+50 vs 100 iterations)", Resumability},
      {"low-resource subsetting N=2, M=5", Subsetting},
  };
  int failures = 0;
  for (const auto &[name, check, max_seconds] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (max_seconds > 0 && seconds >= max_seconds) {
      o.pass = false;
      o.detail += Fmt("; over the %.0f s limit", max_seconds);
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << name << ": " << o.detail << " [" << Fmt("%.1f", seconds)
              << " s]" << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
