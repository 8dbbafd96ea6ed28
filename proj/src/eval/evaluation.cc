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

#include "wavc/eval/evaluation.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "wavc/common/error.h"
#include "wavc/common/rng.h"
#include "wavc/nn/networks.h"
#include "wavc/train/training.h"

namespace wavc::eval {
namespace {

using nlohmann::json;

void Require(bool ok, const std::string &msg) {
  if (!ok) throw ConfigError(msg);
}

void CheckFeatures(const LabeledFeatures &f) {
  if (!f.mcep.defined() || f.mcep.dim() != 2 || f.mcep.size(1) < 1)
    throw ShapeError("utterance '" + f.id + "': features must be [D, T]");
}

}  // namespace

void ClassifierConfig::Validate() const {
  Require(channels >= 1 && embedding_dim >= 1, "classifier sizes must be >= 1");
  Require(iterations >= 0, "classifier.iterations must be >= 0");
  Require(batch_size >= 1 && segment_frames >= 2, "classifier batch/segment too small");
  Require(lr > 0, "classifier.lr must be > 0");
}

void to_json(json &j, const ClassifierConfig &c) {
  j = {{"channels", c.channels},     {"embedding_dim", c.embedding_dim},   {"iterations", c.iterations},
       {"batch_size", c.batch_size}, {"segment_frames", c.segment_frames}, {"lr", c.lr},
       {"seed", c.seed}};
}

void from_json(const json &j, ClassifierConfig &c) {
  j.at("channels").get_to(c.channels);
  j.at("embedding_dim").get_to(c.embedding_dim);
  j.at("iterations").get_to(c.iterations);
  j.at("batch_size").get_to(c.batch_size);
  j.at("segment_frames").get_to(c.segment_frames);
  j.at("lr").get_to(c.lr);
  j.at("seed").get_to(c.seed);
}

XVectorNetImpl::XVectorNetImpl(std::int64_t mcep_dim, std::int64_t channels, std::int64_t embedding_dim,
                               std::int64_t n_speakers) {
  using torch::nn::Conv1dOptions;
  tdnn1 = register_module("tdnn1", torch::nn::Conv1d(Conv1dOptions(mcep_dim, channels, 5).padding(2)));
  tdnn2 = register_module("tdnn2", torch::nn::Conv1d(Conv1dOptions(channels, channels, 3).dilation(2).padding(2)));
  tdnn3 = register_module("tdnn3", torch::nn::Conv1d(Conv1dOptions(channels, channels, 1)));
  embedding = register_module("embedding", torch::nn::Linear(2 * channels, embedding_dim));
  output = register_module("output", torch::nn::Linear(embedding_dim, n_speakers));
}

torch::Tensor XVectorNetImpl::Embed(const torch::Tensor &x) {
  auto h = torch::relu(tdnn1(x));
  h = torch::relu(tdnn2(h));
  h = torch::relu(tdnn3(h));
  return embedding(nn::StatisticPooling(h));
}

torch::Tensor XVectorNetImpl::forward(const torch::Tensor &x) { return output(torch::relu(Embed(x))); }

SpeakerClassifier::SpeakerClassifier(XVectorNet net, torch::Tensor mean, torch::Tensor std)
    : net_(std::move(net)), mean_(std::move(mean)), std_(std::move(std)) {}

std::int64_t SpeakerClassifier::n_speakers() const { return net_->output->options.out_features(); }

torch::Tensor SpeakerClassifier::Prepare(const torch::Tensor &mcep) const {
  if (mcep.dim() != 2 || mcep.size(0) != mean_.size(0))
    throw ShapeError("SpeakerClassifier: expected [" + std::to_string(mean_.size(0)) + ", T] features");
  return ((mcep.to(torch::kFloat) - mean_) / std_).unsqueeze(0);
}

torch::Tensor SpeakerClassifier::Posteriors(const torch::Tensor &mcep) {
  torch::NoGradGuard no_grad;
  return torch::softmax(net_->forward(Prepare(mcep)), 1).squeeze(0);
}

torch::Tensor SpeakerClassifier::Embedding(const torch::Tensor &mcep) {
  torch::NoGradGuard no_grad;
  return net_->Embed(Prepare(mcep)).squeeze(0);
}

SpeakerClassifier TrainSpeakerClassifier(const std::vector<LabeledFeatures> &data, const ClassifierConfig &cfg) {
  cfg.Validate();
  std::set<std::int64_t> labels;
  for (const auto &f : data) {
    CheckFeatures(f);
    labels.insert(f.speaker);
  }
  if (labels.size() < 2) throw InvalidArgument("speaker classifier needs at least 2 speakers");
  const std::int64_t n = *labels.rbegin() + 1;
  if (*labels.begin() < 0) throw InvalidArgument("negative speaker label");
  const std::int64_t d = data.front().mcep.size(0);

  std::vector<train::BankUtterance> raw;
  for (const auto &f : data) raw.push_back({f.id, f.speaker, f.mcep.to(torch::kFloat)});
  auto norm = train::FeatureBank::FitNormalizer(raw);
  auto mean = torch::tensor(norm.mean).view({d, 1});
  auto std = torch::tensor(norm.std).view({d, 1});
  std::vector<torch::Tensor> normalized;
  for (const auto &f : data) normalized.push_back((f.mcep.to(torch::kFloat) - mean) / std);

  torch::manual_seed(cfg.seed);
  XVectorNet net(d, cfg.channels, cfg.embedding_dim, n);
  torch::optim::Adam opt(net->parameters(), torch::optim::AdamOptions(cfg.lr));
  Rng rng(cfg.seed);
  for (std::int64_t it = 0; it < cfg.iterations; ++it) {
    std::vector<torch::Tensor> xs;
    std::vector<std::int64_t> ys;
    for (std::int64_t b = 0; b < cfg.batch_size; ++b) {
      const auto i = rng.UniformIndex(data.size());
      const auto t = normalized[i].size(1);
      const auto seg = cfg.segment_frames;
      const auto start = static_cast<std::int64_t>(t >= seg ? rng.UniformIndex(t - seg + 1) : rng.UniformIndex(t));
      xs.push_back(train::CropWrapped(normalized[i], start, seg));
      ys.push_back(data[i].speaker);
    }
    auto loss = torch::nn::functional::cross_entropy(net->forward(torch::stack(xs)), torch::tensor(ys, torch::kLong));
    opt.zero_grad();
    loss.backward();
    opt.step();
  }
  net->eval();
  return SpeakerClassifier(net, mean, std);
}

double IdentificationAccuracy(SpeakerScorer &scorer, const std::vector<LabeledFeatures> &data) {
  if (data.empty()) throw InvalidArgument("no utterances to score");
  std::int64_t correct = 0;
  for (const auto &f : data) {
    CheckFeatures(f);
    if (scorer.Posteriors(f.mcep).argmax().item<std::int64_t>() == f.speaker) ++correct;
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(data.size());
}

void TrialScoreSet::Add(double score, bool target, std::string name) {
  scores.push_back(score);
  labels.push_back(target);
  names.push_back(std::move(name));
}

void TrialScoreSet::Validate() const {
  if (scores.size() != labels.size() || (!names.empty() && names.size() != scores.size()))
    throw InvalidArgument("trial scores, labels and names differ in length");
  const auto targets = std::count(labels.begin(), labels.end(), true);
  if (targets == 0 || targets == static_cast<std::ptrdiff_t>(labels.size()))
    throw InvalidArgument("EER needs at least one target and one non-target trial");
  for (double s : scores)
    if (!std::isfinite(s)) throw InvalidArgument("non-finite trial score");
}

double CosineSimilarity(const torch::Tensor &a, const torch::Tensor &b) {
  auto x = a.to(torch::kDouble).flatten();
  auto y = b.to(torch::kDouble).flatten();
  const double denom = (x.norm() * y.norm()).item<double>();
  if (denom == 0.0) return 0.0;
  return (x.dot(y)).item<double>() / denom;
}

TrialScoreSet ScoreTrials(SpeakerScorer &scorer, const std::vector<LabeledFeatures> &converted,
                          const std::vector<LabeledFeatures> &enrollment) {
  std::map<std::int64_t, std::vector<torch::Tensor>> enrolled;
  for (const auto &f : enrollment) {
    CheckFeatures(f);
    enrolled[f.speaker].push_back(scorer.Embedding(f.mcep));
  }
  if (enrolled.empty()) throw InvalidArgument("no enrollment utterances");
  std::map<std::int64_t, torch::Tensor> means;
  for (const auto &[spk, embs] : enrolled) means[spk] = torch::stack(embs).mean(0);

  TrialScoreSet trials;
  for (const auto &f : converted) {
    CheckFeatures(f);
    auto e = scorer.Embedding(f.mcep);
    for (const auto &[spk, m] : means)
      trials.Add(CosineSimilarity(e, m), spk == f.speaker, f.id + "|" + std::to_string(spk));
  }
  return trials;
}

double ComputeEer(const TrialScoreSet &trials) {
  trials.Validate();
  std::vector<double> tar, non;
  for (std::size_t i = 0; i < trials.scores.size(); ++i)
    (trials.labels[i] ? tar : non).push_back(trials.scores[i]);
  std::sort(tar.begin(), tar.end());
  std::sort(non.begin(), non.end());
  std::vector<double> thresholds(trials.scores);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  const double nt = static_cast<double>(tar.size());
  const double nn = static_cast<double>(non.size());
  auto rates = [&](std::size_t k) {
    // k == thresholds.size() is the sentinel above every score.
    if (k == thresholds.size()) return std::pair<double, double>{0.0, 1.0};
    const double t = thresholds[k];
    const auto non_above = non.end() - std::lower_bound(non.begin(), non.end(), t);
    const auto tar_below = std::lower_bound(tar.begin(), tar.end(), t) - tar.begin();
    return std::pair<double, double>{static_cast<double>(non_above) / nn, static_cast<double>(tar_below) / nt};
  };
  // FAR - FRR is non-increasing in the threshold: 1 at the lowest, -1 past the top.
  auto [far_prev, frr_prev] = rates(0);
  for (std::size_t k = 0; k <= thresholds.size(); ++k) {
    auto [far, frr] = rates(k);
    const double diff = far - frr;
    if (diff == 0.0) return 100.0 * far;
    if (diff < 0.0) {
      const double prev = far_prev - frr_prev;
      const double w = prev / (prev - diff);
      const double far_x = far_prev + w * (far - far_prev);
      const double frr_x = frr_prev + w * (frr - frr_prev);
      return 100.0 * 0.5 * (far_x + frr_x);
    }
    far_prev = far;
    frr_prev = frr;
  }
  return 100.0 * 0.5 * (far_prev + frr_prev);  // unreachable: the sentinel has diff -1
}

json EvalReport::ToJson() const {
  return {{"acc", acc},           {"eer", eer},       {"n_converted", n_converted}, {"speakers", speakers},
          {"confusion", confusion}, {"condition", condition}, {"protocol", protocol}};
}

std::string EvalReport::Table() const {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof(line), "%-24s %8s %8s %6s\n", "condition", "ACC(%)", "EER(%)", "n");
  os << line;
  std::snprintf(line, sizeof(line), "%-24s %8.2f %8.2f %6lld\n", condition.empty() ? "-" : condition.c_str(), acc,
                eer, static_cast<long long>(n_converted));
  os << line;
  return os.str();
}

EvalReport Evaluate(SpeakerScorer &scorer, const std::vector<LabeledFeatures> &converted,
                    const std::vector<LabeledFeatures> &enrollment, std::vector<std::string> speakers,
                    std::string condition) {
  if (converted.empty()) throw InvalidArgument("empty conversion set");
  EvalReport r;
  const auto n = scorer.n_speakers();
  r.confusion.assign(n, std::vector<std::int64_t>(n, 0));
  std::int64_t correct = 0;
  for (const auto &f : converted) {
    CheckFeatures(f);
    if (f.speaker < 0 || f.speaker >= n) throw InvalidArgument(f.id + ": intended speaker out of range");
    const auto pred = scorer.Posteriors(f.mcep).argmax().item<std::int64_t>();
    ++r.confusion[f.speaker][pred];
    if (pred == f.speaker) ++correct;
  }
  r.n_converted = static_cast<std::int64_t>(converted.size());
  r.acc = 100.0 * static_cast<double>(correct) / static_cast<double>(converted.size());
  r.eer = ComputeEer(ScoreTrials(scorer, converted, enrollment));
  r.speakers = std::move(speakers);
  r.condition = std::move(condition);
  r.protocol =
      "ACC: argmax of classifier posteriors vs intended target. EER: cosine similarity of classifier "
      "embeddings between each converted utterance and every enrolled speaker's mean embedding over "
      "real (unconverted) enrollment utterances; target trial = intended speaker.";
  return r;
}

}  // namespace wavc::eval
