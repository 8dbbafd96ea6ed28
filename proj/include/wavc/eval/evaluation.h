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

// Objective evaluation of converted speech: an x-vector style speaker
// classifier, identification accuracy and verification EER.

#ifndef WAVC_EVAL_EVALUATION_H_
#define WAVC_EVAL_EVALUATION_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>
#include <torch/torch.h>

namespace wavc::eval {

/// An utterance's MCEPs ([D, T], unnormalized) with a speaker label. For
/// converted speech the label is the intended target speaker.
struct LabeledFeatures {
  std::string id;
  std::int64_t speaker = 0;
  torch::Tensor mcep;
};

/// Anything that can produce speaker posteriors and an embedding.
class SpeakerScorer {
 public:
  virtual ~SpeakerScorer() = default;
  virtual std::int64_t n_speakers() const = 0;
  /// mcep [D, T] -> posteriors [N] (rows sum to 1).
  virtual torch::Tensor Posteriors(const torch::Tensor &mcep) = 0;
  /// mcep [D, T] -> embedding [E].
  virtual torch::Tensor Embedding(const torch::Tensor &mcep) = 0;
};

struct ClassifierConfig {
  std::int64_t channels = 64;
  std::int64_t embedding_dim = 64;
  std::int64_t iterations = 300;
  std::int64_t batch_size = 16;
  std::int64_t segment_frames = 64;
  double lr = 1e-3;
  std::uint64_t seed = 0;

  void Validate() const;
};
void to_json(nlohmann::json &j, const ClassifierConfig &c);
void from_json(const nlohmann::json &j, ClassifierConfig &c);

/// Frame-level TDNN (ReLU) -> statistic pooling -> embedding layer -> softmax.
class XVectorNetImpl : public torch::nn::Module {
 public:
  XVectorNetImpl(std::int64_t mcep_dim, std::int64_t channels, std::int64_t embedding_dim,
                 std::int64_t n_speakers);
  /// x [B, D, T] -> embedding [B, E] (pre-activation of the embedding layer).
  torch::Tensor Embed(const torch::Tensor &x);
  /// x [B, D, T] -> logits [B, N].
  torch::Tensor forward(const torch::Tensor &x);

  torch::nn::Conv1d tdnn1{nullptr}, tdnn2{nullptr}, tdnn3{nullptr};
  torch::nn::Linear embedding{nullptr}, output{nullptr};
};
TORCH_MODULE(XVectorNet);

class SpeakerClassifier : public SpeakerScorer {
 public:
  SpeakerClassifier(XVectorNet net, torch::Tensor mean, torch::Tensor std);

  std::int64_t n_speakers() const override;
  torch::Tensor Posteriors(const torch::Tensor &mcep) override;
  torch::Tensor Embedding(const torch::Tensor &mcep) override;

  XVectorNet &net() { return net_; }

 private:
  torch::Tensor Prepare(const torch::Tensor &mcep) const;

  XVectorNet net_;
  torch::Tensor mean_, std_;  // [D, 1]
};

/// Trains on random crops of `data` (labels 0..N-1, N >= 2 distinct).
/// Throws InvalidArgument for fewer than two speakers.
SpeakerClassifier TrainSpeakerClassifier(const std::vector<LabeledFeatures> &data, const ClassifierConfig &cfg);

/// Percentage of utterances whose argmax posterior is their label.
double IdentificationAccuracy(SpeakerScorer &scorer, const std::vector<LabeledFeatures> &data);

struct TrialScoreSet {
  std::vector<double> scores;
  std::vector<bool> labels;  // true: target trial
  std::vector<std::string> names;

  void Add(double score, bool target, std::string name);
  /// Throws InvalidArgument unless lengths agree and both classes occur.
  void Validate() const;
};

double CosineSimilarity(const torch::Tensor &a, const torch::Tensor &b);

/// Every converted utterance against every enrolled speaker's mean
/// embedding; the trial is a target trial when the speaker is the intended
/// one. Trial names are "<converted id>|<speaker index>".
TrialScoreSet ScoreTrials(SpeakerScorer &scorer, const std::vector<LabeledFeatures> &converted,
                          const std::vector<LabeledFeatures> &enrollment);

/// Equal error rate in percent. Thresholds sweep the sorted unique scores
/// plus one above the maximum; FAR(t) = share of non-target scores >= t,
/// FRR(t) = share of target scores < t. Returns the rate where FAR = FRR,
/// interpolating linearly between the two thresholds that bracket the
/// crossing.
double ComputeEer(const TrialScoreSet &trials);

struct EvalReport {
  double acc = 0.0;
  double eer = 0.0;
  std::int64_t n_converted = 0;
  std::vector<std::string> speakers;
  std::vector<std::vector<std::int64_t>> confusion;  // [intended][predicted]
  std::string condition;
  std::string protocol;

  nlohmann::json ToJson() const;
  /// Plain-text table with ACC and EER columns.
  std::string Table() const;
};

/// Accuracy, confusion counts and EER for `converted` (labels = intended
/// targets) using `enrollment` for verification.
EvalReport Evaluate(SpeakerScorer &scorer, const std::vector<LabeledFeatures> &converted,
                    const std::vector<LabeledFeatures> &enrollment, std::vector<std::string> speakers,
                    std::string condition = "");

}  // namespace wavc::eval

#endif  // WAVC_EVAL_EVALUATION_H_
