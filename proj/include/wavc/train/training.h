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

#ifndef WAVC_TRAIN_TRAINING_H_
#define WAVC_TRAIN_TRAINING_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>
#include <torch/torch.h>

#include "wavc/acoustic/f0.h"
#include "wavc/common/rng.h"
#include "wavc/data/manifest.h"
#include "wavc/io/tensor_container.h"
#include "wavc/nn/networks.h"
#include "wavc/train/objectives.h"

namespace wavc::train {

inline constexpr const char *kCheckpointFormat = "wavc-checkpoint";
inline constexpr int kCheckpointVersion = 1;

struct TrainingConfig {
  std::int64_t batch_size = 8;
  std::int64_t segment_frames = 256;
  double g_lr = 2e-4;
  double d_lr = 1e-4;
  double e_lr = 1e-4;
  double adam_beta1 = 0.5;
  double adam_beta2 = 0.999;
  std::int64_t total_iterations = 250000;
  std::int64_t checkpoint_every = 10000;
  std::uint64_t seed = 0;
  /// Single-threaded, deterministic kernels: bit-identical reruns and resumes.
  bool deterministic = true;
  LossWeights weights;

  /// Throws ConfigError; segment_frames must be a multiple of `time_multiple`.
  void Validate(std::int64_t time_multiple) const;
  bool operator==(const TrainingConfig &) const = default;
};
void to_json(nlohmann::json &j, const TrainingConfig &c);
void from_json(const nlohmann::json &j, TrainingConfig &c);

struct ModelConfig {
  nn::GeneratorConfig generator;
  nn::DiscriminatorConfig discriminator;
  nn::SpeakerEncoderConfig encoder;

  /// Sets mcep_dim / n_speakers / embedding_dim consistently across the three.
  void Harmonize(std::int64_t mcep_dim, std::int64_t n_speakers);
  void Validate() const;
  bool operator==(const ModelConfig &) const = default;
};
void to_json(nlohmann::json &j, const ModelConfig &c);
void from_json(const nlohmann::json &j, ModelConfig &c);

/// Global per-coefficient standardization of MCEPs.
struct FeatureNormalizer {
  std::vector<float> mean;
  std::vector<float> std;

  /// [.., D, T] -> standardized along D.
  torch::Tensor Normalize(const torch::Tensor &mcep) const;
  torch::Tensor Denormalize(const torch::Tensor &mcep) const;
  bool empty() const { return mean.empty(); }
  bool operator==(const FeatureNormalizer &) const = default;
};

/// One training utterance held in memory.
struct BankUtterance {
  std::string utt_id;
  std::int64_t speaker = 0;
  torch::Tensor mcep;  // float32 [D, T], already normalized
};

/// In-memory normalized features for batch sampling.
class FeatureBank {
 public:
  FeatureBank() = default;
  /// Takes raw (unnormalized) [D, T] features and normalizes them with `norm`.
  FeatureBank(std::vector<BankUtterance> raw, FeatureNormalizer norm);

  /// Loads training-split records of `m`; throws InvalidArgument naming the
  /// utterance if one has no feature cache entry.
  static FeatureBank FromManifest(const data::Manifest &m);

  /// Per-coefficient mean/std over every frame of `utts`.
  static FeatureNormalizer FitNormalizer(const std::vector<BankUtterance> &utts);

  const std::vector<BankUtterance> &utterances() const { return utts_; }
  const FeatureNormalizer &normalizer() const { return norm_; }
  std::int64_t mcep_dim() const;
  std::int64_t n_speakers() const;
  bool empty() const { return utts_.empty(); }

 private:
  std::vector<BankUtterance> utts_;
  FeatureNormalizer norm_;
};

struct TrainBatch {
  torch::Tensor x_s;  // [B, 1, D, T]
  torch::Tensor s_x;  // int64 [B]
  torch::Tensor x_t;
  torch::Tensor s_y;
  std::vector<std::string> src_ids, tgt_ids;
};

/// `segment` frames starting at `start`, wrapping around when the utterance
/// is shorter than the segment.
torch::Tensor CropWrapped(const torch::Tensor &mcep, std::int64_t start, std::int64_t segment);

/// Independently draws source and target utterances uniformly and crops a
/// random window from each.
TrainBatch SampleBatch(const FeatureBank &bank, std::int64_t batch_size, std::int64_t segment, Rng &rng);

struct Models {
  nn::Generator g{nullptr};
  nn::Discriminator d{nullptr};
  nn::SpeakerEncoder e{nullptr};

  /// Builds all three networks; parameters are drawn from torch's generator
  /// after seeding it with `seed`.
  static Models Create(const ModelConfig &config, std::uint64_t seed);
  void Train(bool on = true);
  /// "generator.<name>", "discriminator.<name>", "encoder.<name>".
  std::vector<std::pair<std::string, torch::Tensor>> NamedParameters() const;
};

struct Optimizers {
  std::unique_ptr<torch::optim::Adam> g, d, e;
  static Optimizers Create(Models &models, const TrainingConfig &cfg);
};

/// One discriminator update followed by one joint generator + encoder
/// update. Throws TrainingError naming the first non-finite component.
LossReport TrainStep(const TrainBatch &batch, Models &models, Optimizers &opt, const TrainingConfig &cfg);

/// Everything needed to continue or use a run.
struct TrainingState {
  ModelConfig model_config;
  TrainingConfig training_config;
  Models models;
  Optimizers optimizers;
  std::int64_t iteration = 0;
  Rng rng;
  FeatureNormalizer normalizer;
  std::vector<std::string> speakers;
  std::map<std::string, LogF0Stats> f0_stats;

  static TrainingState Create(const ModelConfig &mc, const TrainingConfig &tc, FeatureNormalizer norm,
                              std::vector<std::string> speakers, std::map<std::string, LogF0Stats> f0_stats);
};

/// Applies process-wide determinism settings for `cfg`.
void ConfigureDeterminism(const TrainingConfig &cfg);

void SaveCheckpoint(const std::filesystem::path &path, const TrainingState &state);
/// Loads everything; optimizer state is restored as well.
TrainingState LoadCheckpoint(const std::filesystem::path &path);
/// Throws ConfigError listing the differing sections when `stored` and the
/// requested configuration disagree (iteration budget and checkpoint period
/// may change).
void CheckResumeCompatible(const TrainingState &stored, const ModelConfig &mc, const TrainingConfig &tc);

struct TrainOptions {
  std::filesystem::path out_dir;
  std::filesystem::path resume_from;  // empty: start fresh
  /// Called after every iteration; may be empty.
  std::function<void(const LossReport &)> on_report;
};

/// Runs until training_config.total_iterations, appending one JSON line per
/// iteration to out_dir/train_log.jsonl and writing out_dir/ckpt_<iter>.wvc
/// every checkpoint_every iterations plus out_dir/final.wvc. Returns the
/// final checkpoint path.
std::filesystem::path Train(const FeatureBank &bank, const ModelConfig &mc, const TrainingConfig &tc,
                            const std::vector<std::string> &speakers,
                            const std::map<std::string, LogF0Stats> &f0_stats, const TrainOptions &options);

}  // namespace wavc::train

#endif  // WAVC_TRAIN_TRAINING_H_
