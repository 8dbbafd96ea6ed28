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

#ifndef WAVC_NN_NETWORKS_H_
#define WAVC_NN_NETWORKS_H_

#include <optional>
#include <vector>

#include <json.hpp>
#include <torch/torch.h>

#include "wavc/nn/norm_layers.h"

namespace wavc::nn {

// All networks take MCEP batches laid out as [B, 1, D, T]: the coefficient
// axis is the image "height" and time the "width".

struct GeneratorConfig {
  int64_t mcep_dim = 37;              // order + 1
  int64_t base_channels = 64;         // channels after the first downsample block
  int64_t bottleneck_channels = 256;
  int64_t n_bottleneck_blocks = 9;
  int64_t embedding_dim = 128;
  std::vector<int64_t> downsample_factors{2, 2};  // per block, applied to D and T
  int64_t kernel_size_2d = 5;
  int64_t kernel_size_1d = 5;
  // Initial W-AdaIN affine maps. gamma only reaches the demodulated kernel
  // through its sign, so it starts centered on zero.
  double affine_weight_std = 0.3;
  double affine_gamma_bias = 0.0;
  double eps = kNormEps;

  int64_t time_multiple() const;  // T must be a multiple of this
  std::vector<int64_t> down_channels() const;
  /// Throws ConfigError when a value is out of range.
  void Validate() const;
  bool operator==(const GeneratorConfig &) const = default;
};

struct DiscriminatorConfig {
  int64_t mcep_dim = 37;
  std::vector<int64_t> channels{32, 64, 128, 128};  // the 4 shared trunk layers
  int64_t n_speakers = 2;
  int64_t head_kernel = 3;

  void Validate() const;
  bool operator==(const DiscriminatorConfig &) const = default;
};

struct SpeakerEncoderConfig {
  int64_t mcep_dim = 37;
  int64_t channels = 128;  // trunk width; pooled statistics are 2x this
  int64_t embedding_dim = 128;
  int64_t n_speakers = 2;

  void Validate() const;
  bool operator==(const SpeakerEncoderConfig &) const = default;
};

void to_json(nlohmann::json &j, const GeneratorConfig &c);
void from_json(const nlohmann::json &j, GeneratorConfig &c);
void to_json(nlohmann::json &j, const DiscriminatorConfig &c);
void from_json(const nlohmann::json &j, DiscriminatorConfig &c);
void to_json(nlohmann::json &j, const SpeakerEncoderConfig &c);
void from_json(const nlohmann::json &j, SpeakerEncoderConfig &c);

/// Per-channel mean and population std over the last (time) axis,
/// concatenated: [B, C, T] -> [B, 2C].
torch::Tensor StatisticPooling(const torch::Tensor &h);

/// Throws InvalidArgument unless every id is in [0, n).
void CheckSpeakerIds(const torch::Tensor &ids, int64_t n);

/// One residual bottleneck block: x + GLU(gain * WAdaINConv1d(x, e) + bias),
/// gain = 1/sqrt(channels * kernel) so the unit-std demodulated kernel keeps
/// activations at unit scale.
class BottleneckBlockImpl : public torch::nn::Module {
 public:
  BottleneckBlockImpl(int64_t channels, int64_t kernel_size, int64_t embedding_dim,
                      double affine_weight_std, double eps, double gamma_bias = 1.0);
  torch::Tensor forward(const torch::Tensor &x, const torch::Tensor &embedding);

  WAdaINConv1d conv{nullptr};
  torch::Tensor bias;

 private:
  double gain_;
};
TORCH_MODULE(BottleneckBlock);

/// 2-1-2 generator: 2D downsampling (conv + IN + GLU), 1D W-AdaIN
/// bottleneck blocks, 2D upsampling (transposed conv + IN + GLU).
class GeneratorImpl : public torch::nn::Module {
 public:
  explicit GeneratorImpl(GeneratorConfig config);

  /// x: [B, 1, D, T] with T a multiple of time_multiple(); embedding: [B, E].
  torch::Tensor forward(const torch::Tensor &x, const torch::Tensor &embedding);

  const GeneratorConfig &config() const { return config_; }
  std::vector<BottleneckBlock> &blocks() { return blocks_; }

 private:
  GeneratorConfig config_;
  int64_t padded_dim_;
  torch::nn::ModuleList down_{nullptr};
  torch::nn::Conv1d to_bottleneck_{nullptr};
  std::vector<BottleneckBlock> blocks_;
  torch::nn::Conv1d from_bottleneck_{nullptr};
  torch::nn::ModuleList up_{nullptr};
  torch::nn::Conv2d out_{nullptr};
};
TORCH_MODULE(Generator);

/// Shared 4-layer trunk followed by one output head per speaker; each
/// sample's score comes from the head selected by its speaker id.
class DiscriminatorImpl : public torch::nn::Module {
 public:
  explicit DiscriminatorImpl(DiscriminatorConfig config);

  /// x: [B, 1, D, T], speaker_ids: int64 [B] -> scores [B].
  torch::Tensor forward(const torch::Tensor &x, const torch::Tensor &speaker_ids);
  torch::Tensor Trunk(const torch::Tensor &x);

  const DiscriminatorConfig &config() const { return config_; }

  torch::nn::ModuleList trunk{nullptr};
  torch::Tensor head_weight;  // [N, C, k, k]
  torch::Tensor head_bias;    // [N]

 private:
  DiscriminatorConfig config_;
};
TORCH_MODULE(Discriminator);

/// Speaker encoder: 1D trunk over time, statistic pooling, and speaker-
/// conditioned linear heads producing the embedding.
class SpeakerEncoderImpl : public torch::nn::Module {
 public:
  explicit SpeakerEncoderImpl(SpeakerEncoderConfig config);

  /// x: [B, 1, D, T]. With speaker ids, sample b uses head ids[b]; without,
  /// the average of all heads is used.
  torch::Tensor forward(const torch::Tensor &x, const std::optional<torch::Tensor> &speaker_ids);
  torch::Tensor Trunk(const torch::Tensor &x);                 // [B, C, T]
  torch::Tensor Heads(const torch::Tensor &pooled,
                      const std::optional<torch::Tensor> &speaker_ids);  // [B, E]

  const SpeakerEncoderConfig &config() const { return config_; }

  torch::nn::ModuleList trunk{nullptr};
  torch::Tensor head_weight;  // [N, E, 2C]
  torch::Tensor head_bias;    // [N, E]

 private:
  SpeakerEncoderConfig config_;
};
TORCH_MODULE(SpeakerEncoder);

}  // namespace wavc::nn

#endif  // WAVC_NN_NETWORKS_H_
