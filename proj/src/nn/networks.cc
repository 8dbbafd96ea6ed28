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

#include "wavc/nn/networks.h"

#include <cmath>
#include <sstream>

#include "wavc/common/error.h"

namespace wavc::nn {
namespace {

namespace F = torch::nn::functional;

std::string ShapeString(const torch::Tensor &t) {
  std::ostringstream os;
  os << t.sizes();
  return os.str();
}

void Require(bool ok, const std::string &msg) {
  if (!ok) throw ConfigError(msg);
}

void CheckInput(const torch::Tensor &x, int64_t mcep_dim, const char *who) {
  if (x.dim() != 4 || x.size(1) != 1 || x.size(2) != mcep_dim)
    throw ShapeError(std::string(who) + ": expected [B, 1, " + std::to_string(mcep_dim) +
                     ", T], got " + ShapeString(x));
}

// Conv2d -> InstanceNorm -> GLU, stride `factor` along both axes.
class DownBlockImpl : public torch::nn::Module {
 public:
  DownBlockImpl(int64_t in, int64_t out, int64_t kernel, int64_t factor) {
    conv = register_module(
        "conv", torch::nn::Conv2d(torch::nn::Conv2dOptions(in, 2 * out, kernel).stride(factor).padding(kernel / 2)));
  }
  torch::Tensor forward(const torch::Tensor &x) { return Glu(InstanceNorm(conv(x)), 1); }
  torch::nn::Conv2d conv{nullptr};
};
TORCH_MODULE(DownBlock);

// Upsampling by `factor` (transposed conv, or a plain conv when factor is 1)
// -> InstanceNorm -> GLU.
class UpBlockImpl : public torch::nn::Module {
 public:
  UpBlockImpl(int64_t in, int64_t out, int64_t factor) {
    if (factor == 1) {
      conv = register_module("conv", torch::nn::Conv2d(torch::nn::Conv2dOptions(in, 2 * out, 3).padding(1)));
    } else {
      deconv = register_module(
          "deconv", torch::nn::ConvTranspose2d(
                        torch::nn::ConvTranspose2dOptions(in, 2 * out, 2 * factor).stride(factor).padding(factor / 2)));
    }
  }
  torch::Tensor forward(const torch::Tensor &x) {
    auto h = conv ? conv(x) : deconv(x);
    return Glu(InstanceNorm(h), 1);
  }
  torch::nn::Conv2d conv{nullptr};
  torch::nn::ConvTranspose2d deconv{nullptr};
};
TORCH_MODULE(UpBlock);

}  // namespace

int64_t GeneratorConfig::time_multiple() const {
  int64_t p = 1;
  for (auto f : downsample_factors) p *= f;
  return p;
}

std::vector<int64_t> GeneratorConfig::down_channels() const {
  std::vector<int64_t> ch;
  int64_t c = base_channels;
  for (std::size_t i = 0; i < downsample_factors.size(); ++i, c *= 2) ch.push_back(c);
  return ch;
}

void GeneratorConfig::Validate() const {
  Require(mcep_dim >= 2, "generator.mcep_dim must be >= 2");
  Require(base_channels >= 2, "generator.base_channels must be >= 2");
  Require(bottleneck_channels >= 2, "generator.bottleneck_channels must be >= 2");
  Require(n_bottleneck_blocks >= 1, "generator.n_bottleneck_blocks must be >= 1");
  Require(embedding_dim >= 1, "generator.embedding_dim must be >= 1");
  Require(!downsample_factors.empty(), "generator.downsample_factors must not be empty");
  for (auto f : downsample_factors)
    Require(f == 1 || f == 2 || f == 4, "generator.downsample_factors entries must be 1, 2 or 4");
  Require(kernel_size_2d >= 5 && kernel_size_2d % 2 == 1, "generator.kernel_size_2d must be odd and >= 5");
  Require(kernel_size_1d >= 1 && kernel_size_1d % 2 == 1, "generator.kernel_size_1d must be odd");
  Require(affine_weight_std >= 0.0, "generator.affine_weight_std must be >= 0");
  Require(eps > 0.0, "generator.eps must be > 0");
}

void DiscriminatorConfig::Validate() const {
  Require(mcep_dim >= 2, "discriminator.mcep_dim must be >= 2");
  Require(channels.size() == 4, "discriminator.channels must have 4 entries");
  for (auto c : channels) Require(c >= 1, "discriminator.channels entries must be >= 1");
  Require(n_speakers >= 1, "discriminator.n_speakers must be >= 1");
  Require(head_kernel >= 1 && head_kernel % 2 == 1, "discriminator.head_kernel must be odd");
}

void SpeakerEncoderConfig::Validate() const {
  Require(mcep_dim >= 1, "encoder.mcep_dim must be >= 1");
  Require(channels >= 1, "encoder.channels must be >= 1");
  Require(embedding_dim >= 1, "encoder.embedding_dim must be >= 1");
  Require(n_speakers >= 1, "encoder.n_speakers must be >= 1");
}

void to_json(nlohmann::json &j, const GeneratorConfig &c) {
  j = {{"mcep_dim", c.mcep_dim},
       {"base_channels", c.base_channels},
       {"bottleneck_channels", c.bottleneck_channels},
       {"n_bottleneck_blocks", c.n_bottleneck_blocks},
       {"embedding_dim", c.embedding_dim},
       {"downsample_factors", c.downsample_factors},
       {"kernel_size_2d", c.kernel_size_2d},
       {"kernel_size_1d", c.kernel_size_1d},
       {"affine_weight_std", c.affine_weight_std},
       {"affine_gamma_bias", c.affine_gamma_bias},
       {"eps", c.eps}};
}

void from_json(const nlohmann::json &j, GeneratorConfig &c) {
  j.at("mcep_dim").get_to(c.mcep_dim);
  j.at("base_channels").get_to(c.base_channels);
  j.at("bottleneck_channels").get_to(c.bottleneck_channels);
  j.at("n_bottleneck_blocks").get_to(c.n_bottleneck_blocks);
  j.at("embedding_dim").get_to(c.embedding_dim);
  j.at("downsample_factors").get_to(c.downsample_factors);
  j.at("kernel_size_2d").get_to(c.kernel_size_2d);
  j.at("kernel_size_1d").get_to(c.kernel_size_1d);
  j.at("affine_weight_std").get_to(c.affine_weight_std);
  j.at("affine_gamma_bias").get_to(c.affine_gamma_bias);
  j.at("eps").get_to(c.eps);
}

void to_json(nlohmann::json &j, const DiscriminatorConfig &c) {
  j = {{"mcep_dim", c.mcep_dim},
       {"channels", c.channels},
       {"n_speakers", c.n_speakers},
       {"head_kernel", c.head_kernel}};
}

void from_json(const nlohmann::json &j, DiscriminatorConfig &c) {
  j.at("mcep_dim").get_to(c.mcep_dim);
  j.at("channels").get_to(c.channels);
  j.at("n_speakers").get_to(c.n_speakers);
  j.at("head_kernel").get_to(c.head_kernel);
}

void to_json(nlohmann::json &j, const SpeakerEncoderConfig &c) {
  j = {{"mcep_dim", c.mcep_dim},
       {"channels", c.channels},
       {"embedding_dim", c.embedding_dim},
       {"n_speakers", c.n_speakers}};
}

void from_json(const nlohmann::json &j, SpeakerEncoderConfig &c) {
  j.at("mcep_dim").get_to(c.mcep_dim);
  j.at("channels").get_to(c.channels);
  j.at("embedding_dim").get_to(c.embedding_dim);
  j.at("n_speakers").get_to(c.n_speakers);
}

torch::Tensor StatisticPooling(const torch::Tensor &h) {
  if (h.dim() != 3) throw ShapeError("StatisticPooling: expected [B, C, T], got " + ShapeString(h));
  auto mean = h.mean(2);
  // clamp before sqrt keeps the gradient finite on constant channels
  auto var = (h - mean.unsqueeze(2)).pow(2).mean(2);
  return torch::cat({mean, var.clamp_min(1e-12).sqrt()}, 1);
}

void CheckSpeakerIds(const torch::Tensor &ids, int64_t n) {
  if (ids.dim() != 1 || ids.scalar_type() != torch::kLong)
    throw InvalidArgument("speaker ids must be an int64 vector");
  if (ids.numel() == 0) return;
  const auto lo = ids.min().item<int64_t>();
  const auto hi = ids.max().item<int64_t>();
  if (lo < 0 || hi >= n)
    throw InvalidArgument("speaker id " + std::to_string(lo < 0 ? lo : hi) + " out of range [0, " +
                          std::to_string(n) + ")");
}

BottleneckBlockImpl::BottleneckBlockImpl(int64_t channels, int64_t kernel_size, int64_t embedding_dim,
                                         double affine_weight_std, double eps, double gamma_bias)
    : gain_(1.0 / std::sqrt(static_cast<double>(channels * kernel_size))) {
  conv = register_module("conv", WAdaINConv1d(channels, 2 * channels, kernel_size, embedding_dim,
                                              affine_weight_std, eps, gamma_bias));
  bias = register_parameter("bias", torch::zeros({2 * channels}));
}

torch::Tensor BottleneckBlockImpl::forward(const torch::Tensor &x, const torch::Tensor &embedding) {
  auto h = conv(x, embedding) * gain_ + bias.view({1, -1, 1});
  return x + Glu(h, 1);
}

GeneratorImpl::GeneratorImpl(GeneratorConfig config) : config_(std::move(config)) {
  config_.Validate();
  const int64_t p = config_.time_multiple();
  padded_dim_ = (config_.mcep_dim + p - 1) / p * p;
  const auto channels = config_.down_channels();
  const auto &factors = config_.downsample_factors;

  down_ = register_module("down", torch::nn::ModuleList());
  int64_t in = 1;
  for (std::size_t i = 0; i < factors.size(); ++i) {
    down_->push_back(DownBlock(in, channels[i], config_.kernel_size_2d, factors[i]));
    in = channels[i];
  }
  const int64_t flat = channels.back() * (padded_dim_ / p);
  const int64_t bc = config_.bottleneck_channels;
  to_bottleneck_ = register_module("to_bottleneck", torch::nn::Conv1d(torch::nn::Conv1dOptions(flat, bc, 1)));
  for (int64_t i = 0; i < config_.n_bottleneck_blocks; ++i)
    blocks_.push_back(register_module("block" + std::to_string(i),
                                      BottleneckBlock(bc, config_.kernel_size_1d, config_.embedding_dim,
                                                      config_.affine_weight_std, config_.eps,
                                                      config_.affine_gamma_bias)));
  from_bottleneck_ = register_module("from_bottleneck", torch::nn::Conv1d(torch::nn::Conv1dOptions(bc, flat, 1)));

  up_ = register_module("up", torch::nn::ModuleList());
  in = channels.back();
  for (std::size_t k = factors.size(); k-- > 0;) {
    const int64_t out = k > 0 ? channels[k - 1] : std::max<int64_t>(channels[0] / 2, 1);
    up_->push_back(UpBlock(in, out, factors[k]));
    in = out;
  }
  out_ = register_module("out", torch::nn::Conv2d(torch::nn::Conv2dOptions(in, 1, config_.kernel_size_2d)
                                                       .padding(config_.kernel_size_2d / 2)));
}

torch::Tensor GeneratorImpl::forward(const torch::Tensor &x, const torch::Tensor &embedding) {
  CheckInput(x, config_.mcep_dim, "Generator");
  const int64_t batch = x.size(0);
  const int64_t frames = x.size(3);
  const int64_t p = config_.time_multiple();
  if (frames == 0 || frames % p != 0)
    throw ShapeError("Generator: T = " + std::to_string(frames) + " is not a positive multiple of " +
                     std::to_string(p));
  if (embedding.dim() != 2 || embedding.size(0) != batch || embedding.size(1) != config_.embedding_dim)
    throw ShapeError("Generator: expected embedding [" + std::to_string(batch) + ", " +
                     std::to_string(config_.embedding_dim) + "], got " + ShapeString(embedding));

  // Replicate the top coefficient so the frequency axis divides evenly.
  auto h = x;
  if (padded_dim_ > config_.mcep_dim)
    h = F::pad(h, F::PadFuncOptions({0, 0, 0, padded_dim_ - config_.mcep_dim}).mode(torch::kReplicate));
  for (auto &m : *down_) h = m->as<DownBlockImpl>()->forward(h);

  const auto c = h.size(1), d = h.size(2), t = h.size(3);
  auto z = InstanceNorm(to_bottleneck_(h.reshape({batch, c * d, t})));
  for (auto &block : blocks_) z = block(z, embedding);
  h = InstanceNorm(from_bottleneck_(z)).reshape({batch, c, d, t});

  for (auto &m : *up_) h = m->as<UpBlockImpl>()->forward(h);
  return out_(h).narrow(2, 0, config_.mcep_dim);
}

DiscriminatorImpl::DiscriminatorImpl(DiscriminatorConfig config) : config_(std::move(config)) {
  config_.Validate();
  trunk = register_module("trunk", torch::nn::ModuleList());
  int64_t in = 1;
  for (std::size_t i = 0; i < config_.channels.size(); ++i) {
    const int64_t stride = i == 0 ? 1 : 2;
    trunk->push_back(torch::nn::Conv2d(
        torch::nn::Conv2dOptions(in, 2 * config_.channels[i], 3).stride(stride).padding(1)));
    in = config_.channels[i];
  }
  const int64_t k = config_.head_kernel;
  head_weight = register_parameter(
      "head_weight", torch::randn({config_.n_speakers, in, k, k}) / std::sqrt(static_cast<double>(in * k * k)));
  head_bias = register_parameter("head_bias", torch::zeros({config_.n_speakers}));
}

torch::Tensor DiscriminatorImpl::Trunk(const torch::Tensor &x) {
  CheckInput(x, config_.mcep_dim, "Discriminator");
  auto h = x;
  for (auto &m : *trunk) h = Glu(m->as<torch::nn::Conv2dImpl>()->forward(h), 1);
  return h;
}

torch::Tensor DiscriminatorImpl::forward(const torch::Tensor &x, const torch::Tensor &speaker_ids) {
  CheckSpeakerIds(speaker_ids, config_.n_speakers);
  if (speaker_ids.size(0) != x.size(0))
    throw ShapeError("Discriminator: " + std::to_string(speaker_ids.size(0)) + " speaker ids for batch of " +
                     std::to_string(x.size(0)));
  auto h = Trunk(x);
  const int64_t batch = h.size(0), c = h.size(1);
  // One group per sample, each convolved with its own speaker's head.
  auto w = head_weight.index_select(0, speaker_ids);  // [B, C, k, k]
  auto y = F::conv2d(h.reshape({1, batch * c, h.size(2), h.size(3)}), w,
                     F::Conv2dFuncOptions().padding(config_.head_kernel / 2).groups(batch));
  return y.view({batch, -1}).mean(1) + head_bias.index_select(0, speaker_ids);
}

SpeakerEncoderImpl::SpeakerEncoderImpl(SpeakerEncoderConfig config) : config_(std::move(config)) {
  config_.Validate();
  const int64_t c = config_.channels;
  trunk = register_module("trunk", torch::nn::ModuleList());
  struct Layer {
    int64_t kernel, dilation;
  };
  int64_t in = config_.mcep_dim;
  for (Layer l : {Layer{5, 1}, Layer{3, 2}, Layer{3, 3}, Layer{1, 1}}) {
    trunk->push_back(torch::nn::Conv1d(
        torch::nn::Conv1dOptions(in, 2 * c, l.kernel).dilation(l.dilation).padding(l.dilation * (l.kernel / 2))));
    in = c;
  }
  head_weight = register_parameter(
      "head_weight", torch::randn({config_.n_speakers, config_.embedding_dim, 2 * c}) / std::sqrt(2.0 * c));
  head_bias = register_parameter("head_bias", torch::zeros({config_.n_speakers, config_.embedding_dim}));
}

torch::Tensor SpeakerEncoderImpl::Trunk(const torch::Tensor &x) {
  CheckInput(x, config_.mcep_dim, "SpeakerEncoder");
  auto h = x.squeeze(1);
  for (auto &m : *trunk) h = Glu(m->as<torch::nn::Conv1dImpl>()->forward(h), 1);
  return h;
}

torch::Tensor SpeakerEncoderImpl::Heads(const torch::Tensor &pooled,
                                        const std::optional<torch::Tensor> &speaker_ids) {
  if (!speaker_ids) {
    auto w = head_weight.mean(0);  // [E, 2C]
    return torch::matmul(pooled, w.t()) + head_bias.mean(0);
  }
  CheckSpeakerIds(*speaker_ids, config_.n_speakers);
  if (speaker_ids->size(0) != pooled.size(0))
    throw ShapeError("SpeakerEncoder: " + std::to_string(speaker_ids->size(0)) + " speaker ids for batch of " +
                     std::to_string(pooled.size(0)));
  auto w = head_weight.index_select(0, *speaker_ids);  // [B, E, 2C]
  return torch::bmm(w, pooled.unsqueeze(2)).squeeze(2) + head_bias.index_select(0, *speaker_ids);
}

torch::Tensor SpeakerEncoderImpl::forward(const torch::Tensor &x, const std::optional<torch::Tensor> &speaker_ids) {
  return Heads(StatisticPooling(Trunk(x)), speaker_ids);
}

}  // namespace wavc::nn
