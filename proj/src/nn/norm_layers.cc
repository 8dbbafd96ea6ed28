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

#include "wavc/nn/norm_layers.h"

#include <cmath>
#include <sstream>

#include "wavc/common/error.h"

namespace wavc::nn {
namespace {

std::string ShapeString(const torch::Tensor &t) {
  std::ostringstream os;
  os << t.sizes();
  return os.str();
}

void CheckAffine(const AffineParams &p, int64_t batch, int64_t channels, const char *who) {
  if (!p.gamma.defined() || !p.beta.defined())
    throw ShapeError(std::string(who) + ": gamma/beta must be defined");
  if (p.gamma.dim() != 2 || p.gamma.size(0) != batch || p.gamma.size(1) != channels ||
      p.gamma.sizes() != p.beta.sizes())
    throw ShapeError(std::string(who) + ": expected gamma/beta of shape [" + std::to_string(batch) +
                     ", " + std::to_string(channels) + "], got " + ShapeString(p.gamma) + " and " +
                     ShapeString(p.beta));
}

// Broadcast [B, C] to [B, C, 1, ...] matching f's rank.
torch::Tensor Expand(const torch::Tensor &bc, int64_t rank) {
  std::vector<int64_t> shape{bc.size(0), bc.size(1)};
  shape.resize(rank, 1);
  return bc.view(shape);
}

}  // namespace

torch::Tensor InstanceNorm(const torch::Tensor &f, double eps) {
  if (f.dim() < 3) throw ShapeError("InstanceNorm: expected [B, C, ...], got " + ShapeString(f));
  std::vector<int64_t> dims;
  int64_t positions = 1;
  for (int64_t d = 2; d < f.dim(); ++d) {
    dims.push_back(d);
    positions *= f.size(d);
  }
  if (positions < 2) throw ShapeError("InstanceNorm: need at least 2 positions per slice");
  auto mean = f.mean(dims, /*keepdim=*/true);
  auto centered = f - mean;
  auto std = centered.pow(2).mean(dims, /*keepdim=*/true).sqrt();
  return centered / (std + eps);
}

torch::Tensor ConditionalInstanceNorm(const torch::Tensor &f, const AffineParams &p, double eps) {
  if (f.dim() < 3) throw ShapeError("ConditionalInstanceNorm: expected [B, C, ...]");
  CheckAffine(p, f.size(0), f.size(1), "ConditionalInstanceNorm");
  return Expand(p.gamma, f.dim()) * InstanceNorm(f, eps) + Expand(p.beta, f.dim());
}

torch::Tensor Glu(const torch::Tensor &f, int64_t dim) {
  if (dim < 0) dim += f.dim();
  if (dim < 0 || dim >= f.dim()) throw ShapeError("Glu: dimension out of range");
  if (f.size(dim) % 2 != 0)
    throw ShapeError("Glu: split dimension must be even, got " + std::to_string(f.size(dim)));
  auto halves = f.chunk(2, dim);
  return halves[0] * torch::sigmoid(halves[1]);
}

torch::Tensor WAdaINModulate(const torch::Tensor &weight, const AffineParams &p, double eps) {
  if (weight.dim() != 3) throw ShapeError("WAdaINModulate: kernel must be [I, J, K], got " + ShapeString(weight));
  const int64_t out_ch = weight.size(0);
  const int64_t in_ch = weight.size(1);
  if (out_ch < 2) throw ShapeError("WAdaINModulate: demodulation needs I >= 2 output channels");
  if (!p.gamma.defined() || p.gamma.dim() != 2)
    throw ShapeError("WAdaINModulate: gamma must be [B, J]");
  CheckAffine(p, p.gamma.size(0), in_ch, "WAdaINModulate");

  const int64_t batch = p.gamma.size(0);
  // w* - mu == gamma * (w - mean_i w) exactly; centering before scaling avoids
  // cancelling beta and the shared offset of w. Kernel statistics run in double.
  const auto dtype = weight.scalar_type();
  auto gamma = p.gamma.to(torch::kDouble).view({batch, 1, in_ch, 1});
  auto w = weight.to(torch::kDouble).unsqueeze(0);
  auto centered = gamma * (w - w.mean(1, /*keepdim=*/true));  // [B, I, J, K]
  auto sigma = centered.pow(2).mean(1, /*keepdim=*/true).sqrt();
  return (centered / (sigma + eps)).to(dtype);
}

torch::Tensor PerSampleConv1d(const torch::Tensor &f, const torch::Tensor &kernels) {
  if (f.dim() != 3) throw ShapeError("PerSampleConv1d: features must be [B, J, T], got " + ShapeString(f));
  if (kernels.dim() != 4) throw ShapeError("PerSampleConv1d: kernels must be [B, I, J, K]");
  const int64_t batch = f.size(0);
  const int64_t in_ch = f.size(1);
  if (kernels.size(0) != batch)
    throw ShapeError("PerSampleConv1d: batch sizes differ (" + std::to_string(batch) + " vs " +
                     std::to_string(kernels.size(0)) + ")");
  if (kernels.size(2) != in_ch)
    throw ShapeError("PerSampleConv1d: feature channels " + std::to_string(in_ch) +
                     " do not match kernel input channels " + std::to_string(kernels.size(2)));
  const int64_t out_ch = kernels.size(1);
  const int64_t width = kernels.size(3);
  // A grouped convolution with one group per sample is exactly a separate
  // kernel per batch element.
  auto x = f.reshape({1, batch * in_ch, f.size(2)});
  auto w = kernels.reshape({batch * out_ch, in_ch, width});
  namespace F = torch::nn::functional;
  auto y = F::conv1d(x, w, F::Conv1dFuncOptions().padding(torch::kSame).groups(batch));
  return y.view({batch, out_ch, f.size(2)});
}

AffineMapImpl::AffineMapImpl(int64_t embedding_dim, int64_t channels, double weight_std, double gamma_bias)
    : embedding_dim_(embedding_dim), channels_(channels) {
  gamma = register_module("gamma", torch::nn::Linear(embedding_dim, channels));
  beta = register_module("beta", torch::nn::Linear(embedding_dim, channels));
  torch::NoGradGuard no_grad;
  for (auto *lin : {&gamma, &beta}) {
    if (weight_std > 0.0)
      (*lin)->weight.normal_(0.0, weight_std);
    else
      (*lin)->weight.zero_();
  }
  gamma->bias.fill_(gamma_bias);
  beta->bias.zero_();
}

AffineParams AffineMapImpl::forward(const torch::Tensor &embedding) {
  if (embedding.dim() != 2 || embedding.size(1) != embedding_dim_)
    throw ShapeError("AffineMap: expected embedding [B, " + std::to_string(embedding_dim_) + "], got " +
                     ShapeString(embedding));
  return {gamma(embedding), beta(embedding)};
}

torch::Tensor AdaIN(const torch::Tensor &f, const torch::Tensor &embedding, AffineMap &affine,
                    double eps) {
  return ConditionalInstanceNorm(f, affine(embedding), eps);
}

WAdaINConv1dImpl::WAdaINConv1dImpl(int64_t in_channels, int64_t out_channels, int64_t kernel_size,
                                   int64_t embedding_dim, double affine_weight_std, double eps,
                                   double gamma_bias)
    : eps_(eps) {
  if (out_channels < 2) throw ShapeError("WAdaINConv1d: need at least 2 output channels");
  weight = register_parameter("weight", torch::randn({out_channels, in_channels, kernel_size}) /
                                            std::sqrt(static_cast<double>(in_channels * kernel_size)));
  affine = register_module("affine", AffineMap(embedding_dim, in_channels, affine_weight_std, gamma_bias));
}

torch::Tensor WAdaINConv1dImpl::ModulatedKernels(const torch::Tensor &embedding) {
  return WAdaINModulate(weight, affine(embedding), eps_);
}

torch::Tensor WAdaINConv1dImpl::forward(const torch::Tensor &f, const torch::Tensor &embedding) {
  if (f.dim() != 3 || f.size(1) != weight.size(1))
    throw ShapeError("WAdaINConv1d: expected features [B, " + std::to_string(weight.size(1)) +
                     ", T], got " + ShapeString(f));
  if (embedding.dim() != 2 || embedding.size(0) != f.size(0))
    throw ShapeError("WAdaINConv1d: feature and embedding batch sizes differ");
  return PerSampleConv1d(f, ModulatedKernels(embedding));
}

}  // namespace wavc::nn
