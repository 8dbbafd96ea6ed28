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

// Conditional normalization layers: instance norm, CIN, AdaIN, GLU and the
// weight-space variant W-AdaIN.
//
// W-AdaIN kernel layout follows torch's conv weight layout: w is [I, J, K]
// with I the output channels, J the input channels and K the kernel width.
// The affine parameters gamma/beta are [B, J] (one pair per input channel and
// sample). Modulation and demodulation:
//
//   w*[b,i,j,k]  = gamma[b,j] * w[i,j,k] + beta[b,j]
//   w**[b,i,j,k] = (w*[b,i,j,k] - mu[b,j,k]) / (sigma[b,j,k] + eps)
//
// with mu/sigma the mean and population std of w* over the output axis i.
// Because gamma and beta are constant along i, beta cancels exactly and
// gamma survives only through its sign and through eps:
//   w** = gamma * (w - mean_i w) / (|gamma| * std_i w + eps).

#ifndef WAVC_NN_NORM_LAYERS_H_
#define WAVC_NN_NORM_LAYERS_H_

#include <torch/torch.h>

namespace wavc::nn {

inline constexpr double kNormEps = 1e-5;

/// Per-sample affine parameters, both [B, C].
struct AffineParams {
  torch::Tensor gamma;
  torch::Tensor beta;
};

/// Standardizes every (batch, channel) slice over all trailing dimensions
/// with the population std: (f - mean) / (std + eps). Requires >= 2
/// positions per slice.
torch::Tensor InstanceNorm(const torch::Tensor &f, double eps = kNormEps);

/// gamma * InstanceNorm(f) + beta, broadcast over the trailing dimensions.
torch::Tensor ConditionalInstanceNorm(const torch::Tensor &f, const AffineParams &p,
                                      double eps = kNormEps);

/// A * sigmoid(B) where (A, B) split dimension `dim` in halves.
/// Throws ShapeError on an odd split size.
torch::Tensor Glu(const torch::Tensor &f, int64_t dim = 1);

/// Modulated and demodulated kernels [B, I, J, K] from w [I, J, K] and
/// gamma/beta [B, J]. Throws ShapeError when I < 2 or shapes disagree.
torch::Tensor WAdaINModulate(const torch::Tensor &weight, const AffineParams &p,
                             double eps = kNormEps);

/// Stride-1 "same"-padded 1D convolution of every f[b] ([B, J, T]) with
/// its own kernel kernels[b] ([B, I, J, K]). Returns [B, I, T].
torch::Tensor PerSampleConv1d(const torch::Tensor &f, const torch::Tensor &kernels);

/// Learned linear maps embedding -> (gamma, beta). Biases start at
/// `gamma_bias` and 0; `weight_std` sets the initial spread of the weights.
class AffineMapImpl : public torch::nn::Module {
 public:
  AffineMapImpl(int64_t embedding_dim, int64_t channels, double weight_std = 0.0, double gamma_bias = 1.0);

  AffineParams forward(const torch::Tensor &embedding);

  int64_t embedding_dim() const { return embedding_dim_; }
  int64_t channels() const { return channels_; }

  torch::nn::Linear gamma{nullptr};
  torch::nn::Linear beta{nullptr};

 private:
  int64_t embedding_dim_;
  int64_t channels_;
};
TORCH_MODULE(AffineMap);

/// ConditionalInstanceNorm with gamma/beta predicted from a speaker embedding.
torch::Tensor AdaIN(const torch::Tensor &f, const torch::Tensor &embedding, AffineMap &affine,
                    double eps = kNormEps);

/// 1D convolution whose kernel is modulated per sample by a speaker
/// embedding: out[b] = conv(f[b], WAdaINModulate(w, affine(e))[b]).
class WAdaINConv1dImpl : public torch::nn::Module {
 public:
  WAdaINConv1dImpl(int64_t in_channels, int64_t out_channels, int64_t kernel_size,
                   int64_t embedding_dim, double affine_weight_std = 0.0, double eps = kNormEps,
                   double gamma_bias = 1.0);

  /// f: [B, in_channels, T], embedding: [B, embedding_dim] -> [B, out_channels, T]
  torch::Tensor forward(const torch::Tensor &f, const torch::Tensor &embedding);

  /// The demodulated kernels for `embedding`, [B, out, in, K].
  torch::Tensor ModulatedKernels(const torch::Tensor &embedding);

  torch::Tensor weight;  // [out, in, K]
  AffineMap affine{nullptr};

 private:
  double eps_;
};
TORCH_MODULE(WAdaINConv1d);

}  // namespace wavc::nn

#endif  // WAVC_NN_NORM_LAYERS_H_
