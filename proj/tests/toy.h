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

// Synthetic speakers for training and evaluation tests: each speaker is a
// fixed offset on the coefficient axis plus slowly varying shared content.

#ifndef WAVC_TESTS_TOY_H_
#define WAVC_TESTS_TOY_H_

#include <string>
#include <vector>

#include <torch/torch.h>

#include "wavc/train/training.h"

namespace wavc::toy {

inline std::vector<train::BankUtterance> MakeUtterances(int n_speakers, int n_utts, int dim, int base_frames,
                                                        std::uint64_t seed) {
  namespace F = torch::nn::functional;
  torch::manual_seed(seed);
  std::vector<torch::Tensor> offsets;
  for (int s = 0; s < n_speakers; ++s) offsets.push_back(torch::randn({dim, 1}) * 0.5);
  std::vector<train::BankUtterance> utts;
  for (int s = 0; s < n_speakers; ++s)
    for (int u = 0; u < n_utts; ++u) {
      const int64_t frames = base_frames + 20 * u;
      auto knots = torch::randn({1, dim, frames / 8 + 1});
      auto content = F::interpolate(knots, F::InterpolateFuncOptions()
                                               .size(std::vector<int64_t>{frames})
                                               .mode(torch::kLinear)
                                               .align_corners(true))
                         .squeeze(0);
      utts.push_back({"spk" + std::to_string(s) + "/u" + std::to_string(u), s, content * 0.3 + offsets[s]});
    }
  return utts;
}

inline train::FeatureBank MakeBank(int n_speakers, int n_utts, int dim, int base_frames, std::uint64_t seed) {
  auto utts = MakeUtterances(n_speakers, n_utts, dim, base_frames, seed);
  auto norm = train::FeatureBank::FitNormalizer(utts);
  return train::FeatureBank(std::move(utts), norm);
}

/// Desk-scale networks that train in minutes on one CPU core.
inline train::ModelConfig SmallModels(int dim, int n_speakers) {
  train::ModelConfig mc;
  mc.generator.base_channels = 16;
  mc.generator.bottleneck_channels = 64;
  mc.generator.n_bottleneck_blocks = 3;
  mc.generator.embedding_dim = 32;
  mc.discriminator.channels = {16, 32, 32, 32};
  mc.encoder.channels = 32;
  mc.Harmonize(dim, n_speakers);
  return mc;
}

/// Smaller still, for tests that only check mechanics.
inline train::ModelConfig TinyModels(int dim, int n_speakers) {
  train::ModelConfig mc;
  mc.generator.base_channels = 4;
  mc.generator.bottleneck_channels = 8;
  mc.generator.n_bottleneck_blocks = 1;
  mc.generator.embedding_dim = 4;
  mc.discriminator.channels = {4, 4, 4, 4};
  mc.encoder.channels = 4;
  mc.Harmonize(dim, n_speakers);
  return mc;
}

inline std::vector<std::string> SpeakerNames(int n) {
  std::vector<std::string> v;
  for (int s = 0; s < n; ++s) v.push_back("spk" + std::to_string(s));
  return v;
}

}  // namespace wavc::toy

#endif  // WAVC_TESTS_TOY_H_
