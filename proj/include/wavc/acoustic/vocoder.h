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

#ifndef WAVC_ACOUSTIC_VOCODER_H_
#define WAVC_ACOUSTIC_VOCODER_H_

#include <memory>
#include <string>

#include "wavc/acoustic/waveform.h"

namespace wavc {

/// Analysis/synthesis backend. Implementations must be safe to call
/// concurrently from several threads on distinct inputs.
class VocoderBackend {
 public:
  virtual ~VocoderBackend() = default;

  /// Decomposes `wave` into F0, spectral envelope and aperiodicity.
  /// `utt_id` is only used to label errors.
  virtual VocoderAnalysis Analyze(const Waveform &wave, double frame_period_ms,
                                  const std::string &utt_id = "") const = 0;

  virtual Waveform Synthesize(const VocoderAnalysis &analysis) const = 0;
};

enum class F0Estimator { kHarvest, kDio };

struct WorldOptions {
  F0Estimator f0_estimator = F0Estimator::kHarvest;
  double f0_floor = 71.0;
  double f0_ceil = 800.0;
  int fft_size = kDefaultFftSize;
  /// Supported input rates; anything else is rejected before analysis.
  std::vector<int> supported_rates = {16000, 22050, 24000, 44100, 48000};
};

/// Backend built on the WORLD vocoder (Harvest/DIO + StoneMask, CheapTrick, D4C).
class WorldVocoder : public VocoderBackend {
 public:
  explicit WorldVocoder(WorldOptions options = {});

  VocoderAnalysis Analyze(const Waveform &wave, double frame_period_ms,
                          const std::string &utt_id = "") const override;
  Waveform Synthesize(const VocoderAnalysis &analysis) const override;

  const WorldOptions &options() const { return options_; }
  bool SupportsRate(int sample_rate) const;

 private:
  WorldOptions options_;
};

/// Free-function forms over a backend.
VocoderAnalysis Analyze(const VocoderBackend &backend, const Waveform &wave,
                        double frame_period_ms = kDefaultFramePeriodMs,
                        const std::string &utt_id = "");
Waveform Synthesize(const VocoderBackend &backend, const VocoderAnalysis &analysis);

}  // namespace wavc

#endif  // WAVC_ACOUSTIC_VOCODER_H_
