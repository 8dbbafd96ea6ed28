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

#ifndef WAVC_ACOUSTIC_WAVEFORM_H_
#define WAVC_ACOUSTIC_WAVEFORM_H_

#include <vector>

#include "wavc/common/matrix.h"

namespace wavc {

inline constexpr int kDefaultSampleRate = 22050;
inline constexpr double kDefaultFramePeriodMs = 5.0;
inline constexpr int kDefaultMcepOrder = 36;
inline constexpr int kDefaultFftSize = 1024;

/// Mono audio. Samples are nominally in [-1, 1].
struct Waveform {
  std::vector<double> samples;
  int sample_rate = kDefaultSampleRate;

  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }

  /// Throws InvalidArgument unless sample_rate > 0 and all samples are finite.
  void Validate() const;
};

/// Output of vocoder analysis: F0 contour (0 = unvoiced), spectral envelope
/// (power, frames x fft_size/2+1) and band aperiodicity in [0, 1].
struct VocoderAnalysis {
  std::vector<double> f0;
  Matrix<double> spectral_envelope;
  Matrix<double> aperiodicity;
  double frame_period_ms = kDefaultFramePeriodMs;
  int sample_rate = kDefaultSampleRate;

  std::size_t num_frames() const { return f0.size(); }
  int fft_size() const { return static_cast<int>(2 * (spectral_envelope.cols() - 1)); }

  /// Checks the shared frame count, f0 >= 0, frame_period > 0.
  void Validate() const;
};

/// Mel-cepstral coefficients c0..c_order per frame.
struct McepSegment {
  Matrix<double> coeffs;  // frames x (order + 1)

  std::size_t num_frames() const { return coeffs.rows(); }
  int order() const { return static_cast<int>(coeffs.cols()) - 1; }
};

}  // namespace wavc

#endif  // WAVC_ACOUSTIC_WAVEFORM_H_
