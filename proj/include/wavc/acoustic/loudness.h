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

#ifndef WAVC_ACOUSTIC_LOUDNESS_H_
#define WAVC_ACOUSTIC_LOUDNESS_H_

#include <array>
#include <span>

#include "wavc/acoustic/waveform.h"

namespace wavc {

inline constexpr double kDefaultLoudnessTargetLufs = -23.0;

/// Second-order IIR section, coefficients normalized so a0 = 1.
struct Biquad {
  std::array<double, 3> b{1.0, 0.0, 0.0};
  std::array<double, 2> a{0.0, 0.0};  // a1, a2

  std::vector<double> Filter(std::span<const double> x) const;
};

/// ITU-R BS.1770-4 integrated loudness meter (mono, K-weighted, 400 ms
/// blocks with 75% overlap, -70 LUFS absolute and -10 LU relative gates).
class LoudnessMeter {
 public:
  explicit LoudnessMeter(int sample_rate);

  /// Integrated loudness in LUFS; -infinity when every block is gated out
  /// (digital silence). Signals shorter than one block are measured as a
  /// single block.
  double Integrated(std::span<const double> samples) const;

  const Biquad &high_shelf() const { return shelf_; }
  const Biquad &high_pass() const { return high_pass_; }

 private:
  int sample_rate_;
  Biquad shelf_;
  Biquad high_pass_;
};

double IntegratedLoudness(const Waveform &wave);

/// Result of NormalizeLoudness: the scaled waveform and the applied gain.
struct LoudnessNormalization {
  Waveform wave;
  double gain = 1.0;          // linear amplitude factor
  double input_lufs = 0.0;    // measured before scaling
};

/// Scales `wave` so its integrated loudness equals `target_lufs`. Digital
/// silence is returned unchanged (gain 1) with a warning. Samples are not
/// clipped; a warning is logged when the result leaves [-1, 1].
LoudnessNormalization NormalizeLoudness(const Waveform &wave,
                                        double target_lufs = kDefaultLoudnessTargetLufs);

}  // namespace wavc

#endif  // WAVC_ACOUSTIC_LOUDNESS_H_
