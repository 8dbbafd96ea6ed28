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

#ifndef WAVC_ACOUSTIC_MCEP_H_
#define WAVC_ACOUSTIC_MCEP_H_

#include <span>
#include <vector>

#include "wavc/acoustic/waveform.h"

namespace wavc {

// Mel-cepstrum convention: for a power envelope S and all-pass warping
// constant alpha,
//
//   log S(w) = 2 * sum_{m=0}^{order} mc[m] * cos(m * warp(w)),
//   warp(w)  = atan2((1 - a^2) sin w, (1 + a^2) cos w - 2a),
//
// i.e. mc is the minimum-phase cepstrum of sqrt(S) on the warped axis.

/// Warping constant whose all-pass frequency map best fits the mel scale at
/// `sample_rate` (0.455 at 22.05 kHz).
double AllPassAlpha(int sample_rate);

/// Phase of the first-order all-pass at normalized angular frequency w in [0, pi].
double WarpFrequency(double w, double alpha);

/// Frequency transformation of a cepstrum (recursive all-pass filter bank).
/// Maps c_in (length n_in) to the cepstrum of the same spectrum on the axis
/// warped by `alpha`, truncated to `out_order` + 1 coefficients.
std::vector<double> FrequencyTransform(std::span<const double> c_in, int out_order, double alpha);

/// Encodes every frame of a power envelope (frames x fft_size/2+1).
/// Throws InvalidArgument when order < 1.
McepSegment EnvelopeToMcep(const Matrix<double> &envelope, int order, double alpha);
McepSegment EnvelopeToMcep(const VocoderAnalysis &analysis, int order = kDefaultMcepOrder);

/// Decodes to a power envelope with `num_bins` = fft_size/2+1 bins per frame.
Matrix<double> McepToEnvelope(const McepSegment &mcep, int num_bins, double alpha);

}  // namespace wavc

#endif  // WAVC_ACOUSTIC_MCEP_H_
