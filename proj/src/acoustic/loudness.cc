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

#include "wavc/acoustic/loudness.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wavc/common/error.h"
#include "wavc/common/log.h"

namespace wavc {
namespace {

constexpr double kBlockSeconds = 0.4;
constexpr double kOverlap = 0.75;
constexpr double kAbsoluteGate = -70.0;
constexpr double kRelativeGate = -10.0;

// RBJ cookbook biquads at an arbitrary rate; the K-weighting stages are a
// high shelf (+4 dB at 1.5 kHz) followed by a 38 Hz high pass.
Biquad HighShelf(double gain_db, double q, double fc, int rate) {
  const double A = std::pow(10.0, gain_db / 40.0);
  const double w0 = 2.0 * std::numbers::pi * fc / rate;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double c = std::cos(w0);
  const double sa = 2.0 * std::sqrt(A) * alpha;
  const double a0 = (A + 1) - (A - 1) * c + sa;
  Biquad f;
  f.b = {A * ((A + 1) + (A - 1) * c + sa) / a0, -2 * A * ((A - 1) + (A + 1) * c) / a0,
         A * ((A + 1) + (A - 1) * c - sa) / a0};
  f.a = {2 * ((A - 1) - (A + 1) * c) / a0, ((A + 1) - (A - 1) * c - sa) / a0};
  return f;
}

Biquad HighPass(double q, double fc, int rate) {
  const double w0 = 2.0 * std::numbers::pi * fc / rate;
  const double alpha = std::sin(w0) / (2.0 * q);
  const double c = std::cos(w0);
  const double a0 = 1 + alpha;
  Biquad f;
  f.b = {(1 + c) / 2 / a0, -(1 + c) / a0, (1 + c) / 2 / a0};
  f.a = {-2 * c / a0, (1 - alpha) / a0};
  return f;
}

double BlockLoudness(double mean_square) { return -0.691 + 10.0 * std::log10(mean_square); }

}  // namespace

std::vector<double> Biquad::Filter(std::span<const double> x) const {
  std::vector<double> y(x.size());
  double x1 = 0, x2 = 0, y1 = 0, y2 = 0;
  for (std::size_t n = 0; n < x.size(); ++n) {
    const double v = b[0] * x[n] + b[1] * x1 + b[2] * x2 - a[0] * y1 - a[1] * y2;
    x2 = x1;
    x1 = x[n];
    y2 = y1;
    y1 = v;
    y[n] = v;
  }
  return y;
}

LoudnessMeter::LoudnessMeter(int sample_rate)
    : sample_rate_(sample_rate),
      shelf_(HighShelf(4.0, 1.0 / std::sqrt(2.0), 1500.0, sample_rate)),
      high_pass_(HighPass(0.5, 38.0, sample_rate)) {
  if (sample_rate <= 0) throw InvalidArgument("LoudnessMeter: sample_rate must be positive");
}

double LoudnessMeter::Integrated(std::span<const double> samples) const {
  if (samples.empty()) return -std::numeric_limits<double>::infinity();
  const std::vector<double> weighted = high_pass_.Filter(shelf_.Filter(samples));

  const auto block = static_cast<std::size_t>(std::lround(kBlockSeconds * sample_rate_));
  const auto hop = static_cast<std::size_t>(std::lround(kBlockSeconds * (1 - kOverlap) * sample_rate_));
  std::vector<double> block_ms;
  if (weighted.size() <= block) {
    double s = 0.0;
    for (double v : weighted) s += v * v;
    block_ms.push_back(s / weighted.size());
  } else {
    for (std::size_t start = 0; start + block <= weighted.size(); start += hop) {
      double s = 0.0;
      for (std::size_t i = start; i < start + block; ++i) s += weighted[i] * weighted[i];
      block_ms.push_back(s / block);
    }
  }

  auto gated_mean = [&](double threshold) {
    double sum = 0.0;
    std::size_t n = 0;
    for (double z : block_ms) {
      if (z > 0.0 && BlockLoudness(z) > threshold) {
        sum += z;
        ++n;
      }
    }
    return n == 0 ? 0.0 : sum / n;
  };
  const double abs_mean = gated_mean(kAbsoluteGate);
  if (abs_mean <= 0.0) return -std::numeric_limits<double>::infinity();
  const double relative = BlockLoudness(abs_mean) + kRelativeGate;
  const double final_mean = gated_mean(std::max(kAbsoluteGate, relative));
  return BlockLoudness(final_mean);
}

double IntegratedLoudness(const Waveform &wave) {
  return LoudnessMeter(wave.sample_rate).Integrated(wave.samples);
}

LoudnessNormalization NormalizeLoudness(const Waveform &wave, double target_lufs) {
  wave.Validate();
  LoudnessNormalization out;
  out.wave = wave;
  out.input_lufs = IntegratedLoudness(wave);
  if (!std::isfinite(out.input_lufs)) {
    WAVC_WARN << "loudness normalization skipped: input is digital silence";
    return out;
  }
  out.gain = std::pow(10.0, (target_lufs - out.input_lufs) / 20.0);
  bool clipped = false;
  for (double &s : out.wave.samples) {
    s *= out.gain;
    clipped |= std::abs(s) > 1.0;
  }
  if (clipped) WAVC_WARN << "normalized waveform exceeds [-1, 1] (gain " << out.gain << ")";
  return out;
}

}  // namespace wavc
