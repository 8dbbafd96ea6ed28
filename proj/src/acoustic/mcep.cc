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

#include "wavc/acoustic/mcep.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "wavc/common/error.h"
#include "world/fft.h"

namespace wavc {
namespace {

constexpr double kLogFloor = 1e-300;

// RAII wrapper around WORLD's complex-to-real FFT plan.
class InverseRealFft {
 public:
  explicit InverseRealFft(int n) : n_(n), in_(2 * (n / 2 + 1)), out_(n) {
    plan_ = fft_plan_dft_c2r_1d(n, reinterpret_cast<fft_complex *>(in_.data()), out_.data(),
                                FFT_ESTIMATE);
  }
  ~InverseRealFft() { fft_destroy_plan(plan_); }
  InverseRealFft(const InverseRealFft &) = delete;
  InverseRealFft &operator=(const InverseRealFft &) = delete;

  // Real cepstrum of a symmetric real log-spectrum given on bins 0..n/2.
  const std::vector<double> &Cepstrum(std::span<const double> half_spectrum) {
    for (int k = 0; k <= n_ / 2; ++k) {
      in_[2 * k] = half_spectrum[k];
      in_[2 * k + 1] = 0.0;
    }
    fft_execute(plan_);
    for (double &v : out_) v /= n_;
    return out_;
  }

 private:
  int n_;
  std::vector<double> in_;  // interleaved re/im
  std::vector<double> out_;
  fft_plan plan_;
};

}  // namespace

double WarpFrequency(double w, double alpha) {
  return std::atan2((1.0 - alpha * alpha) * std::sin(w), (1.0 + alpha * alpha) * std::cos(w) - 2.0 * alpha);
}

double AllPassAlpha(int sample_rate) {
  if (sample_rate <= 0) throw InvalidArgument("AllPassAlpha: sample_rate must be positive");
  static std::mutex cache_mutex;
  static std::map<int, double> cache;
  std::lock_guard<std::mutex> lock(cache_mutex);
  if (auto it = cache.find(sample_rate); it != cache.end()) return it->second;
  // Grid search over alpha for the least RMS distance between the normalized
  // mel scale and the normalized all-pass warping on 1000 points.
  constexpr int kPoints = 1000;
  const double step = sample_rate / 2.0 / kPoints;
  std::vector<double> mel(kPoints);
  for (int i = 0; i < kPoints; ++i) mel[i] = std::log(1.0 + step * i / 1000.0);
  for (double &m : mel) m /= mel.back();

  double best_alpha = 0.0;
  double best_dist = std::numeric_limits<double>::infinity();
  std::vector<double> warp(kPoints);
  for (int a = 0; a < 1000; ++a) {
    const double alpha = a * 0.001;
    for (int i = 0; i < kPoints; ++i) warp[i] = WarpFrequency(std::numbers::pi * i / kPoints, alpha);
    double dist = 0.0;
    for (int i = 0; i < kPoints; ++i) {
      const double d = mel[i] - warp[i] / warp.back();
      dist += d * d;
    }
    if (dist < best_dist) {
      best_dist = dist;
      best_alpha = alpha;
    }
  }
  cache[sample_rate] = best_alpha;
  return best_alpha;
}

std::vector<double> FrequencyTransform(std::span<const double> c_in, int out_order, double alpha) {
  if (out_order < 0) throw InvalidArgument("FrequencyTransform: negative order");
  const double b = 1.0 - alpha * alpha;
  std::vector<double> g(out_order + 1, 0.0);
  std::vector<double> d(out_order + 1, 0.0);
  for (std::size_t n = c_in.size(); n-- > 0;) {
    d = g;
    g[0] = c_in[n] + alpha * d[0];
    if (out_order >= 1) g[1] = b * d[0] + alpha * d[1];
    for (int j = 2; j <= out_order; ++j) g[j] = d[j - 1] + alpha * (d[j] - g[j - 1]);
  }
  return g;
}

McepSegment EnvelopeToMcep(const Matrix<double> &envelope, int order, double alpha) {
  if (order < 1) throw InvalidArgument("EnvelopeToMcep: order must be >= 1");
  if (envelope.cols() < 3) throw ShapeError("EnvelopeToMcep: envelope needs at least 3 bins");
  const int fft_size = static_cast<int>(2 * (envelope.cols() - 1));
  const int half = fft_size / 2;

  InverseRealFft ifft(fft_size);
  std::vector<double> log_spec(envelope.cols());
  std::vector<double> min_phase(half + 1);
  McepSegment out;
  out.coeffs = Matrix<double>(envelope.rows(), order + 1);
  for (std::size_t t = 0; t < envelope.rows(); ++t) {
    auto row = envelope.row(t);
    for (std::size_t k = 0; k < row.size(); ++k) log_spec[k] = std::log(std::max(row[k], kLogFloor));
    const auto &c = ifft.Cepstrum(log_spec);
    // Fold the two-sided power cepstrum into the one-sided amplitude form.
    min_phase[0] = c[0] / 2.0;
    for (int n = 1; n < half; ++n) min_phase[n] = c[n];
    min_phase[half] = c[half] / 2.0;
    auto mc = FrequencyTransform(min_phase, order, alpha);
    std::copy(mc.begin(), mc.end(), out.coeffs.row(t).begin());
  }
  return out;
}

McepSegment EnvelopeToMcep(const VocoderAnalysis &analysis, int order) {
  return EnvelopeToMcep(analysis.spectral_envelope, order, AllPassAlpha(analysis.sample_rate));
}

Matrix<double> McepToEnvelope(const McepSegment &mcep, int num_bins, double alpha) {
  if (mcep.order() < 1) throw InvalidArgument("McepToEnvelope: order must be >= 1");
  if (num_bins < 3) throw InvalidArgument("McepToEnvelope: need at least 3 bins");
  const int order = mcep.order();
  // cos(m * warp(w_k)) table, shared by all frames.
  Matrix<double> basis(num_bins, order + 1);
  for (int k = 0; k < num_bins; ++k) {
    const double beta = WarpFrequency(std::numbers::pi * k / (num_bins - 1), alpha);
    for (int m = 0; m <= order; ++m) basis(k, m) = 2.0 * std::cos(m * beta);
  }
  Matrix<double> env(mcep.num_frames(), num_bins);
  for (std::size_t t = 0; t < mcep.num_frames(); ++t) {
    auto mc = mcep.coeffs.row(t);
    for (int k = 0; k < num_bins; ++k) {
      auto b = basis.row(k);
      double log_s = 0.0;
      for (int m = 0; m <= order; ++m) log_s += mc[m] * b[m];
      env(t, k) = std::exp(log_s);
    }
  }
  return env;
}

}  // namespace wavc
