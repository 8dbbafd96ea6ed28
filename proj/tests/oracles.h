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

// Reference implementations used to check the library: deliberately plain
// loops that share no code with the code under test.

#ifndef WAVC_TESTS_ORACLES_H_
#define WAVC_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

namespace wavc::oracle {

inline std::vector<double> Sine(double freq, double seconds, int fs, double amplitude = 0.5) {
  std::vector<double> x(static_cast<std::size_t>(std::lround(seconds * fs)));
  for (std::size_t n = 0; n < x.size(); ++n)
    x[n] = amplitude * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(n) / fs);
  return x;
}

/// Pitch of a stationary periodic segment from the peak of its normalized
/// autocorrelation, refined by parabolic interpolation.
inline double AutocorrelationPitch(const std::vector<double> &x, int fs, double fmin, double fmax) {
  const int lag_min = static_cast<int>(std::floor(fs / fmax));
  const int lag_max = static_cast<int>(std::ceil(fs / fmin));
  const int n = static_cast<int>(x.size()) - lag_max;
  std::vector<double> r(lag_max + 2, 0.0);
  for (int lag = lag_min - 1; lag <= lag_max + 1; ++lag) {
    double num = 0, e0 = 0, e1 = 0;
    for (int i = 0; i < n; ++i) {
      num += x[i] * x[i + lag];
      e0 += x[i] * x[i];
      e1 += x[i + lag] * x[i + lag];
    }
    r[lag] = num / std::sqrt(e0 * e1 + 1e-300);
  }
  int best = lag_min;
  for (int lag = lag_min; lag <= lag_max; ++lag)
    if (r[lag] > r[best]) best = lag;
  const double a = r[best - 1], b = r[best], c = r[best + 1];
  const double denom = a - 2 * b + c;
  const double shift = denom == 0 ? 0.0 : 0.5 * (a - c) / denom;
  return fs / (best + shift);
}

inline double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// W-AdaIN modulate/demodulate with scalar loops. w is [I][J][K] flattened,
/// gamma/beta are [B][J]; returns [B][I][J][K].
inline std::vector<double> WAdaInLoop(const std::vector<double> &w, const std::vector<double> &gamma,
                                      const std::vector<double> &beta, int B, int I, int J, int K,
                                      double eps) {
  std::vector<double> out(static_cast<std::size_t>(B) * I * J * K);
  std::vector<double> col(I);
  for (int b = 0; b < B; ++b)
    for (int j = 0; j < J; ++j)
      for (int k = 0; k < K; ++k) {
        double mean = 0;
        for (int i = 0; i < I; ++i) {
          col[i] = gamma[b * J + j] * w[(i * J + j) * K + k] + beta[b * J + j];
          mean += col[i];
        }
        mean /= I;
        double var = 0;
        for (int i = 0; i < I; ++i) var += (col[i] - mean) * (col[i] - mean);
        const double sd = std::sqrt(var / I);
        for (int i = 0; i < I; ++i) out[((b * I + i) * J + j) * K + k] = (col[i] - mean) / (sd + eps);
      }
  return out;
}

inline double L1Loop(const std::vector<double> &a, const std::vector<double> &b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
  return s / static_cast<double>(a.size());
}

/// EER by enumerating one threshold inside each of the 2n+1 intervals cut by
/// the sorted scores, with the FAR/FRR crossing interpolated linearly.
inline double BruteForceEer(const std::vector<double> &scores, const std::vector<bool> &labels) {
  std::vector<double> sorted = scores;
  std::sort(sorted.begin(), sorted.end());
  // candidate thresholds: below all, at each distinct score, above all
  std::vector<double> cand;
  cand.push_back(sorted.front() - 1.0);
  for (std::size_t i = 0; i < sorted.size(); ++i)
    if (i == 0 || sorted[i] != sorted[i - 1]) cand.push_back(sorted[i]);
  cand.push_back(sorted.back() + 1.0);
  double nt = 0, nn = 0;
  for (bool l : labels) (l ? nt : nn) += 1;
  std::vector<double> far, frr;
  for (double t : cand) {
    double fa = 0, fr = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (!labels[i] && scores[i] >= t) fa += 1;
      if (labels[i] && scores[i] < t) fr += 1;
    }
    far.push_back(fa / nn);
    frr.push_back(fr / nt);
  }
  for (std::size_t k = 1; k < cand.size(); ++k) {
    const double d = far[k] - frr[k];
    if (d == 0.0) return 100.0 * far[k];
    if (d < 0.0) {
      const double p = far[k - 1] - frr[k - 1];
      const double w = p / (p - d);
      return 100.0 * 0.5 * ((far[k - 1] + w * (far[k] - far[k - 1])) + (frr[k - 1] + w * (frr[k] - frr[k - 1])));
    }
  }
  return -1.0;
}

}  // namespace wavc::oracle

#endif  // WAVC_TESTS_ORACLES_H_
