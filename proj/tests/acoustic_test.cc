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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <random>

#include "oracles.h"
#include "wavc/acoustic/f0.h"
#include "wavc/acoustic/feature_cache.h"
#include "wavc/acoustic/loudness.h"
#include "wavc/acoustic/mcep.h"
#include "wavc/acoustic/vocoder.h"
#include "wavc/common/error.h"
#include "wavc/common/log.h"
#include "wavc/io/tensor_container.h"
#include "wavc/io/wav_io.h"

namespace fs = std::filesystem;
using namespace wavc;

namespace {

Waveform Tone(double freq, double seconds, double amplitude = 0.5, int fs = kDefaultSampleRate) {
  return {oracle::Sine(freq, seconds, fs, amplitude), fs};
}

// Eight harmonics with 1/h amplitudes; the F0 estimator needs harmonic
// structure and returns unvoiced frames for a bare sinusoid.
Waveform Buzz(double freq, double seconds, int fs = kDefaultSampleRate) {
  std::vector<double> x(static_cast<std::size_t>(std::lround(seconds * fs)), 0.0);
  for (int h = 1; h <= 8; ++h) {
    auto partial = oracle::Sine(freq * h, seconds, fs, 0.4 / h);
    for (std::size_t n = 0; n < x.size(); ++n) x[n] += partial[n];
  }
  return {x, fs};
}

std::vector<double> Voiced(const std::vector<double> &f0) {
  std::vector<double> v;
  for (double x : f0)
    if (x > 0) v.push_back(x);
  return v;
}

fs::path TempDir(const std::string &name) {
  auto p = fs::temp_directory_path() / ("wavc_acoustic_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// Smooth random log-envelope: a few Gaussian bumps on a tilt.
Matrix<double> RandomEnvelope(std::mt19937_64 &gen, int frames, int bins) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix<double> env(frames, bins);
  for (int t = 0; t < frames; ++t) {
    const double tilt = -3.0 * u(gen);
    double c[3], w[3], a[3];
    for (int k = 0; k < 3; ++k) {
      c[k] = u(gen);
      w[k] = 0.08 + 0.07 * u(gen);
      a[k] = 0.5 + 1.5 * u(gen);
    }
    for (int b = 0; b < bins; ++b) {
      const double x = static_cast<double>(b) / (bins - 1);
      double logs = tilt * x;
      for (int k = 0; k < 3; ++k) logs += a[k] * std::exp(-0.5 * std::pow((x - c[k]) / w[k], 2));
      env(t, b) = std::exp(logs);
    }
  }
  return env;
}

double MaxLogError(const Matrix<double> &a, const Matrix<double> &b) {
  double m = 0;
  for (std::size_t i = 0; i < a.values().size(); ++i)
    m = std::max(m, std::fabs(std::log(a.values()[i]) - std::log(b.values()[i])));
  return m;
}

}  // namespace

TEST_CASE("analyze: silence is unvoiced with about duration/frame_period frames") {
  Waveform silence{std::vector<double>(22050, 0.0), 22050};
  auto a = Analyze(WorldVocoder(), silence, 5.0, "silence");
  CHECK(std::abs(static_cast<double>(a.num_frames()) - 200.0) <= 1.0);
  for (double f : a.f0) CHECK(f == 0.0);
  CHECK(a.spectral_envelope.rows() == a.num_frames());
  CHECK(a.aperiodicity.rows() == a.num_frames());
}

TEST_CASE("analyze: 220 Hz tone against an autocorrelation pitch estimator") {
  auto tone = Buzz(220.0, 1.0);
  const double reference = oracle::AutocorrelationPitch(tone.samples, tone.sample_rate, 70, 800);
  CHECK(std::abs(reference - 220.0) < 0.5);
  auto a = Analyze(WorldVocoder(), tone, 5.0, "tone");
  auto voiced = Voiced(a.f0);
  REQUIRE(voiced.size() > a.num_frames() / 2);
  CHECK(std::abs(oracle::Median(voiced) - reference) / reference < 0.02);
}

TEST_CASE("analyze: errors") {
  CHECK_THROWS_AS(Analyze(WorldVocoder(), Waveform{{}, 22050}, 5.0, "empty"), AnalysisError);
  try {
    Analyze(WorldVocoder(), Waveform{{}, 22050}, 5.0, "spk/utt01");
    FAIL("expected an error");
  } catch (const AnalysisError &e) {
    CHECK(e.utt_id() == "spk/utt01");
  }
  CHECK_THROWS_AS(Analyze(WorldVocoder(), Tone(220, 0.2, 0.5, 12345), 5.0, "rate"), AnalysisError);
  auto bad = Tone(220, 0.2);
  bad.samples[10] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Analyze(WorldVocoder(), bad, 5.0, "nan"), AnalysisError);
}

TEST_CASE("synthesize: duration and pitch survive the round trip") {
  WorldVocoder voc;
  auto tone = Buzz(220.0, 1.0);
  auto a = Analyze(voc, tone, 5.0);
  auto y = Synthesize(voc, a);
  CHECK(y.sample_rate == 22050);
  CHECK(std::abs(y.duration_seconds() - 1.0) <= 0.005);
  for (double s : y.samples) REQUIRE(std::isfinite(s));
  const double pitch = oracle::AutocorrelationPitch(
      std::vector<double>(y.samples.begin() + 2205, y.samples.end() - 2205), 22050, 70, 800);
  CHECK(std::abs(pitch - 220.0) / 220.0 < 0.02);
  auto b = Analyze(voc, y, 5.0);
  CHECK(std::abs(oracle::Median(Voiced(b.f0)) - 220.0) / 220.0 < 0.02);
}

TEST_CASE("synthesize: mismatched frame counts are rejected") {
  WorldVocoder voc;
  auto a = Analyze(voc, Tone(220.0, 0.3), 5.0);
  a.f0.pop_back();
  CHECK_THROWS(Synthesize(voc, a));
}

TEST_CASE("mcep: warping constant at 22.05 kHz") {
  CHECK(AllPassAlpha(22050) == doctest::Approx(0.455).epsilon(0.01));
  CHECK(WarpFrequency(0.0, 0.4) == doctest::Approx(0.0));
  CHECK(WarpFrequency(std::numbers::pi, 0.4) == doctest::Approx(std::numbers::pi));
  CHECK(WarpFrequency(1.0, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("mcep: flat envelope has only c0") {
  Matrix<double> env(200, 513);
  for (auto &v : env.values()) v = 1.0;
  auto m = EnvelopeToMcep(env, 36, AllPassAlpha(22050));
  CHECK(m.num_frames() == 200);
  CHECK(m.order() == 36);
  for (std::size_t t = 0; t < m.num_frames(); ++t)
    for (int k = 0; k <= 36; ++k) CHECK(std::abs(m.coeffs(t, k)) < 1e-9);

  Matrix<double> env2(3, 513);
  for (auto &v : env2.values()) v = 4.0;
  auto m2 = EnvelopeToMcep(env2, 36, 0.455);
  CHECK(m2.coeffs(0, 0) == doctest::Approx(std::log(4.0) / 2));
  for (int k = 1; k <= 36; ++k) CHECK(std::abs(m2.coeffs(1, k)) < 1e-9);
}

TEST_CASE("mcep: c0-only coefficients decode to a constant envelope") {
  McepSegment m{Matrix<double>(2, 37)};
  m.coeffs(0, 0) = 0.0;
  m.coeffs(1, 0) = 0.7;
  auto env = McepToEnvelope(m, 513, 0.455);
  for (int b = 0; b < 513; ++b) {
    CHECK(env(0, b) == doctest::Approx(1.0));
    CHECK(env(1, b) == doctest::Approx(std::exp(1.4)));
  }
}

TEST_CASE("mcep: order must be positive") {
  Matrix<double> env(2, 513);
  for (auto &v : env.values()) v = 1.0;
  CHECK_THROWS_AS(EnvelopeToMcep(env, 0, 0.455), InvalidArgument);
}

TEST_CASE("mcep: round trip on smooth synthetic spectra") {
  // Tolerance calibrated on a held-out sweep of single-bump spectra.
  std::mt19937_64 gen(7);
  const double alpha = AllPassAlpha(22050);
  double calibration = 0;
  {
    Matrix<double> sweep(40, 513);
    for (int t = 0; t < 40; ++t)
      for (int b = 0; b < 513; ++b) {
        const double x = b / 512.0, c = (t + 0.5) / 40.0;
        sweep(t, b) = std::exp(-2.0 * x + 2.0 * std::exp(-0.5 * std::pow((x - c) / 0.08, 2)));
      }
    calibration = MaxLogError(sweep, McepToEnvelope(EnvelopeToMcep(sweep, 36, alpha), 513, alpha));
  }
  CHECK(calibration < 0.5);
  auto env = RandomEnvelope(gen, 50, 513);
  auto m = EnvelopeToMcep(env, 36, alpha);
  CHECK(m.num_frames() == 50);
  auto back = McepToEnvelope(m, 513, alpha);
  CHECK(MaxLogError(env, back) < std::max(0.5, 2 * calibration));
}

TEST_CASE("mcep: random coefficients survive decode/encode") {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> n(0.0, 1.0);
  McepSegment m{Matrix<double>(20, 37)};
  for (std::size_t t = 0; t < 20; ++t)
    for (int k = 0; k <= 36; ++k) m.coeffs(t, k) = n(gen) * 0.5 / (1.0 + k);
  const double alpha = 0.455;
  auto again = EnvelopeToMcep(McepToEnvelope(m, 513, alpha), 36, alpha);
  double err = 0;
  for (std::size_t i = 0; i < m.coeffs.values().size(); ++i)
    err = std::max(err, std::abs(m.coeffs.values()[i] - again.coeffs.values()[i]));
  CHECK(err < 1e-3);
}

TEST_CASE("mcep: analysis frames preserved") {
  auto a = Analyze(WorldVocoder(), Tone(150.0, 0.5), 5.0);
  auto m = EnvelopeToMcep(a, 36);
  CHECK(m.num_frames() == a.num_frames());
  for (double v : m.coeffs.values()) CHECK(std::isfinite(v));
}

TEST_CASE("logf0 stats") {
  std::vector<double> constant(50, 200.0);
  auto s = ComputeLogF0Stats(constant);
  CHECK(s.mean == doctest::Approx(std::log(200.0)));
  CHECK(s.std == 0.0);
  CHECK(s.n_voiced == 50);

  std::vector<double> unvoiced(10, 0.0);
  auto u = ComputeLogF0Stats(unvoiced);
  CHECK(u.n_voiced == 0);
  CHECK_FALSE(u.defined());
  CHECK(std::isnan(u.mean));

  std::vector<double> mixed{200.0, 0.0, 300.0};
  auto m = ComputeLogF0Stats(mixed);
  const double a = std::log(200.0), b = std::log(300.0);
  CHECK(m.n_voiced == 2);
  CHECK(m.mean == doctest::Approx((a + b) / 2).epsilon(1e-14));
  CHECK(m.std == doctest::Approx(std::abs(b - a) / 2).epsilon(1e-14));
}

TEST_CASE("transform_logf0") {
  LogF0Stats src{5.3, 0.2, 10}, tgt{4.8, 0.1, 10};
  std::vector<double> f0{std::exp(5.5), 0.0};
  auto out = TransformLogF0(f0, src, tgt);
  CHECK(out[0] == doctest::Approx(134.28978).epsilon(1e-6));
  CHECK(std::abs(out[0] - 134.29) < 0.01);
  CHECK(out[1] == 0.0);

  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> hz(80.0, 400.0), coin(0.0, 1.0);
  std::vector<double> contour(500);
  for (auto &v : contour) v = coin(gen) < 0.3 ? 0.0 : hz(gen);
  auto cs = ComputeLogF0Stats(contour);
  auto same = TransformLogF0(contour, cs, cs);
  for (std::size_t i = 0; i < contour.size(); ++i) CHECK(same[i] == doctest::Approx(contour[i]).epsilon(1e-12));

  LogF0Stats target{std::log(120.0), 0.15, 1};
  auto mapped = TransformLogF0(contour, cs, target);
  REQUIRE(mapped.size() == contour.size());
  for (std::size_t i = 0; i < contour.size(); ++i) CHECK((mapped[i] > 0) == (contour[i] > 0));
  auto ms = ComputeLogF0Stats(mapped);
  CHECK(std::abs(ms.mean - target.mean) < 1e-9);
  CHECK(std::abs(ms.std - target.std) < 1e-9);
}

TEST_CASE("transform_logf0: degenerate and undefined statistics") {
  LogF0Stats flat{std::log(200.0), 0.0, 5}, tgt{4.8, 0.1, 10}, none;
  none.n_voiced = 0;
  std::vector<double> f0{200.0, 0.0, 200.0};
  ResetWarningCount();
  auto out = TransformLogF0(f0, flat, tgt);
  CHECK(out[0] == doctest::Approx(std::exp(4.8)));
  CHECK(out[1] == 0.0);
  CHECK(WarningCount() >= 1);
  CHECK_THROWS_AS(TransformLogF0(f0, none, tgt), InvalidArgument);
  CHECK_THROWS_AS(TransformLogF0(f0, tgt, none), InvalidArgument);
}

TEST_CASE("loudness: 997 Hz sine at -20 dBFS peak reads about -23 LUFS") {
  // A full-scale 1 kHz sine measures -3.01 LUFS, so -20 dB of amplitude
  // gives -23.01 LUFS.
  auto tone = Tone(997.0, 3.0, std::pow(10.0, -20.0 / 20.0), 48000);
  CHECK(IntegratedLoudness(tone) == doctest::Approx(-23.01).epsilon(0.005));
}

TEST_CASE("loudness normalization") {
  auto tone = Tone(440.0, 2.0, 0.1);
  auto at = NormalizeLoudness(tone, -23.0);
  CHECK(IntegratedLoudness(at.wave) == doctest::Approx(-23.0).epsilon(0.02));
  auto again = NormalizeLoudness(at.wave, -23.0);
  CHECK(again.gain == doctest::Approx(1.0).epsilon(1e-6));

  Waveform quieter = at.wave;
  for (auto &s : quieter.samples) s *= std::pow(10.0, -6.0 / 20.0);
  auto up = NormalizeLoudness(quieter, -23.0);
  CHECK(up.gain == doctest::Approx(std::pow(10.0, 6.0 / 20.0)).epsilon(1e-6));
  for (std::size_t i = 0; i < quieter.samples.size(); i += 97)
    CHECK(up.wave.samples[i] == doctest::Approx(quieter.samples[i] * up.gain));

  // Speech-like: a vowel-ish harmonic sound with syllable envelope.
  Waveform speech{std::vector<double>(22050 * 2), 22050};
  for (std::size_t n = 0; n < speech.samples.size(); ++n) {
    const double t = n / 22050.0;
    double v = 0;
    for (int h = 1; h <= 10; ++h) v += std::sin(2 * std::numbers::pi * 130.0 * h * t) / h;
    speech.samples[n] = 0.05 * v * (0.5 + 0.5 * std::sin(2 * std::numbers::pi * 3.0 * t));
  }
  auto sn = NormalizeLoudness(speech, -23.0);
  CHECK(std::abs(IntegratedLoudness(sn.wave) + 23.0) < 0.5);

  ResetWarningCount();
  Waveform silence{std::vector<double>(22050, 0.0), 22050};
  auto s = NormalizeLoudness(silence, -23.0);
  CHECK(s.gain == 1.0);
  CHECK(WarningCount() >= 1);
}

TEST_CASE("wav io round trip") {
  auto dir = TempDir("wav");
  auto tone = Tone(330.0, 0.25, 0.6);
  WriteWav(dir / "a.wav", tone);
  auto info = ReadWavInfo(dir / "a.wav");
  CHECK(info.sample_rate == 22050);
  CHECK(info.channels == 1);
  CHECK(info.bits_per_sample == 16);
  auto back = ReadWav(dir / "a.wav");
  REQUIRE(back.samples.size() == tone.samples.size());
  for (std::size_t i = 0; i < tone.samples.size(); ++i) CHECK(std::abs(back.samples[i] - tone.samples[i]) < 1.0 / 32767);
  CHECK_THROWS_AS(ReadWav(dir / "missing.wav"), IoError);
}

TEST_CASE("tensor container and feature cache round trip bit-identically") {
  auto dir = TempDir("cache");
  WorldVocoder voc;
  auto a = Analyze(voc, Tone(180.0, 0.4), 5.0);
  FeatureSet f;
  f.alpha = AllPassAlpha(22050);
  f.mcep = EnvelopeToMcep(a.spectral_envelope, 36, f.alpha);
  f.f0 = a.f0;
  f.aperiodicity = a.aperiodicity;
  f.source_hash = "0123456789abcdef";
  SaveFeatures(dir / "u.feat", f);
  auto c1 = TensorContainer::Load(dir / "u.feat");
  auto g = LoadFeatures(dir / "u.feat");
  SaveFeatures(dir / "v.feat", g);
  CHECK(ReadFileBytes(dir / "u.feat") == ReadFileBytes(dir / "v.feat"));
  CHECK(g.f0 == f.f0);
  CHECK(g.num_frames() == f.num_frames());
  CHECK(g.sample_rate == 22050);
  CHECK(g.frame_period_ms == 5.0);
  CHECK(g.alpha == f.alpha);
  CHECK(c1.At("mcep").dtype == DType::kF32);
  CHECK(c1.At("f0").dtype == DType::kF64);
  CHECK(c1.At("ap").shape == std::vector<std::int64_t>{static_cast<std::int64_t>(f.num_frames()), 513});
  CHECK(TensorContainer::Deserialize(c1.Serialize()) == c1);
}
