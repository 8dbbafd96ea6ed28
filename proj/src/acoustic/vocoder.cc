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

#include "wavc/acoustic/vocoder.h"

#include <algorithm>
#include <cmath>

#include "wavc/common/error.h"
#include "world/cheaptrick.h"
#include "world/d4c.h"
#include "world/dio.h"
#include "world/harvest.h"
#include "world/stonemask.h"
#include "world/synthesis.h"

namespace wavc {

void Waveform::Validate() const {
  if (sample_rate <= 0) throw InvalidArgument("Waveform: sample_rate must be positive");
  for (double s : samples)
    if (!std::isfinite(s)) throw InvalidArgument("Waveform: non-finite sample");
}

void VocoderAnalysis::Validate() const {
  if (frame_period_ms <= 0) throw InvalidArgument("VocoderAnalysis: frame_period must be positive");
  if (sample_rate <= 0) throw InvalidArgument("VocoderAnalysis: sample_rate must be positive");
  const std::size_t n = f0.size();
  if (spectral_envelope.rows() != n || aperiodicity.rows() != n)
    throw ShapeError("VocoderAnalysis: f0 has " + std::to_string(n) + " frames, envelope " +
                     std::to_string(spectral_envelope.rows()) + ", aperiodicity " +
                     std::to_string(aperiodicity.rows()));
  if (spectral_envelope.cols() != aperiodicity.cols())
    throw ShapeError("VocoderAnalysis: envelope and aperiodicity bin counts differ");
  for (double v : f0)
    if (!(v >= 0.0)) throw InvalidArgument("VocoderAnalysis: f0 must be >= 0 and finite");
}

namespace {

std::vector<double *> RowPointers(Matrix<double> &m) {
  std::vector<double *> rows(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) rows[r] = m.row(r).data();
  return rows;
}

std::vector<const double *> RowPointers(const Matrix<double> &m) {
  std::vector<const double *> rows(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) rows[r] = m.row(r).data();
  return rows;
}

bool AllFinite(const std::vector<double> &v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

WorldVocoder::WorldVocoder(WorldOptions options) : options_(std::move(options)) {
  if (options_.f0_floor <= 0 || options_.f0_ceil <= options_.f0_floor)
    throw InvalidArgument("WorldVocoder: need 0 < f0_floor < f0_ceil");
  if (options_.fft_size < 64 || (options_.fft_size & (options_.fft_size - 1)) != 0)
    throw InvalidArgument("WorldVocoder: fft_size must be a power of two >= 64");
}

bool WorldVocoder::SupportsRate(int sample_rate) const {
  return std::find(options_.supported_rates.begin(), options_.supported_rates.end(), sample_rate) !=
         options_.supported_rates.end();
}

VocoderAnalysis WorldVocoder::Analyze(const Waveform &wave, double frame_period_ms,
                                      const std::string &utt_id) const {
  if (wave.samples.empty()) throw AnalysisError(utt_id, "empty waveform");
  if (!(frame_period_ms > 0)) throw AnalysisError(utt_id, "frame period must be positive");
  if (!SupportsRate(wave.sample_rate))
    throw AnalysisError(utt_id, "unsupported sample rate " + std::to_string(wave.sample_rate));
  if (!AllFinite(wave.samples)) throw AnalysisError(utt_id, "non-finite samples");

  const int fs = wave.sample_rate;
  const int x_length = static_cast<int>(wave.samples.size());
  const double *x = wave.samples.data();

  VocoderAnalysis out;
  out.frame_period_ms = frame_period_ms;
  out.sample_rate = fs;

  int f0_length = 0;
  std::vector<double> time_axis;
  if (options_.f0_estimator == F0Estimator::kHarvest) {
    HarvestOption opt;
    InitializeHarvestOption(&opt);
    opt.f0_floor = options_.f0_floor;
    opt.f0_ceil = options_.f0_ceil;
    opt.frame_period = frame_period_ms;
    f0_length = GetSamplesForHarvest(fs, x_length, frame_period_ms);
    time_axis.resize(f0_length);
    out.f0.resize(f0_length);
    Harvest(x, x_length, fs, &opt, time_axis.data(), out.f0.data());
  } else {
    DioOption opt;
    InitializeDioOption(&opt);
    opt.f0_floor = options_.f0_floor;
    opt.f0_ceil = options_.f0_ceil;
    opt.frame_period = frame_period_ms;
    f0_length = GetSamplesForDIO(fs, x_length, frame_period_ms);
    time_axis.resize(f0_length);
    std::vector<double> coarse(f0_length);
    Dio(x, x_length, fs, &opt, time_axis.data(), coarse.data());
    out.f0.resize(f0_length);
    StoneMask(x, x_length, fs, time_axis.data(), coarse.data(), f0_length, out.f0.data());
  }
  if (f0_length <= 0) throw AnalysisError(utt_id, "waveform too short for analysis");
  for (double &f : out.f0) {
    if (!std::isfinite(f)) throw AnalysisError(utt_id, "F0 estimator produced non-finite values");
    if (f < 0) f = 0;
  }

  CheapTrickOption ct;
  InitializeCheapTrickOption(fs, &ct);
  ct.fft_size = options_.fft_size;
  ct.f0_floor = GetF0FloorForCheapTrick(fs, options_.fft_size);
  const std::size_t bins = static_cast<std::size_t>(options_.fft_size / 2 + 1);
  out.spectral_envelope = Matrix<double>(f0_length, bins);
  {
    auto rows = RowPointers(out.spectral_envelope);
    CheapTrick(x, x_length, fs, time_axis.data(), out.f0.data(), f0_length, &ct, rows.data());
  }

  D4COption d4c;
  InitializeD4COption(&d4c);
  out.aperiodicity = Matrix<double>(f0_length, bins);
  {
    auto rows = RowPointers(out.aperiodicity);
    D4C(x, x_length, fs, time_axis.data(), out.f0.data(), f0_length, options_.fft_size, &d4c,
        rows.data());
  }
  if (!AllFinite(out.spectral_envelope.values()) || !AllFinite(out.aperiodicity.values()))
    throw AnalysisError(utt_id, "spectral analysis produced non-finite values");
  return out;
}

Waveform WorldVocoder::Synthesize(const VocoderAnalysis &analysis) const {
  analysis.Validate();
  if (analysis.num_frames() == 0) throw InvalidArgument("Synthesize: no frames");
  const int fft_size = analysis.fft_size();
  if (fft_size < 64 || (fft_size & (fft_size - 1)) != 0)
    throw ShapeError("Synthesize: envelope bin count does not correspond to a power-of-two FFT");
  const int f0_length = static_cast<int>(analysis.num_frames());
  const int fs = analysis.sample_rate;
  const int y_length =
      static_cast<int>((f0_length - 1) * analysis.frame_period_ms / 1000.0 * fs) + 1;

  auto sp = RowPointers(analysis.spectral_envelope);
  auto ap = RowPointers(analysis.aperiodicity);
  Waveform out;
  out.sample_rate = fs;
  out.samples.assign(y_length, 0.0);
  ::Synthesis(analysis.f0.data(), f0_length, sp.data(), ap.data(), fft_size,
              analysis.frame_period_ms, fs, y_length, out.samples.data());
  if (!AllFinite(out.samples)) throw AnalysisError("", "synthesis produced non-finite samples");
  return out;
}

VocoderAnalysis Analyze(const VocoderBackend &backend, const Waveform &wave,
                        double frame_period_ms, const std::string &utt_id) {
  return backend.Analyze(wave, frame_period_ms, utt_id);
}

Waveform Synthesize(const VocoderBackend &backend, const VocoderAnalysis &analysis) {
  return backend.Synthesize(analysis);
}

}  // namespace wavc
