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

#ifndef WAVC_ACOUSTIC_FEATURE_CACHE_H_
#define WAVC_ACOUSTIC_FEATURE_CACHE_H_

#include <filesystem>
#include <string>

#include "wavc/acoustic/waveform.h"
#include "wavc/io/tensor_container.h"

namespace wavc {

inline constexpr const char *kFeatureCacheFormat = "wavc-features";
inline constexpr int kFeatureCacheVersion = 1;

/// Per-utterance cached features. Stored as a tensor container (see
/// docs/feature_cache.md) with arrays
///   mcep : F32 [T, order+1]
///   f0   : F64 [T]
///   ap   : F32 [T, fft_size/2+1]
/// and metadata format, version, frame_period_ms, sample_rate, alpha,
/// source_hash.
struct FeatureSet {
  McepSegment mcep;
  std::vector<double> f0;
  Matrix<double> aperiodicity;
  double frame_period_ms = kDefaultFramePeriodMs;
  int sample_rate = kDefaultSampleRate;
  double alpha = 0.0;
  /// Hash of the source audio bytes plus extraction settings; an existing
  /// cache entry with the same hash is reused.
  std::string source_hash;

  std::size_t num_frames() const { return f0.size(); }
};

TensorContainer ToContainer(const FeatureSet &features);
FeatureSet FromContainer(const TensorContainer &container);

void SaveFeatures(const std::filesystem::path &path, const FeatureSet &features);
FeatureSet LoadFeatures(const std::filesystem::path &path);

}  // namespace wavc

#endif  // WAVC_ACOUSTIC_FEATURE_CACHE_H_
