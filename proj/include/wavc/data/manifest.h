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

// Dataset manifest: utterance records, speaker table, train/holdout split,
// low-resource subsets and feature-cache bookkeeping.
//
// On disk a manifest is JSON lines. The first line is a header object
//   {"format": "wavc-manifest", "version": 1, "speakers": [...],
//    "provenance": {...}, "f0_stats": {...}, "skipped": [...]}
// followed by one object per utterance record.

#ifndef WAVC_DATA_MANIFEST_H_
#define WAVC_DATA_MANIFEST_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wavc/acoustic/f0.h"
#include "wavc/acoustic/vocoder.h"
#include "wavc/acoustic/waveform.h"

namespace wavc::data {

inline constexpr const char *kManifestFormat = "wavc-manifest";
inline constexpr int kManifestVersion = 1;
inline constexpr double kDefaultHoldoutFraction = 0.1;

enum class Split { kTrain, kHoldout };
const char *SplitName(Split s);
Split ParseSplit(const std::string &name);

struct UtteranceRecord {
  std::string utt_id;  // "<speaker>/<file stem>", unique
  std::string speaker;
  std::int64_t speaker_index = -1;
  std::string audio_path;
  std::int64_t n_frames = 0;  // 0 until features are cached
  std::string feature_path;   // empty until features are cached
  Split split = Split::kTrain;

  bool operator==(const UtteranceRecord &) const = default;
};

struct SkippedFile {
  std::string path;
  std::string reason;
  bool operator==(const SkippedFile &) const = default;
};

/// One low-resource subsetting step. m_samples < 0 means "full".
struct SubsetSpec {
  std::int64_t n_speakers = 0;
  std::int64_t m_samples = -1;
  std::uint64_t seed = 0;
  bool operator==(const SubsetSpec &) const = default;
};

/// Everything needed to re-derive a manifest from its audio root.
struct Provenance {
  std::string audio_root;
  double holdout_fraction = kDefaultHoldoutFraction;
  std::vector<SubsetSpec> subsets;  // applied in order
  bool operator==(const Provenance &) const = default;
};

struct Manifest {
  std::vector<UtteranceRecord> records;
  std::vector<std::string> speakers;  // index -> label
  Provenance provenance;
  std::vector<SkippedFile> skipped;
  std::map<std::string, LogF0Stats> f0_stats;  // by speaker label, training split only

  /// Throws InvalidArgument for an unknown label.
  std::int64_t SpeakerIndex(const std::string &label) const;
  const UtteranceRecord &Find(const std::string &utt_id) const;
  std::vector<UtteranceRecord> Records(Split split) const;
  /// Throws InvalidArgument on repeated utt ids or records whose speaker
  /// label and index disagree with the speaker table.
  void Validate() const;

  void Save(const std::filesystem::path &path) const;
  static Manifest Load(const std::filesystem::path &path);
  std::string ToJsonLines() const;
  static Manifest FromJsonLines(const std::string &text);
};

/// Number of held-out utterances for a speaker with n utterances: none for
/// n < 2, otherwise ceil(fraction * n) clamped to [1, n - 1].
std::int64_t HoldoutCount(std::int64_t n, double fraction);

/// Scans audio_root/<speaker>/<utterance>.wav in lexicographic order. Files
/// that cannot be read or have an unsupported sample rate go to `skipped`.
/// The last HoldoutCount(n) utterances of every speaker form the holdout.
Manifest BuildManifest(const std::filesystem::path &audio_root,
                       double holdout_fraction = kDefaultHoldoutFraction,
                       const std::vector<int> &supported_rates = WorldOptions{}.supported_rates);

/// Seeded subset: n_speakers speakers drawn uniformly, then m_samples
/// training utterances of each (all of them when m_samples < 0). Only
/// training records are kept; speakers are re-indexed in label order.
Manifest SubsetLowResource(const Manifest &m, std::int64_t n_speakers, std::int64_t m_samples,
                           std::uint64_t seed);

/// Rebuilds a manifest from its provenance (audio root + subset chain).
Manifest Rederive(const Provenance &provenance,
                  const std::vector<int> &supported_rates = WorldOptions{}.supported_rates);

struct CacheOptions {
  std::filesystem::path cache_root;
  double frame_period_ms = kDefaultFramePeriodMs;
  int mcep_order = kDefaultMcepOrder;
  WorldOptions world;
  int workers = 1;
};

struct CacheStats {
  std::int64_t analyzed = 0;
  std::int64_t reused = 0;
  std::vector<SkippedFile> failed;
};

/// 64-bit FNV-1a over bytes, as 16 hex digits.
std::string Fnv1aHex(std::span<const std::byte> bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// Hash identifying a cache entry: audio bytes plus every extraction setting.
std::string FeatureHash(const std::filesystem::path &audio_path, const CacheOptions &options);

/// Analyses every record (in parallel over `workers`), writes one feature
/// container per utterance under cache_root/<speaker>/<stem>.feat, fills
/// n_frames / feature_path and recomputes per-speaker F0 statistics over
/// the training split. Existing caches whose hash matches are reused.
/// Records whose analysis fails are dropped and reported in `failed`.
Manifest CacheFeatures(const Manifest &m, const CacheOptions &options, CacheStats *stats = nullptr);

/// Per-speaker LogF0Stats over training records with cached features.
std::map<std::string, LogF0Stats> ComputeSpeakerF0Stats(const Manifest &m);

}  // namespace wavc::data

#endif  // WAVC_DATA_MANIFEST_H_
