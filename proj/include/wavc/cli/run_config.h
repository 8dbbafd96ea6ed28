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

// Run configuration shared by all subcommands: a JSON document whose keys
// must all exist in the defaults, plus dotted key=value overrides.

#ifndef WAVC_CLI_RUN_CONFIG_H_
#define WAVC_CLI_RUN_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "wavc/acoustic/vocoder.h"
#include "wavc/eval/evaluation.h"
#include "wavc/train/training.h"

namespace wavc::cli {

inline constexpr const char *kCacheRootEnv = "WAVC_CACHE_ROOT";

struct Paths {
  std::string audio_root;   // extract: <root>/<speaker>/<utterance>.wav
  std::string manifest;     // subset/train/convert/evaluate input
  std::string cache_root;   // empty: $WAVC_CACHE_ROOT, else <out_dir>/cache
  std::string out_dir = "wavc_out";
  std::string checkpoint;   // convert input
  std::string resume_from;  // train: checkpoint to continue from
  std::string conversions;  // evaluate input, written by convert
};

struct FeatureSettings {
  double frame_period_ms = kDefaultFramePeriodMs;
  int mcep_order = kDefaultMcepOrder;
  std::string f0_estimator = "harvest";  // or "dio"
  double f0_floor = 71.0;
  double f0_ceil = 800.0;
  int fft_size = kDefaultFftSize;
  double holdout_fraction = 0.1;
  int workers = 1;

  WorldOptions World() const;
};

struct SubsetSettings {
  std::int64_t n_speakers = 0;  // 0: keep every speaker
  std::int64_t m_samples = -1;  // -1 ("full"): every training utterance
  std::uint64_t seed = 0;
};

struct ConvertSettings {
  std::vector<std::string> sources;  // utt ids; empty: every holdout utterance
  std::vector<std::string> targets;  // speaker labels; empty: every speaker
  std::string reference;             // utt id; empty: target's longest training utterance
  double loudness_lufs = -23.0;
  bool restore_c0 = true;            // carry the source energy coefficient through
};

struct EvaluateSettings {
  eval::ClassifierConfig classifier;
  std::string condition;
};

struct RunConfig {
  Paths paths;
  FeatureSettings features;
  SubsetSettings subset;
  train::ModelConfig model;
  train::TrainingConfig training;
  ConvertSettings convert;
  EvaluateSettings evaluate;

  /// Cache root after applying the environment fallback.
  std::filesystem::path CacheRoot() const;
  /// Range checks on every section; throws ConfigError.
  void Validate() const;
};

nlohmann::json ToJson(const RunConfig &c);
/// Every key of `j` must exist in the defaults; throws ConfigError naming
/// the first unknown or ill-typed key.
RunConfig FromJson(const nlohmann::json &j);

/// Parses "a.b.c=value"; value is read as JSON, falling back to a string.
std::pair<std::string, nlohmann::json> ParseOverride(const std::string &text);
/// Sets a dotted key inside `j`; the key must exist in the defaults.
void ApplyOverride(nlohmann::json &j, const std::string &key, const nlohmann::json &value);

/// Loads defaults, merges the optional config file, applies overrides and
/// `seed` (training, subset and classifier seeds), then validates.
RunConfig LoadRunConfig(const std::optional<std::filesystem::path> &config_file,
                        const std::vector<std::string> &overrides, std::optional<std::uint64_t> seed,
                        const std::optional<std::string> &out_dir);

/// Dotted keys with their default values, sorted by key, restricted to
/// keys starting with one of `prefixes` (all keys when empty).
std::vector<std::pair<std::string, std::string>> DescribeKeys(const std::vector<std::string> &prefixes = {});

}  // namespace wavc::cli

#endif  // WAVC_CLI_RUN_CONFIG_H_
