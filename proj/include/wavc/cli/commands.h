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

#ifndef WAVC_CLI_COMMANDS_H_
#define WAVC_CLI_COMMANDS_H_

#include <filesystem>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "wavc/acoustic/feature_cache.h"
#include "wavc/acoustic/waveform.h"
#include "wavc/cli/run_config.h"
#include "wavc/data/manifest.h"
#include "wavc/train/training.h"

namespace wavc::cli {

/// Config keys read by each subcommand, for --help.
std::vector<std::string> KeysReadBy(const std::string &command);

/// Writes <out_dir>/manifest.jsonl; returns its path.
std::filesystem::path CmdExtract(const RunConfig &c);
/// Reads paths.manifest, writes <out_dir>/manifest.jsonl.
std::filesystem::path CmdSubset(const RunConfig &c);
/// Returns the final checkpoint path.
std::filesystem::path CmdTrain(const RunConfig &c);
/// Writes one WAV per (source, target) pair under <out_dir>/converted and
/// the list of them to <out_dir>/conversions.jsonl; returns the latter.
std::filesystem::path CmdConvert(const RunConfig &c);
/// Writes <out_dir>/eval_report.json and eval_report.txt; returns the former.
std::filesystem::path CmdEvaluate(const RunConfig &c);

/// Cached MCEPs as float [D, T].
torch::Tensor McepTensor(const FeatureSet &f);

struct ConversionRequest {
  const FeatureSet *source = nullptr;
  std::string source_speaker;
  std::string target_speaker;
  torch::Tensor reference;  // raw target-speaker MCEPs [D, T]
  double loudness_lufs = -23.0;
  bool restore_c0 = true;
};

/// Generator-converted MCEPs [T, D] for `req`: edge-padded symmetrically to
/// the generator's time multiple, converted, trimmed, denormalized.
Matrix<double> ConvertMcep(train::TrainingState &state, const ConversionRequest &req);

/// Full pipeline: MCEP conversion, log-F0 transform, envelope decoding,
/// synthesis with the source aperiodicity, loudness normalization.
Waveform ConvertUtterance(train::TrainingState &state, const ConversionRequest &req);

/// Record of one converted file in conversions.jsonl.
struct ConversionRecord {
  std::string id;
  std::string source_utt;
  std::string source_speaker;
  std::string target_speaker;
  std::string wav_path;
};
void SaveConversions(const std::filesystem::path &path, const std::vector<ConversionRecord> &records);
std::vector<ConversionRecord> LoadConversions(const std::filesystem::path &path);

}  // namespace wavc::cli

#endif  // WAVC_CLI_COMMANDS_H_
