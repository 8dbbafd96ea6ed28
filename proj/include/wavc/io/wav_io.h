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

#ifndef WAVC_IO_WAV_IO_H_
#define WAVC_IO_WAV_IO_H_

#include <filesystem>

#include "wavc/acoustic/waveform.h"

namespace wavc {

struct WavInfo {
  int sample_rate = 0;
  int channels = 0;
  int bits_per_sample = 0;
  bool is_float = false;
};

/// Reads the RIFF header only.
WavInfo ReadWavInfo(const std::filesystem::path &path);

/// Reads a mono WAV (16/24/32-bit PCM or 32-bit float) into [-1, 1] samples.
/// Multi-channel files are rejected.
Waveform ReadWav(const std::filesystem::path &path);

/// Writes 16-bit PCM mono. Samples outside [-1, 1] are clipped.
void WriteWav(const std::filesystem::path &path, const Waveform &wave);

}  // namespace wavc

#endif  // WAVC_IO_WAV_IO_H_
