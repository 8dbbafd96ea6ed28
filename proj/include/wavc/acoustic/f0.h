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

#ifndef WAVC_ACOUSTIC_F0_H_
#define WAVC_ACOUSTIC_F0_H_

#include <cstdint>
#include <span>
#include <vector>

namespace wavc {

/// Log-F0 statistics over voiced frames. mean/std are NaN when n_voiced == 0.
struct LogF0Stats {
  double mean = 0.0;
  double std = 0.0;  // population std
  std::int64_t n_voiced = 0;

  bool defined() const { return n_voiced > 0; }
};

/// Mean and population std of ln(f0) over frames with f0 > 0.
LogF0Stats ComputeLogF0Stats(std::span<const double> f0);

/// Pools several contours (e.g. all training utterances of one speaker).
LogF0Stats ComputeLogF0Stats(const std::vector<std::vector<double>> &contours);

/// Maps voiced frames by exp(tgt.mean + tgt.std * (ln f0 - src.mean) / src.std);
/// unvoiced frames stay 0. Throws InvalidArgument if either side has no voiced
/// frames. A degenerate source (std == 0) maps every voiced frame to
/// exp(tgt.mean) and logs a warning.
std::vector<double> TransformLogF0(std::span<const double> f0, const LogF0Stats &src,
                                   const LogF0Stats &tgt);

}  // namespace wavc

#endif  // WAVC_ACOUSTIC_F0_H_
