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

#include "wavc/acoustic/f0.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wavc/common/error.h"
#include "wavc/common/log.h"

namespace wavc {
namespace {

// Two-pass population statistics over the collected log values.
LogF0Stats FromLogs(const std::vector<double> &logs) {
  LogF0Stats s;
  const auto n = static_cast<std::int64_t>(logs.size());
  s.n_voiced = n;
  if (n == 0) {
    s.mean = std::numeric_limits<double>::quiet_NaN();
    s.std = std::numeric_limits<double>::quiet_NaN();
    return s;
  }
  double sum = 0.0;
  for (double v : logs) sum += v;
  s.mean = sum / static_cast<double>(n);
  double ss = 0.0;
  for (double v : logs) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / static_cast<double>(n));
  if (std::all_of(logs.begin(), logs.end(), [&](double v) { return v == logs.front(); })) s.std = 0.0;
  return s;
}

}  // namespace

LogF0Stats ComputeLogF0Stats(std::span<const double> f0) {
  std::vector<double> logs;
  for (double f : f0)
    if (f > 0.0) logs.push_back(std::log(f));
  return FromLogs(logs);
}

LogF0Stats ComputeLogF0Stats(const std::vector<std::vector<double>> &contours) {
  std::vector<double> logs;
  for (const auto &c : contours)
    for (double f : c)
      if (f > 0.0) logs.push_back(std::log(f));
  return FromLogs(logs);
}

std::vector<double> TransformLogF0(std::span<const double> f0, const LogF0Stats &src,
                                   const LogF0Stats &tgt) {
  if (!src.defined()) throw InvalidArgument("TransformLogF0: source statistics have no voiced frames");
  if (!tgt.defined()) throw InvalidArgument("TransformLogF0: target statistics have no voiced frames");
  const bool degenerate = !(src.std > 0.0);
  if (degenerate)
    WAVC_WARN << "source log-F0 std is 0; voiced frames are mapped to the target mean";

  std::vector<double> out(f0.size(), 0.0);
  for (std::size_t i = 0; i < f0.size(); ++i) {
    if (!(f0[i] > 0.0)) continue;
    const double z = degenerate ? 0.0 : (std::log(f0[i]) - src.mean) / src.std;
    out[i] = std::exp(tgt.mean + tgt.std * z);
  }
  return out;
}

}  // namespace wavc
