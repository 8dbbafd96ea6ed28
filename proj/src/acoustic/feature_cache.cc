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

#include "wavc/acoustic/feature_cache.h"

#include <cstdio>

namespace wavc {
namespace {

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<float> ToFloat(const std::vector<double> &v) { return {v.begin(), v.end()}; }

}  // namespace

TensorContainer ToContainer(const FeatureSet &f) {
  const auto frames = static_cast<std::int64_t>(f.num_frames());
  if (f.mcep.num_frames() != f.num_frames() || f.aperiodicity.rows() != f.num_frames())
    throw ShapeError("FeatureSet: mcep, f0 and aperiodicity frame counts differ");
  TensorContainer c;
  auto mcep = ToFloat(f.mcep.coeffs.values());
  auto ap = ToFloat(f.aperiodicity.values());
  c.Put<float>("mcep", mcep, {frames, static_cast<std::int64_t>(f.mcep.coeffs.cols())});
  c.Put<double>("f0", f.f0, {frames});
  c.Put<float>("ap", ap, {frames, static_cast<std::int64_t>(f.aperiodicity.cols())});
  auto &m = c.metadata();
  m["format"] = kFeatureCacheFormat;
  m["version"] = std::to_string(kFeatureCacheVersion);
  m["frame_period_ms"] = FormatDouble(f.frame_period_ms);
  m["sample_rate"] = std::to_string(f.sample_rate);
  m["alpha"] = FormatDouble(f.alpha);
  m["source_hash"] = f.source_hash;
  return c;
}

FeatureSet FromContainer(const TensorContainer &c) {
  if (c.Meta("format") != kFeatureCacheFormat) throw IoError("not a feature cache container");
  if (std::stoi(c.Meta("version")) != kFeatureCacheVersion)
    throw IoError("unsupported feature cache version " + c.Meta("version"));
  FeatureSet f;
  std::vector<std::int64_t> mshape, fshape, ashape;
  auto mcep = c.Get<float>("mcep", &mshape);
  f.f0 = c.Get<double>("f0", &fshape);
  auto ap = c.Get<float>("ap", &ashape);
  if (mshape.size() != 2 || ashape.size() != 2 || fshape.size() != 1 || mshape[0] != fshape[0] ||
      ashape[0] != fshape[0])
    throw IoError("feature cache arrays have inconsistent shapes");
  f.mcep.coeffs = Matrix<double>(mshape[0], mshape[1], std::vector<double>(mcep.begin(), mcep.end()));
  f.aperiodicity = Matrix<double>(ashape[0], ashape[1], std::vector<double>(ap.begin(), ap.end()));
  f.frame_period_ms = std::stod(c.Meta("frame_period_ms"));
  f.sample_rate = std::stoi(c.Meta("sample_rate"));
  f.alpha = std::stod(c.Meta("alpha"));
  f.source_hash = c.Meta("source_hash");
  return f;
}

void SaveFeatures(const std::filesystem::path &path, const FeatureSet &features) {
  ToContainer(features).Save(path);
}

FeatureSet LoadFeatures(const std::filesystem::path &path) {
  try {
    return FromContainer(TensorContainer::Load(path));
  } catch (const std::invalid_argument &) {
    throw IoError(path.string() + ": malformed numeric metadata");
  }
}

}  // namespace wavc
