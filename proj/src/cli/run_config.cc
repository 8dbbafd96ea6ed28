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

#include "wavc/cli/run_config.h"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "wavc/common/error.h"

namespace wavc::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void Require(bool ok, const std::string &msg) {
  if (!ok) throw ConfigError(msg);
}

std::string Join(const std::string &prefix, const std::string &key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Copies `user` into `base`; objects merge key by key, anything else replaces.
void Merge(json &base, const json &user, const std::string &prefix) {
  if (!user.is_object()) throw ConfigError((prefix.empty() ? "config" : prefix) + ": expected an object");
  for (auto it = user.begin(); it != user.end(); ++it) {
    const auto key = Join(prefix, it.key());
    if (!base.contains(it.key())) throw ConfigError("unknown config key '" + key + "'");
    auto &slot = base[it.key()];
    if (slot.is_object())
      Merge(slot, it.value(), key);
    else
      slot = it.value();
  }
}

void Flatten(const json &j, const std::string &prefix, std::vector<std::pair<std::string, std::string>> &out) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    const auto key = Join(prefix, it.key());
    if (it.value().is_object())
      Flatten(it.value(), key, out);
    else
      out.emplace_back(key, it.value().dump());
  }
}

json MSamplesToJson(std::int64_t m) { return m < 0 ? json("full") : json(m); }

std::int64_t MSamplesFromJson(const json &j) {
  if (j.is_string()) {
    Require(j.get<std::string>() == "full", "subset.m_samples must be a positive integer or \"full\"");
    return -1;
  }
  return j.get<std::int64_t>();
}

}  // namespace

WorldOptions FeatureSettings::World() const {
  WorldOptions w;
  w.f0_estimator = f0_estimator == "dio" ? F0Estimator::kDio : F0Estimator::kHarvest;
  w.f0_floor = f0_floor;
  w.f0_ceil = f0_ceil;
  w.fft_size = fft_size;
  return w;
}

fs::path RunConfig::CacheRoot() const {
  if (!paths.cache_root.empty()) return paths.cache_root;
  if (const char *env = std::getenv(kCacheRootEnv); env != nullptr && *env != '\0') return env;
  return fs::path(paths.out_dir) / "cache";
}

void RunConfig::Validate() const {
  Require(features.frame_period_ms > 0, "features.frame_period_ms must be > 0");
  Require(features.mcep_order >= 1, "features.mcep_order must be >= 1");
  Require(features.f0_estimator == "harvest" || features.f0_estimator == "dio",
          "features.f0_estimator must be \"harvest\" or \"dio\"");
  Require(features.f0_floor > 0 && features.f0_ceil > features.f0_floor,
          "features.f0_floor/f0_ceil must satisfy 0 < floor < ceil");
  Require(features.fft_size >= 64 && (features.fft_size & (features.fft_size - 1)) == 0,
          "features.fft_size must be a power of two >= 64");
  Require(features.holdout_fraction >= 0 && features.holdout_fraction < 1,
          "features.holdout_fraction must be in [0, 1)");
  Require(features.workers >= 1, "features.workers must be >= 1");
  Require(subset.n_speakers >= 0, "subset.n_speakers must be >= 0");
  Require(subset.m_samples == -1 || subset.m_samples >= 1, "subset.m_samples must be >= 1 or \"full\"");
  Require(!paths.out_dir.empty(), "paths.out_dir must not be empty");
  model.generator.Validate();
  model.discriminator.Validate();
  model.encoder.Validate();
  training.Validate(model.generator.time_multiple());
  evaluate.classifier.Validate();
}

json ToJson(const RunConfig &c) {
  json j;
  j["paths"] = {{"audio_root", c.paths.audio_root},   {"manifest", c.paths.manifest},
                {"cache_root", c.paths.cache_root},   {"out_dir", c.paths.out_dir},
                {"checkpoint", c.paths.checkpoint},   {"resume_from", c.paths.resume_from},
                {"conversions", c.paths.conversions}};
  j["features"] = {{"frame_period_ms", c.features.frame_period_ms}, {"mcep_order", c.features.mcep_order},
                   {"f0_estimator", c.features.f0_estimator},       {"f0_floor", c.features.f0_floor},
                   {"f0_ceil", c.features.f0_ceil},                 {"fft_size", c.features.fft_size},
                   {"holdout_fraction", c.features.holdout_fraction}, {"workers", c.features.workers}};
  j["subset"] = {{"n_speakers", c.subset.n_speakers},
                 {"m_samples", MSamplesToJson(c.subset.m_samples)},
                 {"seed", c.subset.seed}};
  j["model"] = c.model;
  j["training"] = c.training;
  j["convert"] = {{"sources", c.convert.sources},
                  {"targets", c.convert.targets},
                  {"reference", c.convert.reference},
                  {"loudness_lufs", c.convert.loudness_lufs},
                  {"restore_c0", c.convert.restore_c0}};
  j["evaluate"] = {{"classifier", c.evaluate.classifier}, {"condition", c.evaluate.condition}};
  return j;
}

RunConfig FromJson(const json &user) {
  json merged = ToJson(RunConfig{});
  Merge(merged, user, "");
  RunConfig c;
  std::string section;
  try {
    section = "paths";
    const auto &p = merged.at("paths");
    p.at("audio_root").get_to(c.paths.audio_root);
    p.at("manifest").get_to(c.paths.manifest);
    p.at("cache_root").get_to(c.paths.cache_root);
    p.at("out_dir").get_to(c.paths.out_dir);
    p.at("checkpoint").get_to(c.paths.checkpoint);
    p.at("resume_from").get_to(c.paths.resume_from);
    p.at("conversions").get_to(c.paths.conversions);
    section = "features";
    const auto &f = merged.at("features");
    f.at("frame_period_ms").get_to(c.features.frame_period_ms);
    f.at("mcep_order").get_to(c.features.mcep_order);
    f.at("f0_estimator").get_to(c.features.f0_estimator);
    f.at("f0_floor").get_to(c.features.f0_floor);
    f.at("f0_ceil").get_to(c.features.f0_ceil);
    f.at("fft_size").get_to(c.features.fft_size);
    f.at("holdout_fraction").get_to(c.features.holdout_fraction);
    f.at("workers").get_to(c.features.workers);
    section = "subset";
    const auto &s = merged.at("subset");
    s.at("n_speakers").get_to(c.subset.n_speakers);
    c.subset.m_samples = MSamplesFromJson(s.at("m_samples"));
    s.at("seed").get_to(c.subset.seed);
    section = "model";
    merged.at("model").get_to(c.model);
    section = "training";
    merged.at("training").get_to(c.training);
    section = "convert";
    const auto &v = merged.at("convert");
    v.at("sources").get_to(c.convert.sources);
    v.at("targets").get_to(c.convert.targets);
    v.at("reference").get_to(c.convert.reference);
    v.at("loudness_lufs").get_to(c.convert.loudness_lufs);
    v.at("restore_c0").get_to(c.convert.restore_c0);
    section = "evaluate";
    merged.at("evaluate").at("classifier").get_to(c.evaluate.classifier);
    merged.at("evaluate").at("condition").get_to(c.evaluate.condition);
  } catch (const json::exception &e) {
    throw ConfigError("config section '" + section + "': " + e.what());
  }
  return c;
}

std::pair<std::string, json> ParseOverride(const std::string &text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + text + "' is not key=value");
  const auto key = text.substr(0, eq);
  const auto raw = text.substr(eq + 1);
  json value = json::parse(raw, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = raw;
  return {key, value};
}

void ApplyOverride(json &j, const std::string &key, const json &value) {
  const json defaults = ToJson(RunConfig{});
  const json *d = &defaults;
  json *slot = &j;
  std::stringstream ss(key);
  std::string part;
  std::vector<std::string> parts;
  while (std::getline(ss, part, '.')) parts.push_back(part);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (!d->is_object() || !d->contains(parts[i])) throw ConfigError("unknown config key '" + key + "'");
    d = &d->at(parts[i]);
    if (!slot->is_object()) *slot = json::object();
    slot = &(*slot)[parts[i]];
  }
  if (d->is_object()) throw ConfigError("config key '" + key + "' is a section, not a value");
  *slot = value;
}

RunConfig LoadRunConfig(const std::optional<fs::path> &config_file, const std::vector<std::string> &overrides,
                        std::optional<std::uint64_t> seed, const std::optional<std::string> &out_dir) {
  json user = json::object();
  if (config_file) {
    std::ifstream in(*config_file);
    if (!in) throw ConfigError("cannot read config file " + config_file->string());
    try {
      user = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error &e) {
      throw ConfigError(config_file->string() + ": " + e.what());
    }
  }
  for (const auto &o : overrides) {
    auto [key, value] = ParseOverride(o);
    ApplyOverride(user, key, value);
  }
  if (seed) {
    ApplyOverride(user, "training.seed", *seed);
    ApplyOverride(user, "subset.seed", *seed);
    ApplyOverride(user, "evaluate.classifier.seed", *seed);
  }
  if (out_dir) ApplyOverride(user, "paths.out_dir", *out_dir);
  auto c = FromJson(user);
  c.Validate();
  return c;
}

std::vector<std::pair<std::string, std::string>> DescribeKeys(const std::vector<std::string> &prefixes) {
  std::vector<std::pair<std::string, std::string>> all, out;
  Flatten(ToJson(RunConfig{}), "", all);
  for (auto &kv : all) {
    bool keep = prefixes.empty();
    for (const auto &p : prefixes) keep = keep || kv.first.rfind(p, 0) == 0;
    if (keep) out.push_back(std::move(kv));
  }
  return out;
}

}  // namespace wavc::cli
