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

#include "wavc/data/manifest.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "wavc/acoustic/feature_cache.h"
#include "wavc/acoustic/mcep.h"
#include "wavc/common/error.h"
#include "wavc/common/log.h"
#include "wavc/common/rng.h"
#include "wavc/io/tensor_container.h"
#include "wavc/io/wav_io.h"

namespace wavc::data {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json StatsToJson(const LogF0Stats &s) {
  json j = {{"n_voiced", s.n_voiced}, {"mean", nullptr}, {"std", nullptr}};
  if (s.defined()) {
    j["mean"] = s.mean;
    j["std"] = s.std;
  }
  return j;
}

LogF0Stats StatsFromJson(const json &j) {
  LogF0Stats s;
  s.n_voiced = j.at("n_voiced").get<std::int64_t>();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  s.mean = j.at("mean").is_null() ? nan : j["mean"].get<double>();
  s.std = j.at("std").is_null() ? nan : j["std"].get<double>();
  return s;
}

json RecordToJson(const UtteranceRecord &r) {
  return {{"utt_id", r.utt_id},         {"speaker", r.speaker},   {"speaker_index", r.speaker_index},
          {"audio_path", r.audio_path}, {"n_frames", r.n_frames}, {"feature_path", r.feature_path},
          {"split", SplitName(r.split)}};
}

UtteranceRecord RecordFromJson(const json &j) {
  UtteranceRecord r;
  j.at("utt_id").get_to(r.utt_id);
  j.at("speaker").get_to(r.speaker);
  j.at("speaker_index").get_to(r.speaker_index);
  j.at("audio_path").get_to(r.audio_path);
  j.at("n_frames").get_to(r.n_frames);
  j.at("feature_path").get_to(r.feature_path);
  r.split = ParseSplit(j.at("split").get<std::string>());
  return r;
}

json ProvenanceToJson(const Provenance &p) {
  json subsets = json::array();
  for (const auto &s : p.subsets)
    subsets.push_back({{"n_speakers", s.n_speakers},
                       {"m_samples", s.m_samples < 0 ? json("full") : json(s.m_samples)},
                       {"seed", s.seed}});
  return {{"audio_root", p.audio_root},
          {"split", {{"holdout_fraction", p.holdout_fraction},
                     {"rule", "last max(1, ceil(fraction*n)) utterances per speaker in lexicographic "
                              "order, at least one kept for training; none when n < 2"}}},
          {"subsets", subsets}};
}

Provenance ProvenanceFromJson(const json &j) {
  Provenance p;
  j.at("audio_root").get_to(p.audio_root);
  j.at("split").at("holdout_fraction").get_to(p.holdout_fraction);
  for (const auto &s : j.at("subsets")) {
    SubsetSpec spec;
    s.at("n_speakers").get_to(spec.n_speakers);
    spec.m_samples = s.at("m_samples").is_string() ? -1 : s["m_samples"].get<std::int64_t>();
    s.at("seed").get_to(spec.seed);
    p.subsets.push_back(spec);
  }
  return p;
}

std::string FormatDouble(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

const char *SplitName(Split s) { return s == Split::kTrain ? "train" : "holdout"; }

Split ParseSplit(const std::string &name) {
  if (name == "train") return Split::kTrain;
  if (name == "holdout") return Split::kHoldout;
  throw IoError("unknown split '" + name + "'");
}

std::int64_t Manifest::SpeakerIndex(const std::string &label) const {
  auto it = std::find(speakers.begin(), speakers.end(), label);
  if (it == speakers.end()) throw InvalidArgument("unknown speaker '" + label + "'");
  return it - speakers.begin();
}

const UtteranceRecord &Manifest::Find(const std::string &utt_id) const {
  for (const auto &r : records)
    if (r.utt_id == utt_id) return r;
  throw InvalidArgument("unknown utterance '" + utt_id + "'");
}

std::vector<UtteranceRecord> Manifest::Records(Split split) const {
  std::vector<UtteranceRecord> out;
  for (const auto &r : records)
    if (r.split == split) out.push_back(r);
  return out;
}

void Manifest::Validate() const {
  std::set<std::string> ids;
  for (const auto &r : records) {
    if (!ids.insert(r.utt_id).second) throw InvalidArgument("duplicate utterance id '" + r.utt_id + "'");
    if (r.speaker_index < 0 || r.speaker_index >= static_cast<std::int64_t>(speakers.size()) ||
        speakers[r.speaker_index] != r.speaker)
      throw InvalidArgument(r.utt_id + ": speaker '" + r.speaker + "' does not match index " +
                            std::to_string(r.speaker_index));
  }
}

std::string Manifest::ToJsonLines() const {
  json stats = json::object();
  for (const auto &[spk, s] : f0_stats) stats[spk] = StatsToJson(s);
  json skip = json::array();
  for (const auto &s : skipped) skip.push_back({{"path", s.path}, {"reason", s.reason}});
  json header = {{"format", kManifestFormat}, {"version", kManifestVersion},
                 {"speakers", speakers},      {"provenance", ProvenanceToJson(provenance)},
                 {"f0_stats", stats},         {"skipped", skip}};
  std::string out = header.dump() + "\n";
  for (const auto &r : records) out += RecordToJson(r).dump() + "\n";
  return out;
}

Manifest Manifest::FromJsonLines(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  Manifest m;
  bool have_header = false;
  int line_no = 0;
  try {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      auto j = json::parse(line);
      if (!have_header) {
        if (j.value("format", "") != kManifestFormat) throw IoError("not a manifest file");
        if (j.at("version").get<int>() != kManifestVersion)
          throw IoError("unsupported manifest version " + j["version"].dump());
        j.at("speakers").get_to(m.speakers);
        m.provenance = ProvenanceFromJson(j.at("provenance"));
        for (const auto &[spk, s] : j.at("f0_stats").items()) m.f0_stats[spk] = StatsFromJson(s);
        for (const auto &s : j.at("skipped"))
          m.skipped.push_back({s.at("path").get<std::string>(), s.at("reason").get<std::string>()});
        have_header = true;
      } else {
        m.records.push_back(RecordFromJson(j));
      }
    }
  } catch (const json::exception &e) {
    throw IoError("manifest line " + std::to_string(line_no) + ": " + e.what());
  }
  if (!have_header) throw IoError("manifest is empty");
  m.Validate();
  return m;
}

void Manifest::Save(const fs::path &path) const {
  auto text = ToJsonLines();
  AtomicWriteFile(path, std::as_bytes(std::span(text.data(), text.size())));
}

Manifest Manifest::Load(const fs::path &path) {
  auto bytes = ReadFileBytes(path);
  try {
    return FromJsonLines(std::string(reinterpret_cast<const char *>(bytes.data()), bytes.size()));
  } catch (const IoError &e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::int64_t HoldoutCount(std::int64_t n, double fraction) {
  if (n < 2 || fraction <= 0.0) return 0;
  auto h = static_cast<std::int64_t>(std::ceil(fraction * static_cast<double>(n) - 1e-9));
  return std::clamp<std::int64_t>(h, 1, n - 1);
}

Manifest BuildManifest(const fs::path &audio_root, double holdout_fraction,
                       const std::vector<int> &supported_rates) {
  if (!fs::is_directory(audio_root)) throw IoError(audio_root.string() + ": not a directory");
  if (holdout_fraction < 0.0 || holdout_fraction >= 1.0)
    throw InvalidArgument("holdout fraction must be in [0, 1)");
  Manifest m;
  m.provenance.audio_root = audio_root.string();
  m.provenance.holdout_fraction = holdout_fraction;

  std::vector<fs::path> speaker_dirs;
  for (const auto &e : fs::directory_iterator(audio_root))
    if (e.is_directory()) speaker_dirs.push_back(e.path());
  std::sort(speaker_dirs.begin(), speaker_dirs.end());

  for (const auto &dir : speaker_dirs) {
    std::vector<fs::path> files;
    for (const auto &e : fs::directory_iterator(dir))
      if (e.is_regular_file() && e.path().extension() == ".wav") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    const std::string label = dir.filename().string();
    std::vector<UtteranceRecord> recs;
    for (const auto &f : files) {
      try {
        auto info = ReadWavInfo(f);
        if (std::find(supported_rates.begin(), supported_rates.end(), info.sample_rate) == supported_rates.end()) {
          m.skipped.push_back({f.string(), "unsupported sample rate " + std::to_string(info.sample_rate)});
          continue;
        }
        if (info.channels != 1) {
          m.skipped.push_back({f.string(), "not mono (" + std::to_string(info.channels) + " channels)"});
          continue;
        }
      } catch (const Error &e) {
        m.skipped.push_back({f.string(), e.what()});
        continue;
      }
      UtteranceRecord r;
      r.utt_id = label + "/" + f.stem().string();
      r.speaker = label;
      r.audio_path = f.string();
      recs.push_back(std::move(r));
    }
    if (recs.empty()) continue;
    const auto n = static_cast<std::int64_t>(recs.size());
    const auto h = HoldoutCount(n, holdout_fraction);
    for (std::int64_t i = n - h; i < n; ++i) recs[i].split = Split::kHoldout;
    const auto index = static_cast<std::int64_t>(m.speakers.size());
    m.speakers.push_back(label);
    for (auto &r : recs) {
      r.speaker_index = index;
      m.records.push_back(std::move(r));
    }
  }
  for (const auto &s : m.skipped) WAVC_WARN << "skipping " << s.path << ": " << s.reason;
  if (m.records.empty()) throw InvalidArgument(audio_root.string() + ": no usable audio files found");
  return m;
}

Manifest SubsetLowResource(const Manifest &m, std::int64_t n_speakers, std::int64_t m_samples,
                           std::uint64_t seed) {
  const auto available = static_cast<std::int64_t>(m.speakers.size());
  if (n_speakers < 1 || n_speakers > available)
    throw InvalidArgument("cannot select " + std::to_string(n_speakers) + " speakers from " +
                          std::to_string(available));
  if (m_samples == 0 || m_samples < -1) throw InvalidArgument("m_samples must be positive or full");
  Rng rng(seed);
  std::vector<std::string> labels = m.speakers;
  std::sort(labels.begin(), labels.end());
  rng.Shuffle(labels);
  labels.resize(n_speakers);
  std::sort(labels.begin(), labels.end());

  Manifest out;
  out.provenance = m.provenance;
  out.provenance.subsets.push_back({n_speakers, m_samples, seed});
  out.speakers = labels;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    std::vector<UtteranceRecord> pool;
    for (const auto &r : m.records)
      if (r.speaker == labels[k] && r.split == Split::kTrain) pool.push_back(r);
    std::sort(pool.begin(), pool.end(), [](const auto &a, const auto &b) { return a.utt_id < b.utt_id; });
    if (m_samples > 0) {
      if (static_cast<std::int64_t>(pool.size()) < m_samples)
        throw InvalidArgument("speaker '" + labels[k] + "' has " + std::to_string(pool.size()) +
                              " training utterances, " + std::to_string(m_samples) + " requested");
      rng.Shuffle(pool);
      pool.resize(m_samples);
      std::sort(pool.begin(), pool.end(), [](const auto &a, const auto &b) { return a.utt_id < b.utt_id; });
    }
    for (auto &r : pool) {
      r.speaker_index = static_cast<std::int64_t>(k);
      out.records.push_back(std::move(r));
    }
  }
  const bool cached = std::all_of(out.records.begin(), out.records.end(),
                                  [](const UtteranceRecord &r) { return !r.feature_path.empty(); });
  if (cached) out.f0_stats = ComputeSpeakerF0Stats(out);
  return out;
}

Manifest Rederive(const Provenance &provenance, const std::vector<int> &supported_rates) {
  auto m = BuildManifest(provenance.audio_root, provenance.holdout_fraction, supported_rates);
  for (const auto &s : provenance.subsets) m = SubsetLowResource(m, s.n_speakers, s.m_samples, s.seed);
  return m;
}

std::string Fnv1aHex(std::span<const std::byte> bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (auto b : bytes) {
    h ^= static_cast<std::uint64_t>(b);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string FeatureHash(const fs::path &audio_path, const CacheOptions &options) {
  auto bytes = ReadFileBytes(audio_path);
  std::ostringstream settings;
  settings << "v" << kFeatureCacheVersion << ";fp=" << FormatDouble(options.frame_period_ms)
           << ";order=" << options.mcep_order << ";fft=" << options.world.fft_size
           << ";f0=" << (options.world.f0_estimator == F0Estimator::kHarvest ? "harvest" : "dio")
           << ";floor=" << FormatDouble(options.world.f0_floor) << ";ceil=" << FormatDouble(options.world.f0_ceil);
  const auto s = settings.str();
  bytes.insert(bytes.end(), reinterpret_cast<const std::byte *>(s.data()),
               reinterpret_cast<const std::byte *>(s.data()) + s.size());
  return Fnv1aHex(bytes);
}

std::map<std::string, LogF0Stats> ComputeSpeakerF0Stats(const Manifest &m) {
  std::map<std::string, std::vector<std::vector<double>>> contours;
  for (const auto &r : m.records) {
    if (r.split != Split::kTrain || r.feature_path.empty()) continue;
    contours[r.speaker].push_back(LoadFeatures(r.feature_path).f0);
  }
  std::map<std::string, LogF0Stats> out;
  for (const auto &[spk, c] : contours) out[spk] = ComputeLogF0Stats(c);
  return out;
}

Manifest CacheFeatures(const Manifest &m, const CacheOptions &options, CacheStats *stats) {
  if (options.cache_root.empty()) throw InvalidArgument("feature cache root is not set");
  if (options.mcep_order < 1) throw InvalidArgument("mcep order must be >= 1");
  Manifest out = m;
  const WorldVocoder vocoder(options.world);
  std::atomic<std::size_t> next{0};
  std::atomic<std::int64_t> analyzed{0}, reused{0};
  std::vector<std::optional<std::string>> errors(out.records.size());

  auto work = [&] {
    for (std::size_t i = next++; i < out.records.size(); i = next++) {
      auto &r = out.records[i];
      try {
        const fs::path path = options.cache_root / r.speaker / (fs::path(r.audio_path).stem().string() + ".feat");
        const auto hash = FeatureHash(r.audio_path, options);
        if (fs::exists(path)) {
          try {
            auto container = TensorContainer::Load(path);
            if (container.Meta("source_hash") == hash) {
              r.n_frames = container.At("f0").shape.at(0);
              r.feature_path = path.string();
              ++reused;
              continue;
            }
          } catch (const Error &) {
            // unreadable cache entry: fall through and rebuild it
          }
        }
        auto wave = ReadWav(r.audio_path);
        auto analysis = vocoder.Analyze(wave, options.frame_period_ms, r.utt_id);
        FeatureSet f;
        f.alpha = AllPassAlpha(analysis.sample_rate);
        f.mcep = EnvelopeToMcep(analysis.spectral_envelope, options.mcep_order, f.alpha);
        f.f0 = analysis.f0;
        f.aperiodicity = analysis.aperiodicity;
        f.frame_period_ms = analysis.frame_period_ms;
        f.sample_rate = analysis.sample_rate;
        f.source_hash = hash;
        fs::create_directories(path.parent_path());
        SaveFeatures(path, f);
        r.n_frames = static_cast<std::int64_t>(f.num_frames());
        r.feature_path = path.string();
        ++analyzed;
      } catch (const Error &e) {
        errors[i] = e.what();
      }
    }
  };
  const int workers = std::max(1, options.workers);
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto &t : pool) t.join();

  CacheStats local;
  local.analyzed = analyzed;
  local.reused = reused;
  std::vector<UtteranceRecord> kept;
  for (std::size_t i = 0; i < out.records.size(); ++i) {
    if (errors[i]) {
      WAVC_ERR << "feature extraction failed for " << out.records[i].utt_id << ": " << *errors[i];
      local.failed.push_back({out.records[i].audio_path, *errors[i]});
      out.skipped.push_back(local.failed.back());
    } else {
      kept.push_back(std::move(out.records[i]));
    }
  }
  out.records = std::move(kept);
  out.f0_stats = ComputeSpeakerF0Stats(out);
  if (stats) *stats = std::move(local);
  return out;
}

}  // namespace wavc::data
