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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest_torch.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "oracles.h"
#include "wavc/acoustic/feature_cache.h"
#include "wavc/common/error.h"
#include "wavc/data/manifest.h"
#include "wavc/io/wav_io.h"

using namespace wavc;
using namespace wavc::data;
namespace fs = std::filesystem;

namespace {

fs::path TempDir(const std::string &name) {
  auto p = fs::temp_directory_path() / ("wavc_manifest_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// speakers x files of short harmonic tones, speaker s at 120 + 40 s Hz.
fs::path MakeCorpus(const std::string &name, int speakers, int files, double seconds = 0.05) {
  auto root = TempDir(name);
  for (int s = 0; s < speakers; ++s) {
    char spk[16];
    std::snprintf(spk, sizeof(spk), "p%03d", s);
    fs::create_directories(root / spk);
    for (int f = 0; f < files; ++f) {
      const double f0 = 120.0 + 40.0 * s + 3.0 * f;
      auto x = oracle::Sine(f0, seconds, 22050, 0.3);
      auto h2 = oracle::Sine(2 * f0, seconds, 22050, 0.15);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += h2[i];
      char stem[32];
      std::snprintf(stem, sizeof(stem), "%s_%03d.wav", spk, f);
      WriteWav(root / spk / stem, Waveform{x, 22050});
    }
  }
  return root;
}

std::set<std::string> Ids(const Manifest &m) {
  std::set<std::string> s;
  for (const auto &r : m.records) s.insert(r.utt_id);
  return s;
}

}  // namespace

TEST_CASE("holdout count") {
  CHECK(HoldoutCount(1, 0.1) == 0);
  CHECK(HoldoutCount(2, 0.1) == 1);
  CHECK(HoldoutCount(20, 0.1) == 2);
  CHECK(HoldoutCount(21, 0.1) == 3);
  CHECK(HoldoutCount(5, 0.0) == 0);
  CHECK(HoldoutCount(5, 0.99) == 4);
}

TEST_CASE("build_manifest: 2 speakers x 3 files") {
  auto root = MakeCorpus("build", 2, 3);
  auto m = BuildManifest(root);
  REQUIRE(m.records.size() == 6);
  CHECK(m.speakers == std::vector<std::string>{"p000", "p001"});
  std::set<std::int64_t> idx;
  for (const auto &r : m.records) idx.insert(r.speaker_index);
  CHECK(idx == std::set<std::int64_t>{0, 1});
  CHECK(m.records[0].utt_id == "p000/p000_000");
  CHECK(m.records[2].split == Split::kHoldout);
  CHECK(m.records[1].split == Split::kTrain);
  CHECK(m.Records(Split::kHoldout).size() == 2);

  auto again = BuildManifest(root);
  CHECK(again.ToJsonLines() == m.ToJsonLines());

  auto path = root / "manifest.jsonl";
  m.Save(path);
  CHECK(Manifest::Load(path).ToJsonLines() == m.ToJsonLines());
}

TEST_CASE("build_manifest: unsupported and unreadable files are skipped with a reason") {
  auto root = MakeCorpus("skip", 2, 2);
  WriteWav(root / "p001" / "odd_rate.wav", Waveform{oracle::Sine(200, 0.05, 12345), 12345});
  std::ofstream(root / "p001" / "broken.wav") << "not a wav";
  auto m = BuildManifest(root);
  CHECK(m.records.size() == 4);
  REQUIRE(m.skipped.size() == 2);
  bool saw_rate = false;
  for (const auto &s : m.skipped) {
    CHECK_FALSE(s.reason.empty());
    if (s.path.find("odd_rate") != std::string::npos) saw_rate = s.reason.find("12345") != std::string::npos;
  }
  CHECK(saw_rate);

  CHECK_THROWS_AS(BuildManifest(TempDir("empty")), InvalidArgument);
  CHECK_THROWS(BuildManifest(fs::temp_directory_path() / "wavc_manifest_does_not_exist"));
}

TEST_CASE("subset_low_resource: counts, determinism, provenance") {
  auto root = MakeCorpus("subset", 10, 20, 0.02);
  auto full = BuildManifest(root);
  auto a = SubsetLowResource(full, 2, 5, 42);
  CHECK(a.records.size() == 10);
  CHECK(a.speakers.size() == 2);
  for (const auto &r : a.records) {
    CHECK(r.split == Split::kTrain);
    CHECK(r.speaker_index == a.SpeakerIndex(r.speaker));
    const auto &orig = full.Find(r.utt_id);
    CHECK(orig.audio_path == r.audio_path);
    CHECK(orig.speaker == r.speaker);
  }
  CHECK(SubsetLowResource(full, 2, 5, 42).ToJsonLines() == a.ToJsonLines());
  REQUIRE(a.provenance.subsets.size() == 1);
  CHECK(a.provenance.subsets[0] == SubsetSpec{2, 5, 42});
  CHECK(Rederive(a.provenance).ToJsonLines() == a.ToJsonLines());

  auto all = SubsetLowResource(full, 3, -1, 1);
  CHECK(all.records.size() == 3 * 18);
}

TEST_CASE("subset_low_resource: different seeds rarely collide") {
  auto root = MakeCorpus("seeds", 10, 20, 0.02);
  auto full = BuildManifest(root);
  auto base = Ids(SubsetLowResource(full, 2, 5, 0));
  int collisions = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) collisions += Ids(SubsetLowResource(full, 2, 5, seed)) == base;
  // P(same 2 speakers) = 1/45 and then P(same 5 of 18 each) ~ 1e-7.
  CHECK(collisions <= 1);
}

TEST_CASE("subset_low_resource: errors name the speaker") {
  auto root = MakeCorpus("short", 3, 4, 0.02);
  auto full = BuildManifest(root);
  try {
    SubsetLowResource(full, 3, 10, 0);
    FAIL("expected an error");
  } catch (const InvalidArgument &e) {
    CHECK(std::string(e.what()).find("p00") != std::string::npos);
  }
  CHECK_THROWS_AS(SubsetLowResource(full, 4, 1, 0), InvalidArgument);
}

TEST_CASE("cache_features: idempotent and consistent") {
  auto root = MakeCorpus("cache", 2, 3, 0.3);
  auto m = BuildManifest(root);
  CacheOptions opt;
  opt.cache_root = TempDir("cache_out");
  opt.workers = 2;
  CacheStats first;
  auto cached = CacheFeatures(m, opt, &first);
  CHECK(first.analyzed == 6);
  CHECK(first.reused == 0);
  CacheStats second;
  auto again = CacheFeatures(cached, opt, &second);
  CHECK(second.analyzed == 0);
  CHECK(second.reused == 6);
  CHECK(again.ToJsonLines() == cached.ToJsonLines());

  for (const auto &r : cached.records) {
    REQUIRE_FALSE(r.feature_path.empty());
    auto f = LoadFeatures(r.feature_path);
    CHECK(r.n_frames >= 1);
    CHECK(static_cast<std::int64_t>(f.mcep.num_frames()) == r.n_frames);
    CHECK(static_cast<std::int64_t>(f.f0.size()) == r.n_frames);
  }
  REQUIRE(cached.f0_stats.count("p000"));
  CHECK(cached.f0_stats.at("p000").defined());
  // Training split only: p000's holdout file is at 126 Hz, the others at 120 and 123.
  CHECK(std::exp(cached.f0_stats.at("p000").mean) < 125.0);

  // Changed settings invalidate the cache.
  auto opt2 = opt;
  opt2.mcep_order = 24;
  CacheStats third;
  CacheFeatures(cached, opt2, &third);
  CHECK(third.analyzed == 6);
}

TEST_CASE("fnv1a") {
  const std::string s = "a";
  CHECK(Fnv1aHex(std::as_bytes(std::span(s.data(), s.size()))) == "af63dc4c8601ec8c");
  CHECK(Fnv1aHex({}) == "cbf29ce484222325");
}
