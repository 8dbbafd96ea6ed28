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

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>

#include "oracles.h"
#include "toy.h"
#include "wavc/acoustic/loudness.h"
#include "wavc/cli/commands.h"
#include "wavc/cli/run_config.h"
#include "wavc/common/error.h"
#include "wavc/common/log.h"
#include "wavc/io/wav_io.h"

using namespace wavc;
using namespace wavc::cli;
namespace fs = std::filesystem;

namespace {

fs::path TempDir(const std::string &name) {
  auto p = fs::temp_directory_path() / ("wavc_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// speakers x files harmonic tones of 0.4 s with 20 ms raised-cosine ramps
// and 50 ms of silence on each side; speaker s at 110 + 60 s Hz.
fs::path MakeCorpus(const fs::path &root, int speakers, int files) {
  const std::size_t tone = static_cast<std::size_t>(0.4 * 22050), ramp = 441, pad = 1102;
  for (int s = 0; s < speakers; ++s) {
    char spk[16];
    std::snprintf(spk, sizeof(spk), "p%03d", s);
    fs::create_directories(root / spk);
    for (int f = 0; f < files; ++f) {
      const double f0 = 110.0 + 60.0 * s + 4.0 * f;
      std::vector<double> x(tone + 2 * pad, 0.0);
      for (int h = 1; h <= 6; ++h) {
        auto partial = oracle::Sine(f0 * h, 0.4, 22050, 0.3 / h);
        for (std::size_t n = 0; n < tone; ++n) x[pad + n] += partial[n];
      }
      for (std::size_t n = 0; n < ramp; ++n) {
        const double g = 0.5 - 0.5 * std::cos(M_PI * static_cast<double>(n) / ramp);
        x[pad + n] *= g;
        x[pad + tone - 1 - n] *= g;
      }
      char stem[32];
      std::snprintf(stem, sizeof(stem), "%s_%03d.wav", spk, f);
      WriteWav(root / spk / stem, Waveform{x, 22050});
    }
  }
  return root;
}

std::string ReadFile(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::uint32_t Le(const std::string &bytes, std::size_t offset, int n) {
  std::uint32_t v = 0;
  for (int i = n - 1; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(bytes[offset + i]);
  return v;
}

struct Run {
  int code = 0;
  std::string output;
};

Run Cli(const std::string &args) {
  const std::string cmd = std::string(WAVC_CLI_PATH) + " " + args + " 2>&1";
  Run r;
  FILE *pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf;
  while (std::fgets(buf.data(), buf.size(), pipe)) r.output += buf.data();
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

}  // namespace

TEST_CASE("run config: unknown keys, overrides, seed propagation") {
  CHECK_NOTHROW(FromJson(ToJson(RunConfig{})));
  try {
    FromJson(nlohmann::json::parse(R"({"training": {"bogus": 1}})"));
    FAIL("expected an error");
  } catch (const ConfigError &e) {
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
  CHECK_THROWS_AS(FromJson(nlohmann::json::parse(R"({"nosuch": {}})")), ConfigError);
  CHECK_THROWS_AS(FromJson(nlohmann::json::parse(R"({"training": {"batch_size": "eight"}})")), ConfigError);

  auto [key, value] = ParseOverride("training.batch_size=4");
  CHECK(key == "training.batch_size");
  CHECK(value == 4);
  CHECK(ParseOverride("paths.out_dir=some/dir").second == "some/dir");
  CHECK_THROWS_AS(ParseOverride("no_equals_sign"), ConfigError);

  auto j = ToJson(RunConfig{});
  ApplyOverride(j, "training.batch_size", 4);
  CHECK(FromJson(j).training.batch_size == 4);
  CHECK_THROWS_AS(ApplyOverride(j, "training.nope", 1), ConfigError);
  CHECK_THROWS_AS(ApplyOverride(j, "training", 1), ConfigError);

  auto c = LoadRunConfig(std::nullopt, {"training.total_iterations=7"}, 99, std::string("elsewhere"));
  CHECK(c.training.total_iterations == 7);
  CHECK(c.training.seed == 99);
  CHECK(c.subset.seed == 99);
  CHECK(c.evaluate.classifier.seed == 99);
  CHECK(c.paths.out_dir == "elsewhere");

  auto dir = TempDir("config");
  std::ofstream(dir / "run.json") << "{\n  // comment\n  \"subset\": {\"n_speakers\": 2}\n}\n";
  CHECK(LoadRunConfig(dir / "run.json", {}, std::nullopt, std::nullopt).subset.n_speakers == 2);
  CHECK_THROWS_AS(LoadRunConfig(dir / "run.json", {"training.batch_size=0"}, std::nullopt, std::nullopt),
                  ConfigError);
  CHECK_THROWS(LoadRunConfig(dir / "missing.json", {}, std::nullopt, std::nullopt));

  RunConfig cache;
  cache.paths.out_dir = "o";
  ::unsetenv(kCacheRootEnv);
  CHECK(cache.CacheRoot() == fs::path("o") / "cache");
  ::setenv(kCacheRootEnv, "/tmp/env_cache", 1);
  CHECK(cache.CacheRoot() == fs::path("/tmp/env_cache"));
  cache.paths.cache_root = "explicit";
  CHECK(cache.CacheRoot() == fs::path("explicit"));
  ::unsetenv(kCacheRootEnv);

  auto keys = DescribeKeys({"training."});
  REQUIRE_FALSE(keys.empty());
  for (const auto &[k, v] : keys) CHECK(k.rfind("training.", 0) == 0);
}

TEST_CASE("extract, subset, train, convert, evaluate on a tiny corpus") {
  SetLogLevel(LogLevel::kError);
  auto dir = TempDir("pipeline");
  RunConfig c;
  c.paths.audio_root = MakeCorpus(dir / "audio", 2, 4).string();
  c.paths.out_dir = (dir / "extract").string();
  const auto manifest = CmdExtract(c);
  REQUIRE(fs::exists(manifest));
  auto m = data::Manifest::Load(manifest);
  CHECK(m.records.size() == 8);
  CHECK(m.Records(data::Split::kHoldout).size() == 2);
  CHECK(fs::exists(dir / "extract" / "cache"));

  c.paths.manifest = manifest.string();
  c.paths.out_dir = (dir / "subset").string();
  c.subset = {2, 2, 5};
  auto sub = data::Manifest::Load(CmdSubset(c));
  CHECK(sub.records.size() == 4);

  c.paths.out_dir = (dir / "train").string();
  c.model = toy::TinyModels(37, 2);
  c.training.batch_size = 2;
  c.training.segment_frames = 16;
  c.training.total_iterations = 3;
  c.training.checkpoint_every = 0;
  const auto checkpoint = CmdTrain(c);
  CHECK(checkpoint == dir / "train" / "final.wvc");
  CHECK(train::LoadCheckpoint(checkpoint).iteration == 3);

  c.paths.out_dir = (dir / "convert").string();
  c.paths.checkpoint = checkpoint.string();
  const auto list = CmdConvert(c);
  auto conversions = LoadConversions(list);
  REQUIRE(conversions.size() == 4);

  int self = 0;
  for (const auto &conv : conversions) {
    if (conv.source_speaker != conv.target_speaker) continue;
    ++self;
    const auto bytes = ReadFile(conv.wav_path);
    REQUIRE(bytes.size() > 44);
    CHECK(bytes.compare(0, 4, "RIFF") == 0);
    CHECK(Le(bytes, 20, 2) == 1);   // PCM
    CHECK(Le(bytes, 22, 2) == 1);   // mono
    CHECK(Le(bytes, 24, 4) == 22050);
    CHECK(Le(bytes, 34, 2) == 16);
    auto out = ReadWav(conv.wav_path);
    auto src = ReadWav(m.Find(conv.source_utt).audio_path);
    CHECK(std::abs(out.duration_seconds() - src.duration_seconds()) <= 0.005 + 1e-9);
    CHECK(std::abs(IntegratedLoudness(out) - (-23.0)) <= 0.5);
  }
  CHECK(self == 2);

  c.paths.out_dir = (dir / "evaluate").string();
  c.paths.conversions = list.string();
  c.evaluate.classifier.channels = 8;
  c.evaluate.classifier.embedding_dim = 8;
  c.evaluate.classifier.iterations = 5;
  c.evaluate.classifier.segment_frames = 16;
  c.evaluate.condition = "tiny";
  const auto report_path = CmdEvaluate(c);
  auto report = nlohmann::json::parse(ReadFile(report_path));
  CHECK(report.at("n_converted").get<int>() == 4);
  const double acc = report.at("acc").get<double>();
  CHECK(std::fmod(acc, 25.0) == 0.0);
  std::int64_t counted = 0, correct = 0;
  const auto confusion = report.at("confusion").get<std::vector<std::vector<std::int64_t>>>();
  for (std::size_t i = 0; i < confusion.size(); ++i)
    for (std::size_t k = 0; k < confusion[i].size(); ++k) {
      counted += confusion[i][k];
      if (i == k) correct += confusion[i][k];
    }
  CHECK(counted == 4);
  CHECK(acc == 25.0 * correct);
  CHECK(fs::exists(dir / "evaluate" / "eval_report.txt"));

  SaveConversions(dir / "empty.jsonl", {});
  c.paths.conversions = (dir / "empty.jsonl").string();
  CHECK_THROWS_AS(CmdEvaluate(c), InvalidArgument);
}

TEST_CASE("command-line front end: help, exit codes") {
  auto help = Cli("train --help");
  CHECK(help.code == 0);
  CHECK(help.output.find("training.batch_size") != std::string::npos);
  CHECK(help.output.find("--override") != std::string::npos);
  CHECK(Cli("extract --help").output.find(kCacheRootEnv) != std::string::npos);

  auto bad = Cli("train --override training.bogus=1");
  CHECK(bad.code == 1);
  CHECK(bad.output.find("bogus") != std::string::npos);
  CHECK(Cli("extract --override paths.audio_root=/nonexistent/wavc").code == 1);
  CHECK(Cli("").code != 0);
}
