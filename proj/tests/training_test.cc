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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "toy.h"
#include "wavc/common/error.h"
#include "wavc/train/training.h"

using namespace wavc;
using namespace wavc::train;
namespace fs = std::filesystem;

namespace {

constexpr int kDim = 8;

TrainingConfig TinyTraining() {
  TrainingConfig tc;
  tc.batch_size = 4;
  tc.segment_frames = 16;
  tc.total_iterations = 10;
  tc.checkpoint_every = 0;
  tc.seed = 7;
  return tc;
}

fs::path TempDir(const std::string &name) {
  auto p = fs::temp_directory_path() / ("wavc_training_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::map<std::string, torch::Tensor> Snapshot(const Models &m) {
  std::map<std::string, torch::Tensor> out;
  for (auto &[name, t] : m.NamedParameters()) out[name] = t.detach().clone();
  return out;
}

bool SameParameters(const std::map<std::string, torch::Tensor> &a, const std::map<std::string, torch::Tensor> &b,
                    const std::string &prefix = "") {
  for (auto &[name, t] : a)
    if (name.rfind(prefix, 0) == 0 && !torch::equal(t, b.at(name))) return false;
  return true;
}

std::vector<std::string> Lines(const fs::path &p) {
  std::ifstream in(p);
  std::vector<std::string> v;
  for (std::string l; std::getline(in, l);)
    if (!l.empty()) v.push_back(l);
  return v;
}

}  // namespace

TEST_CASE("crop: exact length, wrap-padding, bounds") {
  auto m = torch::arange(10, torch::kFloat).view({1, 10}).repeat({2, 1});
  CHECK(torch::equal(CropWrapped(m, 0, 10), m));
  auto wrapped = CropWrapped(m, 7, 6);
  CHECK(wrapped.size(1) == 6);
  CHECK(torch::equal(wrapped[0], torch::tensor({7.f, 8.f, 9.f, 0.f, 1.f, 2.f})));
  auto long_wrap = CropWrapped(m.narrow(1, 0, 3), 0, 8);
  CHECK(torch::equal(long_wrap[0], torch::tensor({0.f, 1.f, 2.f, 0.f, 1.f, 2.f, 0.f, 1.f})));
}

TEST_CASE("sample_batch: shapes, determinism, uniform utterance draws") {
  auto bank = toy::MakeBank(3, 1, kDim, 16, 1);
  Rng a(5), b(5);
  auto x = SampleBatch(bank, 4, 16, a);
  auto y = SampleBatch(bank, 4, 16, b);
  CHECK(x.x_s.sizes() == torch::IntArrayRef{4, 1, kDim, 16});
  CHECK(torch::equal(x.x_s, y.x_s));
  CHECK(torch::equal(x.x_t, y.x_t));
  CHECK(torch::equal(x.s_y, y.s_y));
  CHECK(x.src_ids == y.src_ids);

  // Source draws over 3 utterances: counts within 3 sigma of n/3.
  Rng rng(11);
  std::map<std::string, int> counts;
  const int n = 10000;
  for (int i = 0; i < n / 2; ++i) {
    auto batch = SampleBatch(bank, 2, 16, rng);
    for (const auto &id : batch.src_ids) ++counts[id];
  }
  const double p = 1.0 / 3, sigma = std::sqrt(n * p * (1 - p));
  CHECK(counts.size() == 3);
  for (auto &[id, c] : counts) CHECK_MESSAGE(std::abs(c - n * p) < 3 * sigma, id << " drawn " << c << " times");

  CHECK_THROWS_AS(SampleBatch(FeatureBank(), 2, 16, rng), InvalidArgument);
}

TEST_CASE("train_step: all parameter groups move and report is finite") {
  torch::manual_seed(0);
  auto bank = toy::MakeBank(2, 2, kDim, 24, 2);
  auto mc = toy::TinyModels(kDim, 2);
  auto tc = TinyTraining();
  ConfigureDeterminism(tc);
  auto models = Models::Create(mc, 1);
  auto opt = Optimizers::Create(models, tc);
  Rng rng(3);
  auto before = Snapshot(models);
  auto report = TrainStep(SampleBatch(bank, 4, 16, rng), models, opt, tc);
  for (double v : {report.components.g_adv, report.components.d_adv, report.components.cyc, report.components.spk_rec})
    CHECK(std::isfinite(v));
  CHECK(report.weighted_total_g ==
        doctest::Approx(report.components.g_adv + 10 * report.components.cyc + report.components.spk_rec));
  CHECK_FALSE(SameParameters(before, Snapshot(models), "generator."));
  CHECK_FALSE(SameParameters(before, Snapshot(models), "discriminator."));
  CHECK_FALSE(SameParameters(before, Snapshot(models), "encoder."));
}

TEST_CASE("train_step: gating removes the cycle and speaker terms") {
  auto bank = toy::MakeBank(2, 2, kDim, 24, 2);
  auto mc = toy::TinyModels(kDim, 2);
  auto tc = TinyTraining();
  tc.weights.lambda_cyc = 0;
  tc.weights.lambda_spk = 0;
  tc.d_lr = 0;
  ConfigureDeterminism(tc);
  auto models = Models::Create(mc, 1);
  auto opt = Optimizers::Create(models, tc);
  Rng rng(3);
  auto before = Snapshot(models);
  auto report = TrainStep(SampleBatch(bank, 4, 16, rng), models, opt, tc);
  CHECK(report.weighted_total_g == report.components.g_adv);
  auto after = Snapshot(models);
  CHECK(SameParameters(before, after, "discriminator."));
  CHECK_FALSE(SameParameters(before, after, "generator."));
  // E only feeds G's condition now: the adversarial gradient still reaches it
  // through e_t, never through the speaker-reconstruction path.
  CHECK_FALSE(SameParameters(before, after, "encoder."));
}

TEST_CASE("train_step: parameter isolation between the D and G+E updates") {
  auto bank = toy::MakeBank(2, 2, kDim, 24, 2);
  auto mc = toy::TinyModels(kDim, 2);
  auto tc = TinyTraining();
  ConfigureDeterminism(tc);

  SUBCASE("D update leaves G and E untouched") {
    auto tc_d = tc;
    tc_d.g_lr = 0;
    tc_d.e_lr = 0;
    auto models = Models::Create(mc, 1);
    auto opt = Optimizers::Create(models, tc_d);
    Rng rng(3);
    auto before = Snapshot(models);
    TrainStep(SampleBatch(bank, 4, 16, rng), models, opt, tc_d);
    auto after = Snapshot(models);
    CHECK(SameParameters(before, after, "generator."));
    CHECK(SameParameters(before, after, "encoder."));
    CHECK_FALSE(SameParameters(before, after, "discriminator."));
  }
  SUBCASE("G+E update leaves D untouched") {
    auto tc_g = tc;
    tc_g.d_lr = 0;
    auto models = Models::Create(mc, 1);
    auto opt = Optimizers::Create(models, tc_g);
    Rng rng(3);
    auto before = Snapshot(models);
    TrainStep(SampleBatch(bank, 4, 16, rng), models, opt, tc_g);
    CHECK(SameParameters(before, Snapshot(models), "discriminator."));
  }
}

TEST_CASE("train_step: seeded runs reproduce bit for bit") {
  auto bank = toy::MakeBank(2, 2, kDim, 24, 2);
  auto mc = toy::TinyModels(kDim, 2);
  auto tc = TinyTraining();
  ConfigureDeterminism(tc);
  std::vector<LossReport> runs;
  std::vector<std::map<std::string, torch::Tensor>> params;
  for (int r = 0; r < 2; ++r) {
    auto models = Models::Create(mc, 9);
    auto opt = Optimizers::Create(models, tc);
    Rng rng(4);
    runs.push_back(TrainStep(SampleBatch(bank, 4, 16, rng), models, opt, tc));
    params.push_back(Snapshot(models));
  }
  CHECK(runs[0].components.g_adv == runs[1].components.g_adv);
  CHECK(runs[0].components.d_adv == runs[1].components.d_adv);
  CHECK(runs[0].components.cyc == runs[1].components.cyc);
  CHECK(runs[0].components.spk_rec == runs[1].components.spk_rec);
  CHECK(SameParameters(params[0], params[1]));
}

TEST_CASE("train_step: a non-finite loss names the component") {
  auto bank = toy::MakeBank(2, 2, kDim, 24, 2);
  auto mc = toy::TinyModels(kDim, 2);
  auto tc = TinyTraining();
  auto models = Models::Create(mc, 1);
  auto opt = Optimizers::Create(models, tc);
  Rng rng(3);
  auto batch = SampleBatch(bank, 4, 16, rng);
  batch.x_s[0][0][0][0] = std::numeric_limits<float>::quiet_NaN();
  try {
    TrainStep(batch, models, opt, tc);
    FAIL("expected a TrainingError");
  } catch (const TrainingError &e) {
    CHECK(std::string(e.what()).find("d_adv") != std::string::npos);
  }
}

TEST_CASE("checkpoint round trip restores parameters and optimizer state") {
  auto dir = TempDir("ckpt");
  auto bank = toy::MakeBank(2, 2, kDim, 24, 2);
  auto mc = toy::TinyModels(kDim, 2);
  auto tc = TinyTraining();
  ConfigureDeterminism(tc);
  auto state = TrainingState::Create(mc, tc, bank.normalizer(), toy::SpeakerNames(2), {{"spk0", {4.8, 0.2, 10}}});
  for (int i = 0; i < 3; ++i) {
    TrainStep(SampleBatch(bank, 4, 16, state.rng), state.models, state.optimizers, tc);
    ++state.iteration;
  }
  SaveCheckpoint(dir / "a.wvc", state);
  auto loaded = LoadCheckpoint(dir / "a.wvc");
  CHECK(loaded.iteration == 3);
  CHECK(loaded.model_config == mc);
  CHECK(loaded.training_config == tc);
  CHECK(loaded.speakers == state.speakers);
  CHECK(loaded.normalizer == state.normalizer);
  CHECK(loaded.f0_stats.at("spk0").mean == 4.8);
  CHECK(loaded.rng.Serialize() == state.rng.Serialize());
  CHECK(SameParameters(Snapshot(state.models), Snapshot(loaded.models)));

  // Optimizer state: one more identical step from both gives identical parameters.
  Rng r1 = state.rng, r2 = loaded.rng;
  TrainStep(SampleBatch(bank, 4, 16, r1), state.models, state.optimizers, tc);
  TrainStep(SampleBatch(bank, 4, 16, r2), loaded.models, loaded.optimizers, tc);
  CHECK(SameParameters(Snapshot(state.models), Snapshot(loaded.models)));

  // Saving the reloaded state again is byte-identical.
  SaveCheckpoint(dir / "b.wvc", loaded);
  SaveCheckpoint(dir / "c.wvc", state);
  const bool identical = ReadFileBytes(dir / "b.wvc") == ReadFileBytes(dir / "c.wvc");
  CHECK(identical);

  CHECK_THROWS_AS(LoadCheckpoint(dir / "missing.wvc"), IoError);
}

TEST_CASE("train: zero iterations writes only the initial checkpoint") {
  auto dir = TempDir("zero");
  auto bank = toy::MakeBank(2, 2, kDim, 24, 2);
  auto tc = TinyTraining();
  tc.total_iterations = 0;
  auto path = Train(bank, toy::TinyModels(kDim, 2), tc, toy::SpeakerNames(2), {}, {dir, {}, {}});
  CHECK(path == dir / "final.wvc");
  CHECK(LoadCheckpoint(path).iteration == 0);
  CHECK(Lines(dir / "train_log.jsonl").empty());
  int files = 0;
  for (auto &e : fs::directory_iterator(dir)) files += e.path().extension() == ".wvc";
  CHECK(files == 1);
}

TEST_CASE("train: split run equals the uninterrupted run; log is complete") {
  auto bank = toy::MakeBank(2, 2, kDim, 24, 2);
  auto mc = toy::TinyModels(kDim, 2);
  auto tc = TinyTraining();
  tc.total_iterations = 20;
  tc.checkpoint_every = 10;

  auto full_dir = TempDir("full");
  auto full = LoadCheckpoint(Train(bank, mc, tc, toy::SpeakerNames(2), {}, {full_dir, {}, {}}));
  CHECK(Lines(full_dir / "train_log.jsonl").size() == 20);
  CHECK(fs::exists(full_dir / "ckpt_00000010.wvc"));

  auto split_dir = TempDir("split");
  auto first = tc;
  first.total_iterations = 10;
  Train(bank, mc, first, toy::SpeakerNames(2), {}, {split_dir, {}, {}});
  // A stale record past the checkpoint must not survive the resume.
  std::ofstream(split_dir / "train_log.jsonl", std::ios::app) << R"({"iteration": 11})" << "\n";
  auto resumed =
      LoadCheckpoint(Train(bank, mc, tc, toy::SpeakerNames(2), {}, {split_dir, split_dir / "final.wvc", {}}));
  CHECK(resumed.iteration == 20);
  CHECK(SameParameters(Snapshot(full.models), Snapshot(resumed.models)));
  auto lines = Lines(split_dir / "train_log.jsonl");
  REQUIRE(lines.size() == 20);
  for (std::size_t i = 0; i < lines.size(); ++i)
    CHECK(nlohmann::json::parse(lines[i]).at("iteration").get<int>() == static_cast<int>(i + 1));

  auto other = tc;
  other.g_lr = 1e-3;
  CHECK_THROWS_AS(Train(bank, mc, other, toy::SpeakerNames(2), {}, {split_dir, split_dir / "final.wvc", {}}),
                  ConfigError);
  auto other_models = mc;
  other_models.generator.n_bottleneck_blocks = 2;
  CHECK_THROWS_AS(
      Train(bank, other_models, tc, toy::SpeakerNames(2), {}, {split_dir, split_dir / "final.wvc", {}}),
      ConfigError);
}

TEST_CASE("config validation") {
  auto tc = TinyTraining();
  tc.segment_frames = 18;
  CHECK_THROWS_AS(tc.Validate(4), ConfigError);
  tc = TinyTraining();
  tc.g_lr = -1;
  CHECK_THROWS_AS(tc.Validate(4), ConfigError);
  tc = TinyTraining();
  CHECK(nlohmann::json(tc).get<TrainingConfig>() == tc);
  auto mc = toy::TinyModels(kDim, 3);
  CHECK(nlohmann::json(mc).get<ModelConfig>() == mc);
}
