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

#include <algorithm>
#include <random>

#include "oracles.h"
#include "wavc/common/error.h"
#include "wavc/eval/evaluation.h"

using namespace wavc;
using namespace wavc::eval;

namespace {

// Speaker s has raised energy in coefficient band [4s, 4s + 4).
std::vector<LabeledFeatures> BandFixture(int n_speakers, int per_speaker, std::uint64_t seed) {
  torch::manual_seed(seed);
  std::vector<LabeledFeatures> v;
  for (int s = 0; s < n_speakers; ++s)
    for (int u = 0; u < per_speaker; ++u) {
      auto m = torch::randn({12, 80}) * 0.3;
      m.narrow(0, 4 * s, 4) += 2.0;
      v.push_back({"s" + std::to_string(s) + "_" + std::to_string(u), s, m});
    }
  return v;
}

// Returns a fixed posterior per utterance id: the intended label for ids in
// `correct`, otherwise the next speaker.
class StubScorer : public SpeakerScorer {
 public:
  StubScorer(std::int64_t n, std::vector<LabeledFeatures> data, std::vector<bool> correct)
      : n_(n), data_(std::move(data)), correct_(std::move(correct)) {}
  std::int64_t n_speakers() const override { return n_; }
  torch::Tensor Posteriors(const torch::Tensor &mcep) override {
    for (std::size_t i = 0; i < data_.size(); ++i)
      if (data_[i].mcep.data_ptr() == mcep.data_ptr()) {
        auto p = torch::zeros({n_}, torch::kDouble);
        p[correct_[i] ? data_[i].speaker : (data_[i].speaker + 1) % n_] = 1.0;
        return p;
      }
    throw std::logic_error("unknown utterance");
  }
  torch::Tensor Embedding(const torch::Tensor &mcep) override { return mcep.mean(1); }

 private:
  std::int64_t n_;
  std::vector<LabeledFeatures> data_;
  std::vector<bool> correct_;
};

TrialScoreSet Trials(std::vector<double> targets, std::vector<double> nontargets) {
  TrialScoreSet t;
  for (double s : targets) t.Add(s, true, "t");
  for (double s : nontargets) t.Add(s, false, "n");
  return t;
}

ClassifierConfig SmallClassifier() {
  ClassifierConfig c;
  c.channels = 16;
  c.embedding_dim = 16;
  c.iterations = 120;
  c.batch_size = 8;
  c.segment_frames = 32;
  c.seed = 3;
  return c;
}

}  // namespace

TEST_CASE("classifier: separable fixture reaches 100% and posteriors sum to one") {
  auto data = BandFixture(3, 4, 1);
  auto clf = TrainSpeakerClassifier(data, SmallClassifier());
  CHECK(clf.n_speakers() == 3);
  CHECK(IdentificationAccuracy(clf, data) == 100.0);
  for (const auto &d : data) {
    auto p = clf.Posteriors(d.mcep);
    CHECK(std::abs(p.sum().item<double>() - 1.0) < 1e-6);
    CHECK((p >= 0).all().item<bool>());
  }
  CHECK(clf.Embedding(data[0].mcep).numel() == 16);

  auto shuffled = data;
  std::mt19937 g(5);
  std::shuffle(shuffled.begin(), shuffled.end(), g);
  auto clf2 = TrainSpeakerClassifier(shuffled, SmallClassifier());
  CHECK(std::abs(IdentificationAccuracy(clf2, data) - IdentificationAccuracy(clf, data)) <= 100.0 / data.size());
  CHECK(IdentificationAccuracy(clf, shuffled) == IdentificationAccuracy(clf, data));

  CHECK_THROWS_AS(TrainSpeakerClassifier(BandFixture(1, 3, 1), SmallClassifier()), InvalidArgument);
}

TEST_CASE("identification accuracy counts argmax matches") {
  auto data = BandFixture(2, 4, 2);
  CHECK(IdentificationAccuracy(*std::make_unique<StubScorer>(2, data, std::vector<bool>(8, true)), data) == 100.0);
  CHECK(IdentificationAccuracy(*std::make_unique<StubScorer>(2, data, std::vector<bool>(8, false)), data) == 0.0);
  StubScorer five(2, data, {true, true, false, true, false, true, false, true});
  CHECK(IdentificationAccuracy(five, data) == 62.5);
  CHECK_THROWS(IdentificationAccuracy(five, {}));
}

TEST_CASE("cosine scoring and trial counts") {
  auto a = torch::tensor({1.0, 2.0, 3.0});
  CHECK(CosineSimilarity(a, a) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(CosineSimilarity(torch::tensor({1.0, 0.0}), torch::tensor({0.0, 2.0})) == 0.0);

  auto enrol = BandFixture(3, 2, 3);
  auto conv = BandFixture(3, 3, 4);
  StubScorer scorer(3, {}, {});
  auto trials = ScoreTrials(scorer, conv, enrol);
  CHECK(trials.scores.size() == conv.size() * 3);
  CHECK(std::count(trials.labels.begin(), trials.labels.end(), true) == static_cast<long>(conv.size()));
  trials.Validate();

  // An utterance identical to a speaker's only enrollment scores exactly 1.
  std::vector<LabeledFeatures> one{enrol[0]};
  auto self = ScoreTrials(scorer, one, one);
  CHECK(self.scores[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eer fixtures") {
  CHECK(ComputeEer(Trials({0.9, 0.8}, {0.7, 0.1})) == 0.0);
  CHECK(ComputeEer(Trials({0.9, 0.8, 0.3}, {0.7, 0.2, 0.1})) == doctest::Approx(100.0 / 3).epsilon(1e-6));
  CHECK_THROWS_AS(ComputeEer(Trials({0.9}, {})), InvalidArgument);
  CHECK_THROWS_AS(ComputeEer(Trials({}, {0.1})), InvalidArgument);
}

TEST_CASE("eer matches brute-force threshold enumeration") {
  std::mt19937_64 gen(17);
  std::uniform_int_distribution<int> size(2, 20);
  std::uniform_int_distribution<int> level(0, 9);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = size(gen);
    TrialScoreSet t;
    for (int i = 0; i < n; ++i) t.Add(level(gen) / 10.0, i == 0 || (i > 1 && gen() % 2), "x");
    const double want = oracle::BruteForceEer(t.scores, t.labels);
    REQUIRE(ComputeEer(t) == want);
  }
}

TEST_CASE("eer: same-distribution trials sit near 50") {
  std::mt19937_64 gen(23);
  std::normal_distribution<double> n(0.0, 1.0);
  TrialScoreSet t;
  for (int i = 0; i < 10000; ++i) {
    t.Add(n(gen), true, "t");
    t.Add(n(gen), false, "n");
  }
  CHECK(std::abs(ComputeEer(t) - 50.0) <= 2.0);
}

TEST_CASE("eer: monotone transforms and negation with swapped labels") {
  std::mt19937_64 gen(29);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    TrialScoreSet t, mono, neg;
    for (int i = 0; i < 40; ++i) {
      const bool target = i % 2 == 0;
      const double s = n(gen) + (target ? 1.0 : 0.0);
      t.Add(s, target, "x");
      mono.Add(std::exp(2 * s) + 3, target, "x");
      neg.Add(-s, !target, "x");
    }
    const double eer = ComputeEer(t);
    CHECK(ComputeEer(mono) == doctest::Approx(eer).epsilon(1e-9));
    CHECK(ComputeEer(neg) == doctest::Approx(eer).epsilon(1e-9));
    CHECK(eer >= 0.0);
    CHECK(eer <= 100.0);
  }
}

TEST_CASE("evaluate report") {
  auto data = BandFixture(2, 4, 2);
  StubScorer scorer(2, data, {true, true, false, true, false, true, false, true});
  auto report = Evaluate(scorer, data, data, {"a", "b"}, "toy");
  CHECK(report.acc == 62.5);
  CHECK(report.n_converted == 8);
  CHECK(report.confusion.size() == 2);
  std::int64_t total = 0;
  for (auto &row : report.confusion)
    for (auto c : row) total += c;
  CHECK(total == 8);
  auto j = report.ToJson();
  CHECK(j.at("acc").get<double>() == 62.5);
  CHECK(report.Table().find("toy") != std::string::npos);
  CHECK_THROWS(Evaluate(scorer, {}, data, {"a", "b"}));
}
