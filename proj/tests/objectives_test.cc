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

#include "oracles.h"
#include "wavc/common/error.h"
#include "wavc/train/objectives.h"

using namespace wavc;
using namespace wavc::train;

namespace {

torch::Tensor T(std::vector<double> v) { return torch::tensor(v, torch::kDouble); }

double V(const torch::Tensor &t) { return t.item<double>(); }

std::vector<double> ToVector(const torch::Tensor &t) {
  auto c = t.to(torch::kDouble).contiguous();
  return {c.data_ptr<double>(), c.data_ptr<double>() + c.numel()};
}

}  // namespace

TEST_CASE("lsgan losses") {
  CHECK(V(LsganDLoss(torch::ones({4}), torch::zeros({4}))) == 0.0);
  CHECK(V(LsganDLoss(torch::zeros({4}), torch::ones({4}))) == 2.0);
  CHECK(V(LsganDLoss(T({0.5}), T({0.5}))) == 0.5);
  CHECK(V(LsganGLoss(torch::ones({3}))) == 0.0);
  CHECK(V(LsganGLoss(torch::zeros({3}))) == 1.0);
  CHECK(V(LsganGLoss(T({0.5, 1.5}))) == 0.25);

  auto d = torch::ones({5}, torch::kDouble).requires_grad_(true);
  LsganGLoss(d).backward();
  CHECK(d.grad().abs().max().item<double>() == 0.0);
}

TEST_CASE("L1 losses") {
  torch::manual_seed(1);
  auto x = torch::randn({2, 1, 4, 8}, torch::kDouble);
  for (auto loss : {&CycleLoss, &IdentityLoss, &SpkRecLoss}) {
    CHECK(V(loss(x, x)) == 0.0);
    CHECK(V(loss(x, x + 0.5)) == doctest::Approx(0.5).epsilon(1e-12));
    auto y = torch::randn_like(x);
    CHECK(std::abs(V(loss(x, y)) - oracle::L1Loop(ToVector(x), ToVector(y))) < 1e-7);
    CHECK_THROWS_AS(loss(x, torch::randn({2, 1, 4, 7}, torch::kDouble)), ShapeError);
    CHECK_THROWS_AS(loss(torch::zeros({0}), torch::zeros({0})), InvalidArgument);
  }
  auto e = torch::randn({3, 5}, torch::kDouble);
  CHECK(V(SpkRecLoss(e, e + 1)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("domain classifier loss") {
  auto p = torch::zeros({2, 3}, torch::kDouble);
  p[0][1] = 1.0;
  p[1][2] = 1.0;
  auto s = torch::tensor({1, 2}, torch::kLong);
  CHECK(V(DomainClsLoss(p, s)) == 0.0);
  auto uniform = torch::full({3, 4}, 0.25, torch::kDouble);
  CHECK(V(DomainClsLoss(uniform, torch::tensor({0, 3, 2}, torch::kLong))) == doctest::Approx(std::log(4.0)).epsilon(1e-12));
  const double capped = V(DomainClsLoss(p, torch::tensor({0, 0}, torch::kLong)));
  CHECK(std::isfinite(capped));
  CHECK(capped == doctest::Approx(-std::log(kProbabilityFloor)).epsilon(1e-9));
  CHECK_THROWS(DomainClsLoss(p, torch::tensor({0, 3}, torch::kLong)));
}

TEST_CASE("original adversarial losses follow the literal form") {
  auto [g0, d0] = StarGanVcAdvLosses(torch::ones({3}, torch::kDouble), torch::zeros({3}, torch::kDouble));
  CHECK(V(g0) == 0.0);
  CHECK(V(d0) == -2.0);
  auto [g, d] = StarGanVcAdvLosses(T({0.2, 0.6}), T({0.3, 0.9}));
  CHECK(V(g) == doctest::Approx(-0.6).epsilon(1e-12));                   // -(0.3 + 0.9)/2
  CHECK(V(d) == doctest::Approx(-0.4 - 0.4).epsilon(1e-12));             // -mean(real) - mean(1 - fake)
}

TEST_CASE("speaker pair concatenation") {
  torch::manual_seed(2);
  auto a = torch::randn({3, 4}), b = torch::randn({3, 4});
  auto c = ConcatSpeakerPair(a, b);
  CHECK(c.size(1) == 8);
  CHECK(torch::equal(c.narrow(1, 0, 4), a));
  CHECK(torch::equal(c.narrow(1, 4, 4), b));
  auto v = ConcatSpeakerPair(torch::randn({4}), torch::randn({4}));
  CHECK(v.numel() == 8);
}

TEST_CASE("total losses") {
  LossWeights w;
  auto zero = TotalLosses({}, w);
  CHECK(zero.weighted_total_g == 0.0);
  CHECK(zero.weighted_total_d == 0.0);

  LossComponents c{0.3, 0.7, 0.11, 0.05, 0.2, std::nullopt};
  auto r = TotalLosses(c, w);
  CHECK(r.weighted_total_g == doctest::Approx(0.3 + 10 * 0.11 + 1 * 0.05));
  CHECK(r.weighted_total_d == 0.7);
  w.use_identity = true;
  CHECK(TotalLosses(c, w).weighted_total_g == doctest::Approx(0.3 + 1.1 + 0.05 + 5 * 0.2));
  w.lambda_cyc = 0;
  CHECK(TotalLosses(c, w).weighted_total_g == doctest::Approx(0.3 + 0.05 + 1.0));

  LossWeights bad;
  bad.lambda_spk = -1;
  CHECK_THROWS_AS(bad.Validate(), ConfigError);

  r.iteration = 12;
  auto back = nlohmann::json(r).get<LossReport>();
  CHECK(back.iteration == 12);
  CHECK(back.components.cyc == c.cyc);
  CHECK(back.components.id == c.id);
  CHECK_FALSE(back.components.domain.has_value());
}

TEST_CASE("properties: non-negativity, batch permutation, triangle bound") {
  torch::manual_seed(3);
  for (int trial = 0; trial < 50; ++trial) {
    auto a = torch::randn({6, 5}, torch::kDouble), b = torch::randn({6, 5}, torch::kDouble),
         c = torch::randn({6, 5}, torch::kDouble);
    auto r = torch::randn({6}, torch::kDouble), f = torch::randn({6}, torch::kDouble);
    auto perm = torch::randperm(6);
    CHECK(V(LsganDLoss(r, f)) >= 0.0);
    CHECK(V(LsganGLoss(f)) >= 0.0);
    CHECK(V(LsganDLoss(r.index_select(0, perm), f.index_select(0, perm))) == doctest::Approx(V(LsganDLoss(r, f))));
    for (auto loss : {&CycleLoss, &IdentityLoss, &SpkRecLoss}) {
      CHECK(V(loss(a, b)) >= 0.0);
      CHECK(V(loss(a.index_select(0, perm), b.index_select(0, perm))) == doctest::Approx(V(loss(a, b))));
      CHECK(V(loss(a, c)) <= V(loss(a, b)) + V(loss(b, c)) + 1e-12);
    }
    auto p = torch::softmax(torch::randn({6, 3}, torch::kDouble), 1);
    auto s = torch::randint(0, 3, {6}, torch::kLong);
    CHECK(V(DomainClsLoss(p, s)) >= 0.0);
    CHECK(V(DomainClsLoss(p.index_select(0, perm), s.index_select(0, perm))) == doctest::Approx(V(DomainClsLoss(p, s))));
  }
}
