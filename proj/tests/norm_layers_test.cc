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

#include "gradcheck.h"
#include "oracles.h"
#include "wavc/common/error.h"
#include "wavc/nn/networks.h"
#include "wavc/nn/norm_layers.h"

using namespace wavc;
using namespace wavc::nn;

namespace {

double MaxAbs(const torch::Tensor &t) { return t.abs().max().item<double>(); }

std::vector<double> ToVector(const torch::Tensor &t) {
  auto c = t.to(torch::kDouble).contiguous();
  return {c.data_ptr<double>(), c.data_ptr<double>() + c.numel()};
}

// Stride-1 "same" convolution with explicit loops: f [J, T], w [I, J, K].
torch::Tensor LoopConv(const torch::Tensor &f, const torch::Tensor &w) {
  const auto J = f.size(0), T = f.size(1), I = w.size(0), K = w.size(2);
  auto out = torch::zeros({I, T}, torch::kDouble);
  auto fa = f.accessor<double, 2>();
  auto wa = w.accessor<double, 3>();
  auto oa = out.accessor<double, 2>();
  const auto pad = (K - 1) / 2;
  for (int64_t i = 0; i < I; ++i)
    for (int64_t t = 0; t < T; ++t) {
      double s = 0;
      for (int64_t j = 0; j < J; ++j)
        for (int64_t k = 0; k < K; ++k) {
          const auto src = t + k - pad;
          if (src >= 0 && src < T) s += wa[i][j][k] * fa[j][src];
        }
      oa[i][t] = s;
    }
  return out;
}

}  // namespace

TEST_CASE("instance_norm examples") {
  auto constant = torch::full({1, 1, 5}, 3.0);
  CHECK(MaxAbs(InstanceNorm(constant)) == 0.0);

  auto pair = torch::tensor({1.0, 3.0}, torch::kDouble).view({1, 1, 2});
  auto out = InstanceNorm(pair);
  CHECK(out[0][0][0].item<double>() == doctest::Approx(-1.0).epsilon(1e-4));
  CHECK(out[0][0][1].item<double>() == doctest::Approx(1.0).epsilon(1e-4));

  torch::manual_seed(1);
  auto x = torch::randn({3, 4, 50}, torch::kDouble) * 3 + 2;
  auto y = InstanceNorm(x);
  CHECK(MaxAbs(y.mean(2)) < 1e-6);
  auto std = (y - y.mean(2, true)).pow(2).mean(2).sqrt();
  CHECK(MaxAbs(std - 1) < 1e-4);
  // A second pass rescales by std(y) + eps = 1 + eps (1 - 1/sigma) to first order.
  const auto sigma = (x - x.mean(2, true)).pow(2).mean(2, true).sqrt();
  auto predicted = y / (sigma / (sigma + kNormEps) + kNormEps);
  CHECK(MaxAbs(InstanceNorm(y) - predicted) < 1e-9);
  auto z = torch::randn({3, 4, 50}, torch::kDouble);
  auto zn = InstanceNorm(z);
  CHECK(MaxAbs(InstanceNorm(zn) - zn) < 1e-5);

  auto x2 = torch::randn({2, 3, 4, 6});  // 2D feature maps normalize over H x T
  auto y2 = InstanceNorm(x2);
  CHECK(MaxAbs(y2.mean({2, 3})) < 1e-5);

  CHECK_THROWS_AS(InstanceNorm(torch::zeros({1, 1, 1})), ShapeError);
}

TEST_CASE("cin examples") {
  auto f = torch::tensor({1.0, 3.0}, torch::kDouble).view({1, 1, 2});
  auto ones = torch::ones({1, 1}, torch::kDouble), zeros = torch::zeros({1, 1}, torch::kDouble);
  CHECK(MaxAbs(ConditionalInstanceNorm(f, {ones, zeros}) - InstanceNorm(f)) == 0.0);
  auto beta = torch::full({1, 1}, 0.25, torch::kDouble);
  CHECK(MaxAbs(ConditionalInstanceNorm(f, {zeros, beta}) - 0.25) == 0.0);
  auto out = ConditionalInstanceNorm(f, {torch::full({1, 1}, 2.0, torch::kDouble), ones});
  CHECK(out[0][0][0].item<double>() == doctest::Approx(-1.0).epsilon(1e-4));
  CHECK(out[0][0][1].item<double>() == doctest::Approx(3.0).epsilon(1e-4));
  CHECK_THROWS_AS(ConditionalInstanceNorm(torch::zeros({1, 2, 4}), {ones, zeros}), ShapeError);
}

TEST_CASE("adain") {
  torch::manual_seed(2);
  AffineMap identity(8, 4);
  auto f = torch::randn({2, 4, 10});
  auto e = torch::randn({2, 8});
  CHECK(MaxAbs(AdaIN(f, e, identity) - InstanceNorm(f)) < 1e-7);
  auto e2 = torch::randn({2, 8});
  CHECK(torch::equal(AdaIN(f, e, identity), AdaIN(f, e2, identity)));

  AffineMap random(8, 4, 0.5);
  auto p = random(e);
  CHECK(MaxAbs(AdaIN(f, e, random) - (p.gamma.unsqueeze(2) * InstanceNorm(f) + p.beta.unsqueeze(2))) < 1e-6);
  CHECK_THROWS_AS(AdaIN(f, torch::randn({2, 7}), random), ShapeError);
}

TEST_CASE("glu examples") {
  auto a = torch::tensor({1.0, 2.0}, torch::kDouble).view({1, 2, 1});
  CHECK(MaxAbs(Glu(torch::cat({a, torch::zeros_like(a)}, 1)) - a / 2) < 1e-15);
  CHECK(MaxAbs(Glu(torch::cat({a, torch::full_like(a, 20.0)}, 1)) - a) < 1e-8);
  auto out = Glu(torch::cat({a, torch::full_like(a, std::log(3.0))}, 1));
  CHECK(out[0][0][0].item<double>() == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(out[0][1][0].item<double>() == doctest::Approx(1.5).epsilon(1e-12));
  CHECK_THROWS_AS(Glu(torch::zeros({1, 3, 2})), ShapeError);

  torch::manual_seed(3);
  auto f = torch::randn({4, 6, 9}) * 5;
  auto g = Glu(f);
  CHECK(g.size(1) == 3);
  CHECK((g.abs() <= f.narrow(1, 0, 3).abs()).all().item<bool>());
}

TEST_CASE("wadain_modulate examples") {
  auto w = torch::zeros({2, 1, 1}, torch::kDouble);
  w[0][0][0] = 1.0;
  w[1][0][0] = 3.0;
  auto out = WAdaINModulate(w, {torch::ones({1, 1}, torch::kDouble), torch::zeros({1, 1}, torch::kDouble)});
  CHECK(out[0][0][0][0].item<double>() == doctest::Approx(-1.0).epsilon(1e-4));
  CHECK(out[0][1][0][0].item<double>() == doctest::Approx(1.0).epsilon(1e-4));

  torch::manual_seed(4);
  auto w2 = torch::randn({5, 3, 2}, torch::kDouble);
  auto beta0 = torch::zeros({2, 3}, torch::kDouble);
  auto base = WAdaINModulate(w2, {torch::ones({2, 3}, torch::kDouble), beta0}, 0.0);
  auto scaled = WAdaINModulate(w2, {torch::full({2, 3}, 7.5, torch::kDouble), beta0}, 0.0);
  CHECK(MaxAbs(base - scaled) < 1e-12);
  auto flipped = WAdaINModulate(w2, {torch::full({2, 3}, -2.0, torch::kDouble), beta0}, 0.0);
  CHECK(MaxAbs(base + flipped) < 1e-12);

  CHECK_THROWS_AS(WAdaINModulate(torch::randn({1, 3, 2}), {torch::ones({1, 3}), torch::zeros({1, 3})}), ShapeError);
  CHECK_THROWS_AS(WAdaINModulate(torch::randn({4, 3, 2}), {torch::ones({1, 2}), torch::zeros({1, 2})}), ShapeError);
}

TEST_CASE("wadain_modulate: beta cancels under demodulation") {
  torch::manual_seed(5);
  auto w = torch::randn({6, 4, 3}, torch::kDouble);
  auto gamma = torch::randn({2, 4}, torch::kDouble);
  auto a = WAdaINModulate(w, {gamma, torch::zeros({2, 4}, torch::kDouble)});
  auto b = WAdaINModulate(w, {gamma, torch::randn({2, 4}, torch::kDouble) * 10});
  CHECK(MaxAbs(a - b) < 1e-9);
}

TEST_CASE("wadain_modulate matches the scalar-loop oracle") {
  torch::manual_seed(6);
  for (int trial = 0; trial < 20; ++trial) {
    const int B = 1 + trial % 3, I = 2 + trial % 5, J = 1 + trial % 4, K = 1 + trial % 3;
    auto w = torch::randn({I, J, K}, torch::kDouble);
    auto g = torch::randn({B, J}, torch::kDouble);
    auto b = torch::randn({B, J}, torch::kDouble);
    auto got = ToVector(WAdaINModulate(w, {g, b}));
    auto want = oracle::WAdaInLoop(ToVector(w), ToVector(g), ToVector(b), B, I, J, K, kNormEps);
    double err = 0;
    for (std::size_t i = 0; i < got.size(); ++i) err = std::max(err, std::abs(got[i] - want[i]));
    CHECK(err < 1e-9);
  }
}

TEST_CASE("demodulation invariant in double precision") {
  torch::manual_seed(7);
  auto w = torch::randn({8, 5, 3}, torch::kDouble);
  auto out = WAdaINModulate(w, {torch::randn({4, 5}, torch::kDouble), torch::randn({4, 5}, torch::kDouble)}, 0.0);
  CHECK(MaxAbs(out.mean(1)) < 1e-8);
  CHECK(MaxAbs((out - out.mean(1, true)).pow(2).mean(1).sqrt() - 1) < 1e-6);
}

TEST_CASE("wadain_conv: conditioning and per-sample independence") {
  torch::manual_seed(8);
  WAdaINConv1d conv(4, 6, 3, 5, /*affine_weight_std=*/1.0);
  conv->to(torch::kDouble);
  auto f = torch::randn({1, 4, 12}, torch::kDouble).repeat({2, 1, 1});
  auto e_same = torch::randn({1, 5}, torch::kDouble).repeat({2, 1});
  auto out = conv(f, e_same);
  CHECK(torch::equal(out[0], out[1]));

  auto e_diff = torch::randn({2, 5}, torch::kDouble);
  auto p = conv->affine(e_diff);
  REQUIRE_FALSE(torch::equal(p.gamma[0], p.gamma[1]));
  auto out2 = conv(f, e_diff);
  CHECK(MaxAbs(out2[0] - out2[1]) > 0.0);

  // Embeddings producing opposite signs of gamma give visibly different outputs.
  AffineParams flip{torch::ones({2, 4}, torch::kDouble), torch::zeros({2, 4}, torch::kDouble)};
  flip.gamma[1][0] = -1.0;
  auto k = WAdaINModulate(conv->weight, flip);
  auto y = PerSampleConv1d(f, k);
  CHECK(MaxAbs(y[0] - y[1]) > 1e-2);
}

TEST_CASE("wadain_conv equals a reference convolution with the precomputed kernel") {
  torch::manual_seed(9);
  WAdaINConv1d conv(3, 4, 5, 2, 0.7);
  conv->to(torch::kDouble);
  auto f = torch::randn({1, 3, 9}, torch::kDouble);
  auto e = torch::randn({1, 2}, torch::kDouble);
  torch::NoGradGuard no_grad;
  auto kernel = conv->ModulatedKernels(e)[0];
  auto want = LoopConv(f[0], kernel);
  CHECK(MaxAbs(conv(f, e)[0] - want) < 1e-12);

  CHECK_THROWS_AS(conv(torch::randn({1, 2, 9}, torch::kDouble), e), ShapeError);
  CHECK_THROWS_AS(conv(f, torch::randn({2, 2}, torch::kDouble)), ShapeError);
}

TEST_CASE("gradients match central differences") {
  torch::manual_seed(10);
  const int B = 2, I = 3, J = 2, K = 3, T = 5, E = 4;
  WAdaINConv1d conv(J, I, K, E, 0.5);
  conv->to(torch::kDouble);
  auto f = torch::randn({B, J, T}, torch::kDouble).requires_grad_(true);
  auto e = torch::randn({B, E}, torch::kDouble);
  auto r = torch::randn({B, I, T}, torch::kDouble);
  auto res = testing::GradCheck([&] { return (conv(f, e) * r).sum(); },
                                {{"f", f},
                                 {"w", conv->weight},
                                 {"gamma.weight", conv->affine->gamma->weight},
                                 {"gamma.bias", conv->affine->gamma->bias},
                                 {"beta.weight", conv->affine->beta->weight},
                                 {"beta.bias", conv->affine->beta->bias}});
  CHECK_MESSAGE(res.ok, "worst input " << res.worst << " error " << res.max_error);

  auto g = torch::randn({B, 4, T}, torch::kDouble).requires_grad_(true);
  auto rg = torch::randn({B, 2, T}, torch::kDouble);
  auto glu = testing::GradCheck([&] { return (Glu(g) * rg).sum(); }, {{"f", g}});
  CHECK(glu.ok);

  BottleneckBlock block(J, K, E, 0.5, kNormEps);
  block->to(torch::kDouble);
  {
    torch::NoGradGuard ng;
    block->bias.normal_(0.0, 0.3);
  }
  auto x = torch::randn({B, J, T}, torch::kDouble).requires_grad_(true);
  auto rb = torch::randn({B, J, T}, torch::kDouble);
  std::vector<std::pair<std::string, torch::Tensor>> inputs{{"x", x}};
  for (const auto &p : block->named_parameters()) inputs.emplace_back(p.key(), p.value());
  auto blk = testing::GradCheck([&] { return (block(x, e) * rb).sum(); }, inputs);
  CHECK_MESSAGE(blk.ok, "worst input " << blk.worst << " error " << blk.max_error);
}
