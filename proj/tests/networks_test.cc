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

#include "wavc/common/error.h"
#include "wavc/nn/networks.h"
#include "wavc/nn/norm_layers.h"

using namespace wavc;
using namespace wavc::nn;

namespace {

double MaxAbs(const torch::Tensor &t) { return t.abs().max().item<double>(); }

GeneratorConfig TinyGenerator() {
  GeneratorConfig c;
  c.mcep_dim = 8;
  c.base_channels = 8;
  c.bottleneck_channels = 16;
  c.n_bottleneck_blocks = 1;
  c.embedding_dim = 6;
  return c;
}

DiscriminatorConfig TinyDiscriminator(int64_t n) {
  DiscriminatorConfig c;
  c.mcep_dim = 8;
  c.channels = {4, 6, 8, 8};
  c.n_speakers = n;
  return c;
}

SpeakerEncoderConfig TinyEncoder(int64_t n) {
  SpeakerEncoderConfig c;
  c.mcep_dim = 8;
  c.channels = 8;
  c.embedding_dim = 6;
  c.n_speakers = n;
  return c;
}

torch::Tensor Ids(std::vector<int64_t> v) { return torch::tensor(v, torch::kLong); }

}  // namespace

TEST_CASE("generator: 8x1x37x256 in, same shape out") {
  torch::manual_seed(1);
  Generator g(GeneratorConfig{});
  torch::NoGradGuard no_grad;
  auto x = torch::randn({8, 1, 37, 256});
  auto y = g(x, torch::randn({8, 128}));
  CHECK(y.sizes() == x.sizes());
  CHECK(torch::isfinite(y).all().item<bool>());
}

TEST_CASE("generator: downsample factor variants keep the shape") {
  torch::manual_seed(2);
  for (auto factors : {std::vector<int64_t>{1, 2}, std::vector<int64_t>{4, 1}, std::vector<int64_t>{2, 2}}) {
    auto c = TinyGenerator();
    c.downsample_factors = factors;
    Generator g(c);
    torch::NoGradGuard no_grad;
    auto x = torch::randn({2, 1, 8, 32});
    CHECK(g(x, torch::randn({2, 6})).sizes() == x.sizes());
  }
}

TEST_CASE("generator: shape errors and config validation") {
  Generator g(TinyGenerator());
  torch::NoGradGuard no_grad;
  CHECK_THROWS_AS(g(torch::randn({2, 1, 8, 30}), torch::randn({2, 6})), ShapeError);
  CHECK_THROWS_AS(g(torch::randn({2, 1, 9, 32}), torch::randn({2, 6})), ShapeError);
  CHECK_THROWS_AS(g(torch::randn({2, 1, 8, 32}), torch::randn({3, 6})), ShapeError);
  CHECK_THROWS_AS(g(torch::randn({2, 8, 32}), torch::randn({2, 6})), ShapeError);
  auto c = TinyGenerator();
  c.n_bottleneck_blocks = 0;
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  c = TinyGenerator();
  c.downsample_factors = {3};
  CHECK_THROWS_AS(c.Validate(), ConfigError);
  auto j = nlohmann::json(TinyGenerator());
  CHECK(j.get<GeneratorConfig>() == TinyGenerator());
}

TEST_CASE("generator: deterministic and finite over random draws") {
  for (int draw = 0; draw < 50; ++draw) {
    torch::manual_seed(100 + draw);
    Generator g(TinyGenerator());
    torch::NoGradGuard no_grad;
    auto x = torch::randn({2, 1, 8, 32}) * 3;
    auto e = torch::randn({2, 6});
    auto y = g(x, e);
    REQUIRE(torch::isfinite(y).all().item<bool>());
    REQUIRE(torch::equal(y, g(x, e)));
  }
}

TEST_CASE("generator: embeddings with identical affine outputs give identical conversions") {
  torch::manual_seed(3);
  Generator g(TinyGenerator());
  torch::NoGradGuard no_grad;
  // Zero the affine weights: every embedding then maps to the biases.
  for (auto &b : g->blocks()) {
    b->conv->affine->gamma->weight.zero_();
    b->conv->affine->beta->weight.zero_();
  }
  auto x = torch::randn({1, 1, 8, 32});
  CHECK(torch::equal(g(x, torch::randn({1, 6})), g(x, torch::randn({1, 6}) * 5)));
}

TEST_CASE("generator: every affine bias perturbation reaches the output") {
  torch::manual_seed(4);
  Generator g(TinyGenerator());
  g->to(torch::kDouble);
  torch::NoGradGuard no_grad;
  auto x = torch::randn({1, 1, 8, 32}, torch::kDouble);
  auto e = torch::randn({1, 6}, torch::kDouble);
  auto base = g(x, e);
  // Demodulation cancels beta exactly, so only gamma carries the condition.
  auto &gamma_bias = g->blocks()[0]->conv->affine->gamma->bias;
  int changed = 0;
  for (int64_t j = 0; j < gamma_bias.numel(); ++j) {
    const double orig = gamma_bias[j].item<double>();
    auto gamma = g->blocks()[0]->conv->affine->gamma(e)[0][j].item<double>();
    gamma_bias[j] = orig - 2.0 * gamma;  // flips the sign of gamma_j
    if (MaxAbs(g(x, e) - base) > 1e-9) ++changed;
    gamma_bias[j] = orig;
  }
  CHECK(changed == gamma_bias.numel());
}

TEST_CASE("discriminator: head isolation, trunk sharing, batch decomposition") {
  torch::manual_seed(5);
  Discriminator d(TinyDiscriminator(3));
  torch::NoGradGuard no_grad;
  auto x = torch::randn({3, 1, 8, 32});
  auto s = Ids({0, 1, 2});
  auto base = d(x, s);
  CHECK(base.sizes() == torch::IntArrayRef{3});

  d->head_weight[1] += 0.5;
  d->head_bias[1] += 0.5;
  auto after_head = d(x, s);
  CHECK(after_head[0].item<float>() == base[0].item<float>());
  CHECK(after_head[2].item<float>() == base[2].item<float>());
  CHECK(after_head[1].item<float>() != base[1].item<float>());

  auto before_trunk = d(x, s);
  d->trunk[0]->as<torch::nn::Conv2dImpl>()->weight.add_(0.1);
  auto after_trunk = d(x, s);
  for (int b = 0; b < 3; ++b) CHECK(after_trunk[b].item<float>() != before_trunk[b].item<float>());

  auto x2 = torch::randn({2, 1, 8, 32});
  auto both = d(x2, Ids({0, 1}));
  auto one = d(x2.narrow(0, 0, 1), Ids({0}));
  auto two = d(x2.narrow(0, 1, 1), Ids({1}));
  CHECK(both[0].item<float>() == doctest::Approx(one[0].item<float>()).epsilon(1e-5));
  CHECK(both[1].item<float>() == doctest::Approx(two[0].item<float>()).epsilon(1e-5));

  CHECK_THROWS_AS(d(x2, Ids({0, 3})), InvalidArgument);
  CHECK_THROWS_AS(d(x2, Ids({-1, 0})), InvalidArgument);
  CHECK_THROWS_AS(d(x2, Ids({0})), ShapeError);
}

TEST_CASE("discriminator and encoder: non-selected heads get exactly zero gradient") {
  torch::manual_seed(6);
  Discriminator d(TinyDiscriminator(3));
  auto x = torch::randn({2, 1, 8, 32});
  d(x, Ids({0, 2})).sum().backward();
  CHECK(d->head_weight.grad()[1].abs().max().item<float>() == 0.0f);
  CHECK(d->head_bias.grad()[1].item<float>() == 0.0f);
  CHECK(d->head_weight.grad()[0].abs().max().item<float>() > 0.0f);

  SpeakerEncoder e(TinyEncoder(3));
  e(x, Ids({1, 1})).sum().backward();
  CHECK(e->head_weight.grad()[0].abs().max().item<float>() == 0.0f);
  CHECK(e->head_weight.grad()[2].abs().max().item<float>() == 0.0f);
  CHECK(e->head_bias.grad()[2].abs().max().item<float>() == 0.0f);
  CHECK(e->head_weight.grad()[1].abs().max().item<float>() > 0.0f);
}

TEST_CASE("statistic pooling") {
  torch::manual_seed(7);
  auto h = torch::randn({2, 3, 20});
  auto pooled = StatisticPooling(h);
  CHECK(pooled.sizes() == torch::IntArrayRef{2, 6});
  auto perm = torch::randperm(20);
  CHECK(MaxAbs(StatisticPooling(h.index_select(2, perm)) - pooled) < 1e-5);

  auto constant = torch::randn({2, 3, 1}).expand({2, 3, 20}).contiguous();
  auto pc = StatisticPooling(constant);
  CHECK(MaxAbs(pc.narrow(1, 3, 3)) < 1e-5);
  CHECK(MaxAbs(pc.narrow(1, 0, 3) - constant.select(2, 0)) < 1e-6);
}

TEST_CASE("speaker encoder: pooled statistics match a recomputation from trunk activations") {
  torch::manual_seed(8);
  SpeakerEncoder e(TinyEncoder(2));
  e->to(torch::kDouble);
  torch::NoGradGuard no_grad;
  auto x = torch::randn({2, 1, 8, 24}, torch::kDouble);
  auto h = e->Trunk(x);
  auto a = h.accessor<double, 3>();
  auto pooled = torch::zeros({2, 2 * h.size(1)}, torch::kDouble);
  for (int64_t b = 0; b < h.size(0); ++b)
    for (int64_t c = 0; c < h.size(1); ++c) {
      double mean = 0, var = 0;
      for (int64_t t = 0; t < h.size(2); ++t) mean += a[b][c][t];
      mean /= h.size(2);
      for (int64_t t = 0; t < h.size(2); ++t) var += (a[b][c][t] - mean) * (a[b][c][t] - mean);
      pooled[b][c] = mean;
      pooled[b][h.size(1) + c] = std::sqrt(var / h.size(2));
    }
  CHECK(MaxAbs(e->Heads(pooled, Ids({0, 1})) - e(x, Ids({0, 1}))) < 1e-10);

  auto perm = torch::randperm(24);
  auto permuted = x.index_select(3, perm);
  // The trunk has temporal context, so permute trunk outputs rather than input.
  CHECK(MaxAbs(e->Heads(StatisticPooling(h.index_select(2, perm)), Ids({0, 1})) - e(x, Ids({0, 1}))) < 1e-10);
  (void)permuted;

  auto shared = e(x, std::nullopt);
  auto avg = (e(x, Ids({0, 0})) + e(x, Ids({1, 1}))) / 2;
  CHECK(MaxAbs(shared - avg) < 1e-10);
  CHECK_THROWS_AS(e(x, Ids({0, 2})), InvalidArgument);
}

TEST_CASE("all parameter groups receive gradient from one synthetic step") {
  torch::manual_seed(9);
  Generator g(TinyGenerator());
  Discriminator d(TinyDiscriminator(2));
  SpeakerEncoder enc(TinyEncoder(2));
  auto x = torch::randn({2, 1, 8, 32});
  auto s = Ids({0, 1});
  auto t = Ids({1, 0});
  auto e_t = enc(x, t);
  auto fake = g(x, e_t);
  auto cyc = (g(fake, enc(x, s)) - x).abs().mean();
  auto spk = (enc(fake, t) - e_t).abs().mean();
  auto adv = (d(fake, t) - 1).pow(2).mean() + (d(x, s) - 1).pow(2).mean();
  (adv + cyc + spk).backward();
  std::vector<std::string> dead;
  for (auto *m : std::initializer_list<torch::nn::Module *>{g.get(), d.get(), enc.get()})
    for (const auto &p : m->named_parameters()) {
      if (!p.value().grad().defined() || p.value().grad().abs().max().item<float>() == 0.0f)
        dead.push_back(m->name() + "." + p.key());
    }
  // beta is cancelled by the demodulation, so its maps legitimately stay dead.
  std::vector<std::string> unexpected;
  for (const auto &n : dead)
    if (n.find(".affine.beta.") == std::string::npos) unexpected.push_back(n);
  CHECK_MESSAGE(unexpected.empty(), "dead parameters: " << unexpected.size() << " first "
                                                        << (unexpected.empty() ? "" : unexpected[0]));
}
