// Copyright 2026 The scenemotion Authors
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

#include "doctest_torch.hpp"
#include "helpers.hpp"
#include "scenemotion/error.hpp"
#include "scenemotion/gp_latent.hpp"

using namespace scenemotion;

namespace {

double kernel(int i, int j, double sigma) { return std::exp(-std::abs(i - j) / (2.0 * sigma * sigma)); }

}  // namespace

TEST_SUITE("gp_latent") {
  TEST_CASE("covariance entries follow the kernel") {
    auto k = build_gp_covariance(3, 1.0);
    CHECK(k.dtype() == torch::kFloat64);
    CHECK(k[0][2].item<double>() == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(k[0][2].item<double>() == k[2][0].item<double>());
    CHECK(k[0][1].item<double>() == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
    CHECK(k[1][2].item<double>() == k[0][1].item<double>());

    for (double sigma : {0.3, 1.0, 4.0, 50.0}) {
      auto m = build_gp_covariance(9, sigma);
      for (int i = 0; i < 9; ++i) {
        CHECK(m[i][i].item<double>() == 1.0);
        for (int j = 0; j < 9; ++j) {
          CHECK(m[i][j].item<double>() == doctest::Approx(kernel(i, j, sigma)).epsilon(1e-14));
          CHECK(m[i][j].item<double>() == m[j][i].item<double>());
          if (j + 1 < 9 && j >= i) CHECK(m[i][j + 1].item<double>() <= m[i][j].item<double>());
        }
      }
    }
  }

  TEST_CASE("tiny sigma gives the identity") {
    auto m = build_gp_covariance(4, 1e-4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        if (i == j) CHECK(m[i][j].item<double>() == 1.0);
        else CHECK(m[i][j].item<double>() < 1e-300);
      }
  }

  TEST_CASE("invalid configurations are rejected") {
    CHECK_THROWS_AS(build_gp_covariance(4, 0.0), ConfigError);
    CHECK_THROWS_AS(build_gp_covariance(4, -1.0), ConfigError);
    CHECK_THROWS_AS(build_gp_covariance(0, 1.0), ConfigError);
    GPLatentConfig c{2, 4, {1.0}, 1e-6};
    CHECK_THROWS_AS(c.validate(), ConfigError);
    c.sigmas = {1.0, -2.0};
    CHECK_THROWS_AS(GPLatentSampler{c}, ConfigError);
    c.sigmas = {1.0, 2.0};
    c.channels = 0;
    CHECK_THROWS_AS(c.validate(), ConfigError);
  }

  TEST_CASE("ladder spans 0.5 to 8 geometrically") {
    auto c = GPLatentConfig::with_ladder(5, 6);
    REQUIRE(c.sigmas.size() == 5);
    CHECK(c.sigmas.front() == doctest::Approx(0.5));
    CHECK(c.sigmas.back() == doctest::Approx(8.0));
    for (size_t i = 1; i + 1 < c.sigmas.size(); ++i)
      CHECK(c.sigmas[i] * c.sigmas[i] == doctest::Approx(c.sigmas[i - 1] * c.sigmas[i + 1]));
    CHECK(GPLatentConfig::with_ladder(1, 6).sigmas.size() == 1);
  }

  TEST_CASE("near-singular kernels factor after jitter escalation") {
    GPLatentConfig c{1, 64, {200.0}, 1e-6};
    GPLatentSampler s(c);
    CHECK(s.jitter_used()[0] >= 1e-6);
    CHECK(s.jitter_used()[0] <= 1e-3);
    auto gen = make_generator(1);
    CHECK(torch::isfinite(s.sample(4, gen)).all().item<bool>());
  }

  TEST_CASE("seeded draws are bit-identical") {
    auto c = GPLatentConfig::with_ladder(8, 6);
    auto g1 = make_generator(42), g2 = make_generator(42), g3 = make_generator(43);
    auto a = sample_latent(c, g1).z, b = sample_latent(c, g2).z, d = sample_latent(c, g3).z;
    CHECK(a.sizes() == torch::IntArrayRef({8, 6}));
    CHECK(torch::equal(a, b));
    CHECK_FALSE(torch::equal(a, d));
  }

  TEST_CASE("unit-length latents have unit variance") {
    GPLatentSampler s(GPLatentConfig{3, 1, {0.5, 1.0, 2.0}, 1e-6});
    auto gen = make_generator(2);
    auto z = s.sample(50000, gen);  // (N, 3, 1)
    auto var = z.squeeze(-1).var(0, false);
    for (int c = 0; c < 3; ++c) CHECK(std::abs(var[c].item<double>() - 1.0) < 0.02);
  }

  TEST_CASE("empirical covariance matches the kernel; channels are independent") {
    GPLatentSampler s(GPLatentConfig{2, 6, {0.5, 2.0}, 1e-6});
    auto gen = make_generator(3);
    auto z = s.sample(50000, gen);  // (N, 2, 6)
    for (int c = 0; c < 2; ++c) {
      auto x = z.select(1, c);
      auto cov = x.transpose(0, 1).matmul(x) / 50000.0;
      auto ref = build_gp_covariance(6, c == 0 ? 0.5 : 2.0);
      CHECK(testing::max_abs_diff(cov, ref) < 0.05);
    }
    auto cross = z.select(1, 0).transpose(0, 1).matmul(z.select(1, 1)) / 50000.0;
    CHECK(cross.abs().max().item<double>() < 0.05);
  }
}
