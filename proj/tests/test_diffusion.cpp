// Copyright 2026 The rangediff Authors
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

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "rangediff/diffusion.hpp"
#include "rangediff/schedule.hpp"

using namespace rangediff;
using Catch::Matchers::WithinAbs;

namespace {

NoiseSchedule two_step() { return make_linear_schedule(2, 0.1, 0.1); }

Vec random_vec(std::mt19937_64& rng, size_t n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Vec out(n);
  for (double& v : out) v = normal(rng);
  return out;
}

}  // namespace

TEST_CASE("linear schedule construction") {
  SECTION("constant two-step schedule") {
    const NoiseSchedule s = two_step();
    CHECK_THAT(s.alpha_bar(1), WithinAbs(0.9, 1e-15));
    CHECK_THAT(s.alpha_bar(2), WithinAbs(0.81, 1e-15));
    CHECK(s.alpha_bar(0) == 1.0);
    CHECK(s.one_minus_alpha_bar(0) == 0.0);
    CHECK(s.one_minus_alpha_bar(1) == s.beta(1));
  }
  SECTION("single step") {
    const NoiseSchedule s = make_linear_schedule(1, 0.5, 0.5);
    CHECK(s.alpha_bar(1) == 0.5);
    CHECK(s.beta_tilde(1) == 0.0);
  }
  SECTION("vanishing beta keeps alpha_bar near one") {
    const NoiseSchedule s = make_linear_schedule(5, 1e-12, 1e-12);
    CHECK(s.alpha_bar(5) > 1.0 - 1e-10);
  }
  SECTION("the default schedule decays to almost pure noise") {
    const NoiseSchedule s = make_linear_schedule(1000, 1e-4, 2e-2);
    CHECK(s.alpha_bar(1000) < 1e-3);
    for (int t = 2; t <= 1000; ++t) CHECK(s.alpha_bar(t) < s.alpha_bar(t - 1));
  }
  SECTION("beta_tilde never exceeds beta") {
    const NoiseSchedule s = make_linear_schedule(200, 1e-4, 2e-2);
    for (int t = 1; t <= 200; ++t) CHECK(s.beta_tilde(t) <= s.beta(t));
  }
  SECTION("invalid ranges are rejected") {
    CHECK_THROWS_AS(make_linear_schedule(0, 0.1, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(make_linear_schedule(10, 0.0, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(make_linear_schedule(10, 0.3, 0.2), std::invalid_argument);
    CHECK_THROWS_AS(make_linear_schedule(10, 0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(NoiseSchedule({0.2, 0.1}), std::invalid_argument);
  }
  SECTION("timestep bounds") {
    const NoiseSchedule s = two_step();
    CHECK_THROWS_AS(s.beta(0), std::out_of_range);
    CHECK_THROWS_AS(s.beta(3), std::out_of_range);
  }
}

TEST_CASE("forward sampling follows the closed-form marginal") {
  const NoiseSchedule s = two_step();
  SECTION("frozen scalar case") {
    // sqrt(0.81) = 0.9 and sqrt(0.19) = 0.43588989435406733.
    const Vec xt = forward_sample({1.0}, 2, {1.0}, s);
    CHECK_THAT(xt[0], WithinAbs(1.3358898943540674, 1e-12));
  }
  SECTION("zero data passes the scaled noise through") {
    const Vec xt = forward_sample({0.0, 0.0}, 2, {1.0, -2.0}, s);
    CHECK_THAT(xt[0], WithinAbs(std::sqrt(0.19), 1e-12));
    CHECK_THAT(xt[1], WithinAbs(-2.0 * std::sqrt(0.19), 1e-12));
  }
  SECTION("tiny beta leaves the data almost unchanged") {
    const NoiseSchedule tiny = make_linear_schedule(1, 1e-14, 1e-14);
    const Vec xt = forward_sample({3.0}, 1, {1.0}, tiny);
    CHECK_THAT(xt[0], WithinAbs(3.0, 1e-6));
  }
  SECTION("dimension mismatch") {
    CHECK_THROWS_AS(forward_sample({1.0}, 1, {1.0, 2.0}, s), std::invalid_argument);
  }
}

TEST_CASE("recursive noising matches the closed form in distribution") {
  const NoiseSchedule s = make_linear_schedule(30, 5e-3, 4e-2);
  std::mt19937_64 rng(101);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double x0 = 1.7;
  const int t_target = 30;
  const int n = 20000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = x0;
    for (int t = 1; t <= t_target; ++t)
      x = std::sqrt(1.0 - s.beta(t)) * x + std::sqrt(s.beta(t)) * normal(rng);
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  const double want_mean = std::sqrt(s.alpha_bar(t_target)) * x0;
  const double want_var = s.one_minus_alpha_bar(t_target);
  const double se_mean = std::sqrt(want_var / n);
  const double se_var = want_var * std::sqrt(2.0 / (n - 1));
  CHECK_THAT(mean, WithinAbs(want_mean, 3.0 * se_mean));
  CHECK_THAT(var, WithinAbs(want_var, 3.0 * se_var));
}

TEST_CASE("posterior parameters") {
  const NoiseSchedule s = two_step();
  SECTION("t = 1 collapses onto x0 exactly") {
    const PosteriorParams post = posterior_params({0.7, -1.3}, {2.0, 0.5}, 1, s);
    CHECK(post.mean[0] == 0.7);
    CHECK(post.mean[1] == -1.3);
    CHECK(post.variance == 0.0);
  }
  SECTION("frozen two-step case") {
    // Both coefficients equal sqrt(0.9) * 0.1 / 0.19, about 0.49931.
    const double coeff = std::sqrt(0.9) * 0.1 / 0.19;
    CHECK_THAT(coeff, WithinAbs(0.49931, 1e-5));
    const PosteriorParams post = posterior_params({1.0}, {1.0}, 2, s);
    CHECK_THAT(post.mean[0], WithinAbs(2.0 * coeff, 1e-12));
    CHECK_THAT(post.variance, WithinAbs(0.05263157894736842, 1e-15));
  }
  SECTION("zero inputs give zero mean") {
    const PosteriorParams post = posterior_params({0.0}, {0.0}, 2, s);
    CHECK(post.mean[0] == 0.0);
  }
  SECTION("agrees with the density grid fit") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    std::uniform_real_distribution<double> beta_hi(0.02, 0.3);
    std::uniform_int_distribution<int> steps_dist(2, 12);
    for (int trial = 0; trial < 20; ++trial) {
      const int steps = steps_dist(rng);
      const NoiseSchedule sched = make_linear_schedule(steps, 0.01, beta_hi(rng));
      std::uniform_int_distribution<int> t_dist(2, steps);
      const int t = t_dist(rng);
      const double x0 = val(rng), xt = val(rng);
      const PosteriorParams post = posterior_params({x0}, {xt}, t, sched);
      const oracles::GaussianFit fit = oracles::grid_posterior_fit(x0, xt, t, sched);
      CHECK_THAT(post.mean[0], WithinAbs(fit.mean, 1e-4));
      CHECK_THAT(post.variance, WithinAbs(fit.variance, 1e-4));
    }
  }
}

TEST_CASE("reparameterised mean") {
  const NoiseSchedule s = make_linear_schedule(50, 1e-3, 5e-2);
  SECTION("zero noise rescales x_t") {
    const Vec mu = mu_from_eps({1.0, 2.0}, {0.0, 0.0}, 10, s);
    CHECK_THAT(mu[0], WithinAbs(1.0 / std::sqrt(s.alpha(10)), 1e-15));
    CHECK_THAT(mu[1], WithinAbs(2.0 / std::sqrt(s.alpha(10)), 1e-15));
  }
  SECTION("identity with the exact noise reproduces the posterior mean") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 1000; ++trial) {
      const Vec x0 = random_vec(rng, 3);
      const Vec noise = random_vec(rng, 3);
      std::uniform_int_distribution<int> t_dist(1, 50);
      const int t = t_dist(rng);
      const Vec xt = forward_sample(x0, t, noise, s);
      const Vec mu = mu_from_eps(xt, noise, t, s);
      const PosteriorParams post = posterior_params(x0, xt, t, s);
      for (int i = 0; i < 3; ++i) CHECK_THAT(mu[i], WithinAbs(post.mean[i], 1e-12));
    }
  }
  SECTION("vanishing beta approaches the identity") {
    const NoiseSchedule tiny = make_linear_schedule(3, 1e-13, 1e-12);
    const Vec mu = mu_from_eps({5.0}, {0.3}, 2, tiny);
    CHECK_THAT(mu[0], WithinAbs(5.0, 1e-5));
  }
}

TEST_CASE("ancestral stepping") {
  const NoiseSchedule s = make_linear_schedule(20, 1e-3, 4e-2);
  SECTION("zero prediction and zero noise rescale x_t") {
    const Vec out = ddpm_step({1.0}, {0.0}, 5, {0.0}, s);
    CHECK_THAT(out[0], WithinAbs(1.0 / std::sqrt(s.alpha(5)), 1e-15));
  }
  SECTION("no noise is injected at the final step") {
    const Vec a = ddpm_step({1.0}, {0.2}, 1, {10.0}, s);
    const Vec b = ddpm_step({1.0}, {0.2}, 1, {0.0}, s);
    CHECK(a[0] == b[0]);
  }
  SECTION("sigma choice selects the variance") {
    const Vec a = ddpm_step({0.0}, {0.0}, 5, {1.0}, s, SigmaChoice::kBetaTilde);
    const Vec b = ddpm_step({0.0}, {0.0}, 5, {1.0}, s, SigmaChoice::kBeta);
    CHECK_THAT(a[0], WithinAbs(std::sqrt(s.beta_tilde(5)), 1e-15));
    CHECK_THAT(b[0], WithinAbs(std::sqrt(s.beta(5)), 1e-15));
  }
  SECTION("the full chain with oracle noise recovers x0") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 20; ++trial) {
      const Vec x0 = random_vec(rng, 2, 2.0);
      Vec x = forward_sample(x0, s.steps(), random_vec(rng, 2), s);
      const Vec zero(2, 0.0);
      for (int t = s.steps(); t >= 1; --t) {
        Vec eps(2);
        const double sq = std::sqrt(s.alpha_bar(t));
        const double sq1 = std::sqrt(s.one_minus_alpha_bar(t));
        for (int i = 0; i < 2; ++i) eps[i] = (x[i] - sq * x0[i]) / sq1;
        x = ddpm_step(x, eps, t, zero, s);
      }
      for (int i = 0; i < 2; ++i) CHECK_THAT(x[i], WithinAbs(x0[i], 1e-6));
    }
  }
}

TEST_CASE("strided deterministic stepping") {
  const NoiseSchedule s = make_linear_schedule(20, 1e-3, 4e-2);
  SECTION("a jump to zero returns the x0 estimate") {
    std::mt19937_64 rng(19);
    const Vec x0 = random_vec(rng, 2);
    const Vec noise = random_vec(rng, 2);
    const Vec xt = forward_sample(x0, 20, noise, s);
    const Vec out = ddim_step(xt, noise, 20, 0, s);
    for (int i = 0; i < 2; ++i) CHECK_THAT(out[i], WithinAbs(x0[i], 1e-12));
  }
  SECTION("exact noise keeps the state on the forward trajectory") {
    std::mt19937_64 rng(23);
    const Vec x0 = random_vec(rng, 3);
    const Vec noise = random_vec(rng, 3);
    for (int t_prev : {0, 3, 7, 12}) {
      const Vec xt = forward_sample(x0, 15, noise, s);
      const Vec out = ddim_step(xt, noise, 15, t_prev, s);
      const Vec want = t_prev == 0 ? x0 : forward_sample(x0, t_prev, noise, s);
      for (int i = 0; i < 3; ++i) CHECK_THAT(out[i], WithinAbs(want[i], 1e-12));
    }
  }
  SECTION("chained strides with per-step exact noise recover x0") {
    std::mt19937_64 rng(29);
    const Vec x0 = random_vec(rng, 2, 1.5);
    for (int stride : {1, 2, 4, 5, 10, 20}) {
      Vec x = forward_sample(x0, 20, random_vec(rng, 2), s);
      for (int t = 20; t >= stride; t -= stride) {
        Vec eps(2);
        const double sq = std::sqrt(s.alpha_bar(t));
        const double sq1 = std::sqrt(s.one_minus_alpha_bar(t));
        for (int i = 0; i < 2; ++i) eps[i] = (x[i] - sq * x0[i]) / sq1;
        x = ddim_step(x, eps, t, t - stride, s);
      }
      for (int i = 0; i < 2; ++i) CHECK_THAT(x[i], WithinAbs(x0[i], 1e-9));
    }
  }
  SECTION("invalid step pairs are rejected") {
    CHECK_THROWS_AS(ddim_step({0.0}, {0.0}, 5, 5, s), std::invalid_argument);
    CHECK_THROWS_AS(ddim_step({0.0}, {0.0}, 5, -1, s), std::invalid_argument);
    CHECK_THROWS_AS(ddim_step({0.0}, {0.0}, 21, 5, s), std::invalid_argument);
  }
}

TEST_CASE("classifier-free guidance combination") {
  CHECK(cfg_combine({1.0}, {0.0}, 1.0)[0] == 1.0);
  CHECK(cfg_combine({1.0}, {0.25}, 0.0)[0] == 0.25);
  CHECK(cfg_combine({1.0}, {0.0}, 5.0)[0] == 5.0);
  SECTION("equal inputs are a fixed point for any scale") {
    for (double scale : {-2.0, 0.0, 1.0, 5.0, 100.0}) {
      const Vec out = cfg_combine({0.3, -1.0}, {0.3, -1.0}, scale);
      CHECK(out[0] == 0.3);
      CHECK(out[1] == -1.0);
    }
  }
  CHECK_THROWS_AS(cfg_combine({1.0}, {1.0, 2.0}, 1.0), std::invalid_argument);
}

TEST_CASE("noise prediction loss") {
  CHECK(simple_loss({1.0, 2.0}, {1.0, 2.0}) == 0.0);
  CHECK(simple_loss({1.0, 0.0}, {0.0, 0.0}) == 1.0);
  SECTION("duplicate implementation oracle") {
    std::mt19937_64 rng(31);
    const Vec a = random_vec(rng, 16);
    const Vec b = random_vec(rng, 16);
    double want = 0.0;
    for (size_t i = 0; i < a.size(); ++i) want += (a[i] - b[i]) * (a[i] - b[i]);
    CHECK_THAT(simple_loss(a, b), WithinAbs(want, 1e-12));
  }
}
