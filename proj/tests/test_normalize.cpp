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

#include "rangediff/normalize.hpp"

using namespace rangediff;
using Catch::Matchers::WithinAbs;

TEST_CASE("linear depth normalisation") {
  CHECK(depth_linear_norm(1.4) == -1.0);
  CHECK(depth_linear_norm(54.0) == 1.0);
  CHECK_THAT(depth_linear_norm(27.7), WithinAbs(0.0, 1e-12));  // midpoint of [1.4, 54]
  CHECK_THROWS_AS(depth_linear_norm(1.3), std::out_of_range);
  CHECK_THROWS_AS(depth_linear_norm(54.1), std::out_of_range);
  SECTION("inverse") {
    CHECK(depth_linear_denorm(-1.0) == 1.4);
    CHECK(depth_linear_denorm(1.0) == 54.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(1.4, 54.0);
    for (int i = 0; i < 10000; ++i) {
      const double x = d(rng);
      CHECK_THAT(depth_linear_denorm(depth_linear_norm(x)), WithinAbs(x, 1e-9));
    }
  }
}

TEST_CASE("object-aware depth normalisation") {
  const DepthNormParams p{0.5, -0.2, 0.4};
  SECTION("worked example") {
    CHECK_THAT(depth_object_norm(0.1, p), WithinAbs(0.0, 1e-15));
    CHECK_THAT(depth_object_denorm(0.0, p), WithinAbs(0.1, 1e-15));
  }
  SECTION("segment boundaries and global endpoints") {
    CHECK(depth_object_norm(p.min_d, p) == -p.alpha);
    CHECK_THAT(depth_object_norm(p.max_d, p), WithinAbs(p.alpha, 1e-15));
    CHECK(depth_object_norm(-1.0, p) == -1.0);
    CHECK(depth_object_norm(1.0, p) == 1.0);
    CHECK(depth_object_denorm(-1.0, p) == -1.0);
    CHECK_THAT(depth_object_denorm(p.alpha, p), WithinAbs(p.max_d, 1e-15));
    CHECK_THAT(depth_object_denorm(-p.alpha, p), WithinAbs(p.min_d, 1e-15));
  }
  SECTION("continuity at the band edges") {
    for (double delta : {1e-12, 1e-10}) {
      CHECK_THAT(depth_object_norm(p.min_d - delta, p), WithinAbs(-p.alpha, 1e-9));
      CHECK_THAT(depth_object_norm(p.max_d + delta, p), WithinAbs(p.alpha, 1e-9));
    }
  }
  SECTION("strictly increasing and invertible for random parameters") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
      DepthNormParams q;
      q.alpha = 0.05 + 0.9 * unit(rng);
      q.min_d = -1.0 + 1.8 * unit(rng);
      q.max_d = q.min_d + (1.0 - q.min_d) * (0.05 + 0.95 * unit(rng));
      double prev_d = -2.0, prev_u = -2.0;
      for (int i = 0; i <= 50; ++i) {
        const double d = -1.0 + 2.0 * i / 50.0;
        const double u = depth_object_norm(d, q);
        CHECK(u >= -1.0);
        CHECK(u <= 1.0);
        if (prev_d > -1.5) CHECK(u > prev_u);
        CHECK_THAT(depth_object_denorm(u, q), WithinAbs(d, 1e-9));
        prev_d = d;
        prev_u = u;
      }
    }
  }
  SECTION("invalid parameters") {
    CHECK_THROWS_AS(depth_object_norm(0.0, {0.5, 0.4, 0.4}), std::invalid_argument);
    CHECK_THROWS_AS(depth_object_norm(0.0, {0.0, -0.2, 0.4}), std::invalid_argument);
    CHECK_THROWS_AS(depth_object_norm(0.0, {1.0, -0.2, 0.4}), std::invalid_argument);
    CHECK_THROWS_AS(depth_object_norm(1.5, p), std::out_of_range);
  }
}

TEST_CASE("intensity normalisation") {
  CHECK(intensity_norm(0.0, 4.0) == 1.0);
  CHECK_THAT(intensity_norm(255.0, 4.0), WithinAbs(2.0 * std::exp(-4.0) - 1.0, 1e-15));
  CHECK_THAT(intensity_norm(255.0, 4.0), WithinAbs(-0.96336872222253164, 1e-12));
  CHECK_THAT(intensity_norm(255.0 * std::log(2.0) / 4.0, 4.0), WithinAbs(0.0, 1e-12));
  CHECK_THROWS_AS(intensity_norm(-1.0, 4.0), std::out_of_range);
  CHECK_THROWS_AS(intensity_norm(256.0, 4.0), std::out_of_range);
  CHECK_THROWS_AS(intensity_norm(10.0, 0.0), std::invalid_argument);

  SECTION("inverse") {
    CHECK(intensity_denorm(1.0, 4.0) == 0.0);
    CHECK_THAT(intensity_denorm(-0.963369, 4.0), WithinAbs(255.0, 1e-3));
    CHECK_THAT(intensity_denorm(0.0, 4.0), WithinAbs(255.0 * std::log(2.0) / 4.0, 1e-12));
    CHECK_THAT(intensity_denorm(0.0, 4.0), WithinAbs(44.188132760696514, 1e-9));
    CHECK_THROWS_AS(intensity_denorm(2.0 * std::exp(-4.0) - 1.0 - 1e-3, 4.0), std::out_of_range);
    CHECK_THROWS_AS(intensity_denorm(1.1, 4.0), std::out_of_range);
  }
  SECTION("round trips for several rates") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> val(0.0, 255.0);
    for (double lambda : {1.0, 4.0, 8.0})
      for (int i = 0; i < 10000; ++i) {
        const double x = val(rng);
        CHECK_THAT(intensity_denorm(intensity_norm(x, lambda), lambda), WithinAbs(x, 1e-9));
      }
  }
  SECTION("low intensities get more dynamic range") {
    const double h = 1e-6;
    for (double lambda : {0.5, 1.0, 4.0, 8.0}) {
      const double slope0 =
          std::abs(intensity_norm(h, lambda) - intensity_norm(0.0, lambda)) / h;
      const double slope255 =
          std::abs(intensity_norm(255.0, lambda) - intensity_norm(255.0 - h, lambda)) / h;
      CHECK(slope0 > slope255);
    }
  }
}

TEST_CASE("average pooling") {
  SECTION("2x2 mean") {
    Grid g(2, 2);
    g(0, 0) = 1;
    g(0, 1) = 3;
    g(1, 0) = 5;
    g(1, 1) = 7;
    const Grid out = avg_pool_downscale(g, 2);
    REQUIRE(out.rows() == 1);
    REQUIRE(out.cols() == 1);
    CHECK(out(0, 0) == 4.0);
  }
  SECTION("constant grids stay exactly constant") {
    for (int factor : {1, 2, 3, 5}) {
      Grid g(2 * factor, 3 * factor, 0.1);
      const Grid out = avg_pool_downscale(g, factor);
      for (double v : out.values()) CHECK(v == 0.1);
    }
  }
  SECTION("factor 1 is the identity") {
    Grid g(3, 4);
    for (size_t i = 0; i < g.size(); ++i) g.values()[i] = static_cast<double>(i) * 0.37;
    CHECK(avg_pool_downscale(g, 1) == g);
  }
  SECTION("factor must divide the shape") {
    CHECK_THROWS_AS(avg_pool_downscale(Grid(3, 4), 2), std::invalid_argument);
  }
}

TEST_CASE("nearest-neighbour upscale") {
  SECTION("single cell replication") {
    Grid g(1, 1, 2.0);
    const Grid out = nn_upscale(g, 3);
    REQUIRE(out.rows() == 3);
    REQUIRE(out.cols() == 3);
    for (double v : out.values()) CHECK(v == 2.0);
  }
  SECTION("factor 1 is the identity") {
    Grid g(2, 5, 1.25);
    CHECK(nn_upscale(g, 1) == g);
  }
  SECTION("upscale then pool is the exact identity") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> val(-10.0, 10.0);
    for (int factor : {2, 3, 4, 16}) {
      Grid g(4, 4);
      for (double& v : g.values()) v = val(rng);
      CHECK(avg_pool_downscale(nn_upscale(g, factor), factor) == g);
    }
  }
}
