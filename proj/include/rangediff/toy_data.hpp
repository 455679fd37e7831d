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

#pragma once

#include <cmath>
#include <random>
#include <utility>

#include "rangediff/box.hpp"
#include "rangediff/core.hpp"

namespace rangediff {

/// Mixture of `modes` Gaussians placed evenly on a circle. Each draw also
/// yields one condition token: the Fourier embedding of the mode's angle.
class RingDataset {
 public:
  RingDataset(int modes = 8, double radius = 3.0, double sigma = 0.2, int d_tok = 16)
      : modes_(modes), radius_(radius), sigma_(sigma), d_tok_(d_tok) {
    if (modes < 1 || d_tok < 2 || d_tok % 2 != 0)
      throw std::invalid_argument("RingDataset: need modes >= 1 and even d_tok >= 2");
    freqs_ = default_fourier_frequencies(d_tok / 2);
  }

  std::pair<Vec, Grid> sample(std::mt19937_64& rng) const {
    std::uniform_int_distribution<int> mode_dist(0, modes_ - 1);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int k = mode_dist(rng);
    const double angle = 2.0 * M_PI * k / modes_;
    Vec x = {radius_ * std::cos(angle) + sigma_ * normal(rng),
             radius_ * std::sin(angle) + sigma_ * normal(rng)};
    const std::vector<double> emb = fourier_embed({angle}, freqs_);
    Grid tokens(1, d_tok_);
    for (int c = 0; c < d_tok_; ++c) tokens(0, c) = emb[c];
    return {std::move(x), std::move(tokens)};
  }

  /// Population mean of the mixture (the origin for any mode count > 1).
  Vec mean() const { return {0.0, 0.0}; }

 private:
  int modes_;
  double radius_;
  double sigma_;
  int d_tok_;
  std::vector<double> freqs_;
};

/// The classic two interleaved half-circles, conditioned on the moon index.
class TwoMoonsDataset {
 public:
  TwoMoonsDataset(double noise = 0.1, int d_tok = 16) : noise_(noise), d_tok_(d_tok) {
    if (d_tok < 2 || d_tok % 2 != 0)
      throw std::invalid_argument("TwoMoonsDataset: need even d_tok >= 2");
    freqs_ = default_fourier_frequencies(d_tok / 2);
  }

  std::pair<Vec, Grid> sample(std::mt19937_64& rng) const {
    std::uniform_int_distribution<int> moon_dist(0, 1);
    std::uniform_real_distribution<double> unit(0.0, M_PI);
    std::normal_distribution<double> normal(0.0, 1.0);
    const int moon = moon_dist(rng);
    const double a = unit(rng);
    Vec x(2);
    if (moon == 0) {
      x = {std::cos(a), std::sin(a)};
    } else {
      x = {1.0 - std::cos(a), 0.5 - std::sin(a)};
    }
    x[0] += noise_ * normal(rng);
    x[1] += noise_ * normal(rng);
    const std::vector<double> emb = fourier_embed({moon * M_PI}, freqs_);
    Grid tokens(1, d_tok_);
    for (int c = 0; c < d_tok_; ++c) tokens(0, c) = emb[c];
    return {std::move(x), std::move(tokens)};
  }

 private:
  double noise_;
  int d_tok_;
  std::vector<double> freqs_;
};

}  // namespace rangediff
