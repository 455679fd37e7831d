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
#include <stdexcept>
#include <vector>

#include "rangediff/core.hpp"

namespace rangediff {

/// Which variance the ancestral sampler uses for its noise term.
enum class SigmaChoice { kBetaTilde, kBeta };

/// Noise schedule tables for T steps. Timesteps are 1-based throughout:
/// beta(t), alpha(t) = 1 - beta(t), alpha_bar(t) = prod_{i<=t} alpha(i), and
/// beta_tilde(t) = (1 - alpha_bar(t-1)) / (1 - alpha_bar(t)) * beta(t), with
/// the convention alpha_bar(0) = 1 so that t = 1 is exact.
class NoiseSchedule {
 public:
  explicit NoiseSchedule(std::vector<double> betas) : beta_(std::move(betas)) {
    if (beta_.empty()) throw std::invalid_argument("NoiseSchedule: empty beta sequence");
    double prev = 0.0;
    for (double b : beta_) {
      if (!(b > 0.0 && b < 1.0))
        throw std::invalid_argument("NoiseSchedule: beta values must lie in (0, 1)");
      if (b < prev) throw std::invalid_argument("NoiseSchedule: beta sequence must be nondecreasing");
      prev = b;
    }
    alpha_.reserve(beta_.size());
    alpha_bar_.reserve(beta_.size());
    omab_.reserve(beta_.size());
    beta_tilde_.reserve(beta_.size());
    double bar = 1.0;
    double omab = 0.0;  // 1 - alpha_bar, tracked by its own recurrence so
                        // 1 - alpha_bar(1) equals beta(1) exactly
    for (size_t i = 0; i < beta_.size(); ++i) {
      const double a = 1.0 - beta_[i];
      const double omab_prev = omab;
      bar *= a;
      omab = omab * a + beta_[i];
      alpha_.push_back(a);
      alpha_bar_.push_back(bar);
      omab_.push_back(omab);
      beta_tilde_.push_back(omab_prev / omab * beta_[i]);
      if (beta_tilde_.back() > beta_[i])
        throw std::invalid_argument("NoiseSchedule: beta_tilde exceeded beta");
    }
  }

  int steps() const { return static_cast<int>(beta_.size()); }

  double beta(int t) const { return beta_[check(t)]; }
  double alpha(int t) const { return alpha_[check(t)]; }
  double alpha_bar(int t) const { return t == 0 ? 1.0 : alpha_bar_[check(t)]; }
  /// 1 - alpha_bar(t), kept as its own table for accuracy near t = 1.
  double one_minus_alpha_bar(int t) const { return t == 0 ? 0.0 : omab_[check(t)]; }
  double beta_tilde(int t) const { return beta_tilde_[check(t)]; }

  double sigma2(int t, SigmaChoice choice) const {
    return choice == SigmaChoice::kBetaTilde ? beta_tilde(t) : beta(t);
  }

 private:
  size_t check(int t) const {
    if (t < 1 || t > steps())
      throw std::out_of_range("NoiseSchedule: timestep outside [1, T]");
    return static_cast<size_t>(t - 1);
  }

  std::vector<double> beta_;
  std::vector<double> alpha_;
  std::vector<double> alpha_bar_;
  std::vector<double> omab_;
  std::vector<double> beta_tilde_;
};

/// Linear beta ramp inclusive of both endpoints. T = 1 collapses to the
/// start value.
inline NoiseSchedule make_linear_schedule(int steps, double beta_start, double beta_end) {
  if (steps < 1) throw std::invalid_argument("make_linear_schedule: need T >= 1");
  if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0))
    throw std::invalid_argument("make_linear_schedule: need 0 < beta_start <= beta_end < 1");
  std::vector<double> betas(steps);
  for (int i = 0; i < steps; ++i)
    betas[i] = (steps == 1)
                   ? beta_start
                   : beta_start + (beta_end - beta_start) * i / static_cast<double>(steps - 1);
  return NoiseSchedule(std::move(betas));
}

}  // namespace rangediff
