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

#include "rangediff/core.hpp"
#include "rangediff/schedule.hpp"

namespace rangediff {

/// Closed-form forward marginal: x_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) e.
inline Vec forward_sample(const Vec& x0, int t, const Vec& noise, const NoiseSchedule& s) {
  check_same_dim(x0, noise, "forward_sample");
  const double a = std::sqrt(s.alpha_bar(t));
  const double b = std::sqrt(s.one_minus_alpha_bar(t));
  Vec out(x0.size());
  for (size_t i = 0; i < x0.size(); ++i) out[i] = a * x0[i] + b * noise[i];
  return out;
}

struct PosteriorParams {
  Vec mean;
  double variance = 0.0;
};

/// Parameters of the exact Gaussian posterior q(x_{t-1} | x_t, x0):
///   mean = sqrt(abar_{t-1}) beta_t / (1 - abar_t) x0
///        + sqrt(alpha_t) (1 - abar_{t-1}) / (1 - abar_t) x_t
///   variance = beta_tilde_t.
/// With alpha_bar(0) = 1, t = 1 gives mean = x0 and variance = 0.
inline PosteriorParams posterior_params(const Vec& x0, const Vec& xt, int t,
                                        const NoiseSchedule& s) {
  check_same_dim(x0, xt, "posterior_params");
  const double omab = s.one_minus_alpha_bar(t);
  const double omab_prev = s.one_minus_alpha_bar(t - 1);
  const double c0 = std::sqrt(s.alpha_bar(t - 1)) * s.beta(t) / omab;
  const double ct = std::sqrt(s.alpha(t)) * omab_prev / omab;
  PosteriorParams out;
  out.mean.resize(x0.size());
  for (size_t i = 0; i < x0.size(); ++i) out.mean[i] = c0 * x0[i] + ct * xt[i];
  out.variance = s.beta_tilde(t);
  return out;
}

/// Reparameterised posterior mean:
///   mu = (x_t - beta_t / sqrt(1 - abar_t) eps) / sqrt(alpha_t).
inline Vec mu_from_eps(const Vec& xt, const Vec& eps, int t, const NoiseSchedule& s) {
  check_same_dim(xt, eps, "mu_from_eps");
  const double inv_sqrt_a = 1.0 / std::sqrt(s.alpha(t));
  const double coef = s.beta(t) / std::sqrt(s.one_minus_alpha_bar(t));
  Vec out(xt.size());
  for (size_t i = 0; i < xt.size(); ++i) out[i] = inv_sqrt_a * (xt[i] - coef * eps[i]);
  return out;
}

/// One ancestral denoising step: x_{t-1} = mu_from_eps + sigma_t z. The noise
/// z is caller-supplied so chains replay deterministically; it is forced to
/// zero at the final step t = 1.
inline Vec ddpm_step(const Vec& xt, const Vec& eps_pred, int t, const Vec& z,
                     const NoiseSchedule& s, SigmaChoice sigma_choice = SigmaChoice::kBetaTilde) {
  check_same_dim(xt, eps_pred, "ddpm_step");
  check_same_dim(xt, z, "ddpm_step");
  Vec out = mu_from_eps(xt, eps_pred, t, s);
  if (t > 1) {
    const double sigma = std::sqrt(s.sigma2(t, sigma_choice));
    for (size_t i = 0; i < out.size(); ++i) out[i] += sigma * z[i];
  }
  return out;
}

/// One deterministic strided step: estimate x0 from the noise prediction and
/// re-noise it to t_prev along the closed-form marginal. t_prev = 0 returns
/// the x0 estimate itself.
inline Vec ddim_step(const Vec& xt, const Vec& eps_pred, int t, int t_prev,
                     const NoiseSchedule& s) {
  check_same_dim(xt, eps_pred, "ddim_step");
  if (t_prev < 0 || t_prev >= t || t > s.steps())
    throw std::invalid_argument("ddim_step: need 0 <= t_prev < t <= T");
  const double sq = std::sqrt(s.alpha_bar(t));
  const double sq1 = std::sqrt(s.one_minus_alpha_bar(t));
  const double sqp = std::sqrt(s.alpha_bar(t_prev));
  const double sqp1 = std::sqrt(s.one_minus_alpha_bar(t_prev));
  Vec out(xt.size());
  for (size_t i = 0; i < xt.size(); ++i) {
    const double x0_hat = (xt[i] - sq1 * eps_pred[i]) / sq;
    out[i] = sqp * x0_hat + sqp1 * eps_pred[i];
  }
  return out;
}

/// Classifier-free guidance: eps_uncond + scale * (eps_cond - eps_uncond).
inline Vec cfg_combine(const Vec& eps_cond, const Vec& eps_uncond, double scale) {
  check_same_dim(eps_cond, eps_uncond, "cfg_combine");
  Vec out(eps_cond.size());
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = eps_uncond[i] + scale * (eps_cond[i] - eps_uncond[i]);
  return out;
}

/// Squared Euclidean distance between true and predicted noise, summed over
/// dimensions. Batch averaging is the caller's business.
inline double simple_loss(const Vec& eps_true, const Vec& eps_pred) {
  check_same_dim(eps_true, eps_pred, "simple_loss");
  double acc = 0.0;
  for (size_t i = 0; i < eps_true.size(); ++i) {
    const double d = eps_true[i] - eps_pred[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace rangediff
