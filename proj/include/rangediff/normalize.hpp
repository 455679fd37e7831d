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
#include "rangediff/rangeview.hpp"

namespace rangediff {

/// Affine map of [kMinDepth, kMaxDepth] meters onto [-1, 1].
inline double depth_linear_norm(double d) {
  if (d < kMinDepth || d > kMaxDepth)
    throw std::out_of_range("depth_linear_norm: depth outside [1.4, 54]");
  return -1.0 + 2.0 * (d - kMinDepth) / (kMaxDepth - kMinDepth);
}

inline double depth_linear_denorm(double u) {
  if (u < -1.0 || u > 1.0)
    throw std::out_of_range("depth_linear_denorm: value outside [-1, 1]");
  return kMinDepth + (u + 1.0) * 0.5 * (kMaxDepth - kMinDepth);
}

/// Object-aware depth remap parameters. min_d/max_d are the object's depth
/// bounds after linear normalisation; alpha is the fraction of the output
/// range allotted to the object band.
struct DepthNormParams {
  double alpha = 0.5;
  double min_d = 0.0;
  double max_d = 0.0;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw std::invalid_argument("DepthNormParams: alpha must lie in (0, 1)");
    if (!(-1.0 <= min_d && min_d < max_d && max_d <= 1.0))
      throw std::invalid_argument("DepthNormParams: need -1 <= min_d < max_d <= 1");
  }
};

/// Piecewise-linear remap of normalised depth: [min_d, max_d] -> [-a, a],
/// [-1, min_d) -> [-1, -a), (max_d, 1] -> (a, 1]. Continuous and strictly
/// increasing on [-1, 1].
inline double depth_object_norm(double d, const DepthNormParams& p) {
  p.validate();
  if (d < -1.0 || d > 1.0)
    throw std::out_of_range("depth_object_norm: value outside [-1, 1]");
  const double a = p.alpha;
  if (d < p.min_d) return -1.0 + (1.0 - a) * (d + 1.0) / (p.min_d + 1.0);
  // Anchored at the fixed endpoint so d = 1 maps to exactly 1.
  if (d > p.max_d) return 1.0 - (1.0 - a) * (1.0 - d) / (1.0 - p.max_d);
  return -a + 2.0 * a * (d - p.min_d) / (p.max_d - p.min_d);
}

/// Exact inverse of depth_object_norm.
inline double depth_object_denorm(double u, const DepthNormParams& p) {
  p.validate();
  if (u < -1.0 || u > 1.0)
    throw std::out_of_range("depth_object_denorm: value outside [-1, 1]");
  const double a = p.alpha;
  if (u < -a) return -1.0 + (u + 1.0) * (p.min_d + 1.0) / (1.0 - a);
  if (u > a) return 1.0 - (1.0 - u) * (1.0 - p.max_d) / (1.0 - a);
  return p.min_d + (u + a) * (p.max_d - p.min_d) / (2.0 * a);
}

/// CDF-of-exponential intensity map: i' = 2 exp(-lambda i / 255) - 1.
/// Allocates most of the output range to low intensities.
inline double intensity_norm(double i, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("intensity_norm: lambda must be positive");
  if (i < 0.0 || i > 255.0)
    throw std::out_of_range("intensity_norm: intensity outside [0, 255]");
  return 2.0 * std::exp(-lambda * i / 255.0) - 1.0;
}

/// Inverse of intensity_norm. The representable floor is 2 exp(-lambda) - 1
/// (the image of i = 255); values meaningfully below it are rejected, and the
/// result is clamped back into [0, 255] against rounding overshoot.
inline double intensity_denorm(double u, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("intensity_denorm: lambda must be positive");
  const double floor_u = 2.0 * std::exp(-lambda) - 1.0;
  if (u > 1.0 || u < floor_u - 1e-6)
    throw std::out_of_range("intensity_denorm: value below the representable floor or above 1");
  const double i = -255.0 / lambda * std::log((u + 1.0) / 2.0);
  return std::clamp(i, 0.0, 255.0);
}

/// Block mean with an integer factor dividing both dimensions. The mean is
/// accumulated as a running mean, which keeps constant blocks exact, so
/// avg_pool_downscale(nn_upscale(g, f), f) == g for every factor.
inline Grid avg_pool_downscale(const Grid& g, int factor) {
  if (factor < 1) throw std::invalid_argument("avg_pool_downscale: factor must be >= 1");
  if (g.rows() % factor != 0 || g.cols() % factor != 0)
    throw std::invalid_argument("avg_pool_downscale: factor must divide both dimensions");
  Grid out(g.rows() / factor, g.cols() / factor);
  for (int r = 0; r < out.rows(); ++r) {
    for (int c = 0; c < out.cols(); ++c) {
      double mean = 0.0;
      int n = 0;
      for (int i = 0; i < factor; ++i)
        for (int j = 0; j < factor; ++j) {
          ++n;
          mean += (g(r * factor + i, c * factor + j) - mean) / n;
        }
      out(r, c) = mean;
    }
  }
  return out;
}

/// Nearest-neighbour upscale: each source cell replicated into an f x f block.
inline Grid nn_upscale(const Grid& g, int factor) {
  if (factor < 1) throw std::invalid_argument("nn_upscale: factor must be >= 1");
  Grid out(g.rows() * factor, g.cols() * factor);
  for (int r = 0; r < out.rows(); ++r)
    for (int c = 0; c < out.cols(); ++c) out(r, c) = g(r / factor, c / factor);
  return out;
}

}  // namespace rangediff
