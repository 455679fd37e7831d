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

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rangediff/core.hpp"

namespace rangediff {

/// A reference/candidate grid pair evaluated over a mask.
struct MaskedPair {
  const Grid& reference;
  const Grid& candidate;
  const Mask& mask;

  void validate() const {
    if (!reference.same_shape(candidate) || reference.rows() != mask.rows() ||
        reference.cols() != mask.cols())
      throw std::invalid_argument("MaskedPair: size mismatch");
    if (mask.count() == 0) throw std::invalid_argument("MaskedPair: empty mask");
  }
};

/// Median absolute difference over masked pixels. Even counts take the lower
/// median, so the result is always one of the observed errors.
inline double median_depth_error(const MaskedPair& p) {
  p.validate();
  std::vector<double> errs;
  errs.reserve(p.mask.count());
  for (int r = 0; r < p.reference.rows(); ++r)
    for (int c = 0; c < p.reference.cols(); ++c)
      if (p.mask(r, c)) errs.push_back(std::abs(p.reference(r, c) - p.candidate(r, c)));
  const size_t k = (errs.size() - 1) / 2;
  std::nth_element(errs.begin(), errs.begin() + k, errs.end());
  return errs[k];
}

/// Mean squared difference over masked pixels, on whatever scale the grids
/// carry (intensities use [0, 255]).
inline double intensity_mse(const MaskedPair& p) {
  p.validate();
  double acc = 0.0;
  size_t n = 0;
  for (int r = 0; r < p.reference.rows(); ++r)
    for (int c = 0; c < p.reference.cols(); ++c)
      if (p.mask(r, c)) {
        const double d = p.reference(r, c) - p.candidate(r, c);
        acc += d * d;
        ++n;
      }
  return acc / static_cast<double>(n);
}

struct MomentGap {
  double mean_gap = 0.0;  // Euclidean distance between empirical means
  double cov_gap = 0.0;   // Frobenius distance between empirical covariances
};

/// First- and second-moment distance between two 2D sample sets. Covariances
/// use the unbiased (n - 1) estimator.
inline MomentGap moment_match(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  if (a.size() < 100 || b.size() < 100)
    throw std::invalid_argument("moment_match: need at least 100 samples per set");
  auto stats = [](const std::vector<Vec>& s) {
    std::array<double, 2> mean = {0.0, 0.0};
    for (const Vec& p : s) {
      if (p.size() != 2) throw std::invalid_argument("moment_match: expected 2D points");
      mean[0] += p[0];
      mean[1] += p[1];
    }
    mean[0] /= s.size();
    mean[1] /= s.size();
    std::array<double, 3> cov = {0.0, 0.0, 0.0};  // xx, xy, yy
    for (const Vec& p : s) {
      const double dx = p[0] - mean[0], dy = p[1] - mean[1];
      cov[0] += dx * dx;
      cov[1] += dx * dy;
      cov[2] += dy * dy;
    }
    const double denom = static_cast<double>(s.size() - 1);
    for (double& c : cov) c /= denom;
    return std::make_pair(mean, cov);
  };
  const auto [ma, ca] = stats(a);
  const auto [mb, cb] = stats(b);
  MomentGap out;
  out.mean_gap = std::hypot(ma[0] - mb[0], ma[1] - mb[1]);
  const double dxx = ca[0] - cb[0], dxy = ca[1] - cb[1], dyy = ca[2] - cb[2];
  out.cov_gap = std::sqrt(dxx * dxx + 2.0 * dxy * dxy + dyy * dyy);
  return out;
}

}  // namespace rangediff
