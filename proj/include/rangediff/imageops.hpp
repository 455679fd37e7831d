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
#include <cmath>
#include <stdexcept>

#include "rangediff/box.hpp"
#include "rangediff/core.hpp"
#include "rangediff/rangeview.hpp"

namespace rangediff {

/// Chebyshev-ball erosion: a pixel survives iff every pixel within the given
/// radius is set; pixels beyond the border count as unset.
inline Mask erode(const Mask& mask, int radius) {
  if (radius < 0) throw std::invalid_argument("erode: radius must be >= 0");
  if (radius == 0) return mask;
  Mask out(mask.rows(), mask.cols());
  for (int r = 0; r < mask.rows(); ++r) {
    for (int c = 0; c < mask.cols(); ++c) {
      bool keep = true;
      for (int dr = -radius; keep && dr <= radius; ++dr) {
        for (int dc = -radius; dc <= radius; ++dc) {
          const int rr = r + dr, cc = c + dc;
          if (rr < 0 || rr >= mask.rows() || cc < 0 || cc >= mask.cols() || !mask(rr, cc)) {
            keep = false;
            break;
          }
        }
      }
      out(r, c) = keep ? 1 : 0;
    }
  }
  return out;
}

namespace detail {

/// 3x3 convolution with edge replication.
inline Grid conv3x3_replicate(const Grid& img, const double kernel[3][3]) {
  Grid out(img.rows(), img.cols());
  for (int r = 0; r < img.rows(); ++r) {
    for (int c = 0; c < img.cols(); ++c) {
      double acc = 0.0;
      for (int i = -1; i <= 1; ++i)
        for (int j = -1; j <= 1; ++j) {
          const int rr = std::clamp(r + i, 0, img.rows() - 1);
          const int cc = std::clamp(c + j, 0, img.cols() - 1);
          acc += kernel[i + 1][j + 1] * img(rr, cc);
        }
      out(r, c) = acc;
    }
  }
  return out;
}

inline constexpr double kSobelH[3][3] = {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}};
inline constexpr double kSobelV[3][3] = {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}};

}  // namespace detail

/// High-frequency map: the summed horizontal and vertical Sobel responses,
/// multiplied elementwise by the image and by the eroded edit mask, clamped
/// back to [0, 1]. Borders replicate edge pixels.
inline Grid sobel_hf_map(const Grid& img, const Mask& mask, int erode_radius) {
  if (img.rows() != mask.rows() || img.cols() != mask.cols())
    throw std::invalid_argument("sobel_hf_map: image and mask sizes differ");
  const Grid gh = detail::conv3x3_replicate(img, detail::kSobelH);
  const Grid gv = detail::conv3x3_replicate(img, detail::kSobelV);
  const Mask eroded = erode(mask, erode_radius);
  Grid out(img.rows(), img.cols());
  for (int r = 0; r < img.rows(); ++r)
    for (int c = 0; c < img.cols(); ++c) {
      const double v = (gh(r, c) + gv(r, c)) * img(r, c) * (eroded(r, c) ? 1.0 : 0.0);
      out(r, c) = std::clamp(v, 0.0, 1.0);
    }
  return out;
}

/// Soft patch blend: the mask is blurred with a normalised Gaussian of the
/// given standard deviation (truncated at 3 sigma) to form a weight map, and
/// the output is the per-pixel convex combination weight*src + (1-weight)*dst.
/// sigma = 0 degenerates to a hard composite.
inline Grid feather_composite(const Grid& dst, const Grid& src, const Mask& mask, double sigma) {
  if (!dst.same_shape(src) || dst.rows() != mask.rows() || dst.cols() != mask.cols())
    throw std::invalid_argument("feather_composite: size mismatch");
  if (sigma < 0.0) throw std::invalid_argument("feather_composite: sigma must be >= 0");
  Grid weight(dst.rows(), dst.cols());
  if (sigma == 0.0) {
    for (int r = 0; r < dst.rows(); ++r)
      for (int c = 0; c < dst.cols(); ++c) weight(r, c) = mask(r, c) ? 1.0 : 0.0;
  } else {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
      k[i + radius] = std::exp(-0.5 * (i * i) / (sigma * sigma));
      sum += k[i + radius];
    }
    for (double& v : k) v /= sum;
    // Separable blur of the 0/1 mask; outside the grid the mask is 0.
    Grid tmp(dst.rows(), dst.cols());
    for (int r = 0; r < dst.rows(); ++r)
      for (int c = 0; c < dst.cols(); ++c) {
        double acc = 0.0;
        for (int j = -radius; j <= radius; ++j) {
          const int cc = c + j;
          if (cc >= 0 && cc < dst.cols() && mask(r, cc)) acc += k[j + radius];
        }
        tmp(r, c) = acc;
      }
    for (int r = 0; r < dst.rows(); ++r)
      for (int c = 0; c < dst.cols(); ++c) {
        double acc = 0.0;
        for (int i = -radius; i <= radius; ++i) {
          const int rr = r + i;
          if (rr >= 0 && rr < dst.rows()) acc += k[i + radius] * tmp(rr, c);
        }
        weight(r, c) = std::clamp(acc, 0.0, 1.0);
      }
  }
  Grid out(dst.rows(), dst.cols());
  for (int r = 0; r < dst.rows(); ++r)
    for (int c = 0; c < dst.cols(); ++c) {
      const double w = weight(r, c);
      out(r, c) = w * src(r, c) + (1.0 - w) * dst(r, c);
    }
  return out;
}

/// Pixels of `view` whose reconstructed 3D points fall inside the box.
/// Unoccupied pixels are never selected.
inline Mask object_pixel_mask(const RangeView& view, const Box3D& box) {
  Mask out(view.rows(), view.cols());
  for (int r = 0; r < view.rows(); ++r)
    for (int c = 0; c < view.cols(); ++c) {
      if (!view.occupancy(r, c)) continue;
      const LidarPoint p = reconstruct_pixel(view, r, c);
      if (point_in_box({p.x, p.y, p.z}, box)) out(r, c) = 1;
    }
  return out;
}

/// Writes edited range pixels back into the original sweep. A pixel takes
/// the edited content iff (i) it belongs to m_points, the original pixels
/// whose 3D points lie inside the box, or (ii) the edited pixel's own
/// reconstructed point lies inside the box. All channels and occupancy
/// follow the chosen side.
inline RangeView range_composite(const RangeView& original, const RangeView& edited,
                                 const Box3D& box, const Mask& m_points) {
  if (original.rows() != edited.rows() || original.cols() != edited.cols() ||
      original.rows() != m_points.rows() || original.cols() != m_points.cols())
    throw std::invalid_argument("range_composite: size mismatch");
  RangeView out = original;
  for (int r = 0; r < original.rows(); ++r)
    for (int c = 0; c < original.cols(); ++c) {
      bool replace = m_points(r, c) != 0;
      if (!replace && edited.occupancy(r, c)) {
        const LidarPoint p = reconstruct_pixel(edited, r, c);
        replace = point_in_box({p.x, p.y, p.z}, box);
      }
      if (!replace) continue;
      out.depth(r, c) = edited.depth(r, c);
      out.intensity(r, c) = edited.intensity(r, c);
      out.pitch_raw(r, c) = edited.pitch_raw(r, c);
      out.yaw_raw(r, c) = edited.yaw_raw(r, c);
      out.occupancy(r, c) = edited.occupancy(r, c);
    }
  return out;
}

}  // namespace rangediff
