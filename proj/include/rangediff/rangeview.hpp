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

#include "rangediff/core.hpp"
#include "rangediff/pointcloud.hpp"

namespace rangediff {

// Depth acceptance window for lidar returns, inclusive on both ends.
inline constexpr double kMinDepth = 1.4;
inline constexpr double kMaxDepth = 54.0;

/// Default horizontal resolution of the cylindrical view.
inline constexpr int kRangeViewWidth = 1096;

/// Cylindrical raster of a lidar sweep. Rows index beam pitch, columns index
/// yaw. Besides depth and intensity, the unrasterised per-pixel pitch and yaw
/// are kept so the inverse transform is exact. Unoccupied pixels carry the
/// 0.0 sentinel in every channel; occupancy is the source of truth.
struct RangeView {
  Grid depth;
  Grid intensity;
  Grid pitch_raw;
  Grid yaw_raw;
  Mask occupancy;

  RangeView() = default;
  RangeView(int rows, int cols)
      : depth(rows, cols),
        intensity(rows, cols),
        pitch_raw(rows, cols),
        yaw_raw(rows, cols),
        occupancy(rows, cols) {}

  int rows() const { return depth.rows(); }
  int cols() const { return depth.cols(); }

  friend bool operator==(const RangeView& a, const RangeView& b) {
    return a.depth == b.depth && a.intensity == b.intensity && a.pitch_raw == b.pitch_raw &&
           a.yaw_raw == b.yaw_raw && a.occupancy == b.occupancy;
  }
};

/// Projects a point cloud onto the cylindrical grid. Points with depth
/// outside [kMinDepth, kMaxDepth] are dropped. When several points land in
/// the same pixel, the nearest depth wins; equal depths keep the earlier
/// point, so the result is deterministic in input order.
inline RangeView project(const PointCloud& cloud, const BeamTable& table,
                         int width = kRangeViewWidth) {
  RangeView view(table.size(), width);
  for (const LidarPoint& p : cloud.points) {
    const double d = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
    if (d < kMinDepth || d > kMaxDepth) continue;
    const SphericalCoords sc = spherical_coords(p.x, p.y, p.z);
    const int row = assign_beam(sc.pitch, table);
    const int col = yaw_to_column(sc.yaw, width);
    if (view.occupancy(row, col) && view.depth(row, col) <= sc.depth) continue;
    view.depth(row, col) = sc.depth;
    view.intensity(row, col) = p.intensity;
    view.pitch_raw(row, col) = sc.pitch;
    view.yaw_raw(row, col) = sc.yaw;
    view.occupancy(row, col) = 1;
  }
  return view;
}

/// Inverse of project. Each occupied pixel emits one point rebuilt from the
/// stored depth and unrasterised angles:
///   x = d cos(yaw) cos(pitch), y = -d sin(yaw) cos(pitch), z = d sin(pitch).
inline PointCloud reconstruct(const RangeView& view) {
  PointCloud cloud;
  cloud.points.reserve(view.occupancy.count());
  for (int r = 0; r < view.rows(); ++r) {
    for (int c = 0; c < view.cols(); ++c) {
      if (!view.occupancy(r, c)) continue;
      const double d = view.depth(r, c);
      const double yaw = view.yaw_raw(r, c);
      const double pitch = view.pitch_raw(r, c);
      const double cp = std::cos(pitch);
      cloud.points.push_back({d * std::cos(yaw) * cp, -d * std::sin(yaw) * cp,
                              d * std::sin(pitch), view.intensity(r, c)});
    }
  }
  return cloud;
}

/// Rebuilds a single pixel's 3D point. Precondition: the pixel is occupied.
inline LidarPoint reconstruct_pixel(const RangeView& view, int r, int c) {
  const double d = view.depth(r, c);
  const double yaw = view.yaw_raw(r, c);
  const double pitch = view.pitch_raw(r, c);
  const double cp = std::cos(pitch);
  return {d * std::cos(yaw) * cp, -d * std::sin(yaw) * cp, d * std::sin(pitch),
          view.intensity(r, c)};
}

}  // namespace rangediff
