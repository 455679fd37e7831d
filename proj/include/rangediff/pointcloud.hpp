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
#include <vector>

#include "rangediff/core.hpp"

namespace rangediff {

/// One lidar return: cartesian position in meters plus reflected intensity
/// on the sensor's [0, 255] scale.
struct LidarPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double intensity = 0.0;
};

struct PointCloud {
  std::vector<LidarPoint> points;

  size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Throws std::invalid_argument if any coordinate is non-finite or any
/// intensity lies outside [0, 255].
inline void validate(const PointCloud& cloud) {
  for (const LidarPoint& p : cloud.points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z) ||
        !std::isfinite(p.intensity))
      throw std::invalid_argument("PointCloud: non-finite value");
    if (p.intensity < 0.0 || p.intensity > 255.0)
      throw std::invalid_argument("PointCloud: intensity outside [0, 255]");
  }
}

/// Fixed set of vertical beam pitch angles, ascending.
class BeamTable {
 public:
  explicit BeamTable(std::vector<double> pitches) : pitches_(std::move(pitches)) {
    if (pitches_.empty()) throw std::invalid_argument("BeamTable: empty");
    for (size_t i = 1; i < pitches_.size(); ++i)
      if (!(pitches_[i - 1] < pitches_[i]))
        throw std::invalid_argument("BeamTable: pitches must be strictly increasing");
  }

  /// The 32-beam table matching the nuScenes sensor binning:
  /// pitch_k = 0.0232 * k for k in {-23, ..., 8}.
  static BeamTable nuscenes() {
    std::vector<double> pitches;
    pitches.reserve(32);
    for (int k = -23; k <= 8; ++k) pitches.push_back(0.0232 * k);
    return BeamTable(std::move(pitches));
  }

  int size() const { return static_cast<int>(pitches_.size()); }
  double pitch(int k) const { return pitches_[k]; }
  const std::vector<double>& pitches() const { return pitches_; }

 private:
  std::vector<double> pitches_;
};

struct SphericalCoords {
  double depth;  // meters
  double yaw;    // radians, in [-pi, pi]
  double pitch;  // radians
};

/// depth = |p|, yaw = -atan2(y, x), pitch = asin(z / depth).
/// Throws std::domain_error at depth zero where pitch is undefined.
inline SphericalCoords spherical_coords(double x, double y, double z) {
  const double depth = std::sqrt(x * x + y * y + z * z);
  if (depth == 0.0) throw std::domain_error("spherical_coords: zero depth");
  // Guard asin against |z/depth| drifting a ulp above 1.
  const double s = std::clamp(z / depth, -1.0, 1.0);
  return {depth, -std::atan2(y, x), std::asin(s)};
}

/// Index of the beam closest in pitch; equidistant pitches resolve to the
/// lower index.
inline int assign_beam(double pitch, const BeamTable& table) {
  const std::vector<double>& t = table.pitches();
  auto it = std::lower_bound(t.begin(), t.end(), pitch);
  if (it == t.begin()) return 0;
  if (it == t.end()) return static_cast<int>(t.size()) - 1;
  const int hi = static_cast<int>(it - t.begin());
  const int lo = hi - 1;
  return (pitch - t[lo] <= t[hi] - pitch) ? lo : hi;
}

/// floor(yaw / pi * W/2 + W/2), clamped into [0, W-1]. The clamp folds the
/// single value yaw = +pi onto the last column instead of column W.
inline int yaw_to_column(double yaw, int width) {
  const int col = static_cast<int>(std::floor(yaw / M_PI * (width / 2.0) + width / 2.0));
  return std::clamp(col, 0, width - 1);
}

}  // namespace rangediff
