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
#include "rangediff/pointcloud.hpp"

namespace rangediff {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
};

struct Vec2 {
  double x = 0.0, y = 0.0;
};

/// Oriented 3D box given by its 8 corners: bottom face c0..c3 walked around
/// the parallelogram, then top face c4..c7 with c4+i directly above ci.
/// Construction validates the parallelepiped structure (opposite faces
/// parallel) to 1e-6.
class Box3D {
 public:
  explicit Box3D(const std::array<Vec3, 8>& corners) : c_(corners) {
    for (const Vec3& c : c_)
      if (!std::isfinite(c.x) || !std::isfinite(c.y) || !std::isfinite(c.z))
        throw std::invalid_argument("Box3D: non-finite corner");
    const double tol = 1e-6;
    const Vec3 bottom_err = (c_[1] - c_[0]) - (c_[2] - c_[3]);
    if (bottom_err.norm() > tol)
      throw std::invalid_argument("Box3D: bottom face is not a parallelogram");
    const Vec3 up = c_[4] - c_[0];
    for (int i = 1; i < 4; ++i) {
      const Vec3 e = (c_[4 + i] - c_[i]) - up;
      if (e.norm() > tol)
        throw std::invalid_argument("Box3D: top face not parallel to the bottom face");
    }
  }

  /// Upright cuboid centred at `center` with extents (length along local x,
  /// width along local y, height along z), rotated by `yaw` about z.
  static Box3D from_center_size_yaw(const Vec3& center, double length, double width,
                                    double height, double yaw) {
    const double hl = length / 2.0, hw = width / 2.0, hh = height / 2.0;
    const double cy = std::cos(yaw), sy = std::sin(yaw);
    const std::array<Vec2, 4> local = {{{-hl, -hw}, {hl, -hw}, {hl, hw}, {-hl, hw}}};
    std::array<Vec3, 8> corners;
    for (int i = 0; i < 4; ++i) {
      const double rx = local[i].x * cy - local[i].y * sy;
      const double ry = local[i].x * sy + local[i].y * cy;
      corners[i] = {center.x + rx, center.y + ry, center.z - hh};
      corners[4 + i] = {center.x + rx, center.y + ry, center.z + hh};
    }
    return Box3D(corners);
  }

  const std::array<Vec3, 8>& corners() const { return c_; }
  const Vec3& corner(int i) const { return c_[i]; }

  Vec3 center() const {
    Vec3 s;
    for (const Vec3& c : c_) s = s + c;
    return s * (1.0 / 8.0);
  }

 private:
  std::array<Vec3, 8> c_;
};

/// True iff p lies inside the box's parallelepiped, faces inclusive. The
/// point is expressed in the box's edge basis (c1-c0, c3-c0, c4-c0) and
/// tested against the unit cube with a 1e-9 slack.
inline bool point_in_box(const Vec3& p, const Box3D& box) {
  const Vec3 o = box.corner(0);
  const Vec3 e1 = box.corner(1) - o;
  const Vec3 e2 = box.corner(3) - o;
  const Vec3 e3 = box.corner(4) - o;
  const double det = e1.dot(e2.cross(e3));
  const double scale = e1.norm() * e2.norm() * e3.norm();
  if (std::abs(det) <= 1e-12 * std::max(scale, 1.0))
    throw std::domain_error("point_in_box: degenerate box");
  const Vec3 d = p - o;
  // Cramer's rule on [e1 e2 e3] u = d.
  const double u = d.dot(e2.cross(e3)) / det;
  const double v = e1.dot(d.cross(e3)) / det;
  const double w = e1.dot(e2.cross(d)) / det;
  const double eps = 1e-9;
  return u >= -eps && u <= 1.0 + eps && v >= -eps && v <= 1.0 + eps && w >= -eps &&
         w <= 1.0 + eps;
}

/// Projective pinhole camera, a bare 3x4 row-major matrix mapping
/// homogeneous 3D points to pixel coordinates.
struct CameraModel {
  std::array<double, 12> m{};  // row-major 3x4

  static CameraModel identity() {
    CameraModel cam;
    cam.m = {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0};
    return cam;
  }

  /// Returns (u, v, w) before perspective division.
  std::array<double, 3> apply(const Vec3& p) const {
    std::array<double, 3> out{};
    const std::array<double, 4> h = {p.x, p.y, p.z, 1.0};
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 4; ++c) out[r] += m[r * 4 + c] * h[c];
    return out;
  }
};

struct ProjectedBoxCam {
  std::array<Vec2, 8> uv;
  std::array<bool, 8> behind{};  // non-positive projective depth
};

/// Perspective projection of the 8 corners. Corners with non-positive
/// projective depth are flagged; if every corner is behind the camera the
/// projection is meaningless and the call fails.
inline ProjectedBoxCam project_box_camera(const Box3D& box, const CameraModel& cam) {
  ProjectedBoxCam out;
  int n_behind = 0;
  for (int i = 0; i < 8; ++i) {
    const auto [u, v, w] = cam.apply(box.corner(i));
    if (w <= 0.0) {
      out.behind[i] = true;
      ++n_behind;
    }
    out.uv[i] = (w != 0.0) ? Vec2{u / w, v / w} : Vec2{0.0, 0.0};
  }
  if (n_behind == 8) throw std::domain_error("project_box_camera: all corners behind camera");
  return out;
}

struct ProjectedBoxRange {
  // Per corner: (row, col, depth). Row is the nearest-beam index; col comes
  // from the raw yaw formula without the grid clamp, so corners may land on
  // column W (yaw exactly +pi) and stay distinguishable for rasterisation.
  std::array<std::array<double, 3>, 8> rcd;
};

inline ProjectedBoxRange project_box_range(const Box3D& box, const BeamTable& table,
                                           int width) {
  ProjectedBoxRange out;
  for (int i = 0; i < 8; ++i) {
    const Vec3& c = box.corner(i);
    const SphericalCoords sc = spherical_coords(c.x, c.y, c.z);
    const double row = assign_beam(sc.pitch, table);
    const double col = std::floor(sc.yaw / M_PI * (width / 2.0) + width / 2.0);
    out.rcd[i] = {row, col, sc.depth};
  }
  return out;
}

namespace detail {

/// Monotone-chain convex hull, counter-clockwise. Collinear input returns a
/// hull with fewer than 3 vertices.
inline std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x < b.x || (a.x == b.x && a.y < b.y);
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }),
            pts.end());
  const size_t n = pts.size();
  if (n < 3) return pts;
  auto cross = [](const Vec2& o, const Vec2& a, const Vec2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
  };
  std::vector<Vec2> hull(2 * n);
  size_t k = 0;
  for (size_t i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  for (size_t i = n - 1, lo = k + 1; i-- > 0;) {
    while (k >= lo && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

inline bool point_in_convex_polygon(const std::vector<Vec2>& hull, double x, double y,
                                    double eps = 1e-9) {
  for (size_t i = 0; i < hull.size(); ++i) {
    const Vec2& a = hull[i];
    const Vec2& b = hull[(i + 1) % hull.size()];
    const double cross = (b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x);
    if (cross < -eps) return false;
  }
  return true;
}

}  // namespace detail

struct RasterizedMask {
  Mask mask;
  bool degenerate = false;  // all projected points collinear; mask is all zero
};

/// Fills the convex hull of the projected corners onto a grid. Pixel (r, c)
/// is set iff its sample point (x = c, y = r) lies inside the hull, boundary
/// inclusive. All-collinear projections yield a zero mask with the
/// degenerate flag raised.
inline RasterizedMask rasterize_mask_rect(const std::array<Vec2, 8>& pts, int rows, int cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("rasterize_mask: shape must be >= 1");
  RasterizedMask out;
  out.mask = Mask(rows, cols);
  const std::vector<Vec2> hull =
      detail::convex_hull(std::vector<Vec2>(pts.begin(), pts.end()));
  if (hull.size() < 3) {
    out.degenerate = true;
    return out;
  }
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (detail::point_in_convex_polygon(hull, static_cast<double>(c), static_cast<double>(r)))
        out.mask(r, c) = 1;
  return out;
}

inline RasterizedMask rasterize_mask(const std::array<Vec2, 8>& pts, int side) {
  return rasterize_mask_rect(pts, side, side);
}

inline RasterizedMask rasterize_mask(const ProjectedBoxCam& box, int side) {
  std::array<Vec2, 8> pts;
  for (int i = 0; i < 8; ++i) pts[i] = box.uv[i];
  return rasterize_mask(pts, side);
}

inline RasterizedMask rasterize_mask(const ProjectedBoxRange& box, int side) {
  std::array<Vec2, 8> pts;
  for (int i = 0; i < 8; ++i) pts[i] = Vec2{box.rcd[i][1], box.rcd[i][0]};  // (col, row)
  return rasterize_mask(pts, side);
}

/// Square crop in image space plus the scale that maps it to a D x D raster.
struct CameraViewport {
  double u0 = 0.0;  // crop origin, may be negative (padding)
  double v0 = 0.0;
  int side = 0;
  double scale = 1.0;  // D / side

  Vec2 apply(const Vec2& p) const { return {(p.x - u0) * scale, (p.y - v0) * scale}; }
  Vec2 invert(const Vec2& p) const { return {p.x / scale + u0, p.y / scale + v0}; }
};

struct CameraZoom {
  CameraViewport viewport;
  std::array<Vec2, 8> box;  // corners in crop coordinates
};

/// Square crop centred on the projected box, sized so the box's bounding
/// rectangle keeps at least `min_coverage` of the crop area, capped at the
/// image's larger dimension. Crops reaching outside the image are padded by
/// the caller when pixels are extracted.
inline CameraZoom zoom_viewport_camera(const ProjectedBoxCam& box, int image_h, int image_w,
                                       int side, double min_coverage = 0.2) {
  if (side < 1) throw std::invalid_argument("zoom_viewport_camera: side must be >= 1");
  if (!(min_coverage > 0.0 && min_coverage <= 1.0))
    throw std::invalid_argument("zoom_viewport_camera: min_coverage must lie in (0, 1]");
  double umin = box.uv[0].x, umax = box.uv[0].x;
  double vmin = box.uv[0].y, vmax = box.uv[0].y;
  for (const Vec2& p : box.uv) {
    umin = std::min(umin, p.x);
    umax = std::max(umax, p.x);
    vmin = std::min(vmin, p.y);
    vmax = std::max(vmax, p.y);
  }
  const double w = umax - umin, h = vmax - vmin;
  if (w <= 0.0 || h <= 0.0)
    throw std::domain_error("zoom_viewport_camera: box has empty 2D extent");
  const int contain = static_cast<int>(std::ceil(std::max(w, h)));
  const int cover = static_cast<int>(std::floor(std::sqrt(w * h / min_coverage)));
  int s = std::max(contain, std::min(cover, std::max(image_h, image_w)));
  s = std::max(s, 1);

  CameraZoom out;
  out.viewport.side = s;
  out.viewport.scale = static_cast<double>(side) / s;
  out.viewport.u0 = std::round((umin + umax) / 2.0 - s / 2.0);
  out.viewport.v0 = std::round((vmin + vmax) / 2.0 - s / 2.0);
  for (int i = 0; i < 8; ++i) out.box[i] = out.viewport.apply(box.uv[i]);
  return out;
}

/// Width-wise crop of the range view: all rows kept, columns cropped around
/// the box under the same coverage rule applied to width alone, then scaled
/// to D x D (rows by integer nearest-neighbour replication, columns by the
/// recorded ratio).
struct RangeViewport {
  int col0 = 0;
  int width = 0;        // columns in the crop
  double row_scale = 1.0;  // D / view rows (integer-valued)
  double col_scale = 1.0;  // D / width

  Vec2 apply_rc(double row, double col) const {
    return {(col - col0) * col_scale, row * row_scale};  // (x=col', y=row')
  }
  std::array<double, 2> invert_rc(double row_out, double col_out) const {
    return {row_out / row_scale, col_out / col_scale + col0};
  }
};

struct RangeZoom {
  RangeViewport viewport;
  std::array<std::array<double, 3>, 8> box;  // (row, col, depth) in crop coordinates
};

inline RangeZoom zoom_viewport_range(const ProjectedBoxRange& box, int view_rows, int view_w,
                                     int side, double min_coverage = 0.2) {
  if (side < 1 || side % view_rows != 0)
    throw std::invalid_argument("zoom_viewport_range: side must be a multiple of the row count");
  if (!(min_coverage > 0.0 && min_coverage <= 1.0))
    throw std::invalid_argument("zoom_viewport_range: min_coverage must lie in (0, 1]");
  double cmin = box.rcd[0][1], cmax = box.rcd[0][1];
  for (const auto& rcd : box.rcd) {
    cmin = std::min(cmin, rcd[1]);
    cmax = std::max(cmax, rcd[1]);
  }
  const double bw = cmax - cmin;
  if (bw <= 0.0) throw std::domain_error("zoom_viewport_range: box has empty column extent");
  const int contain = std::max(1, static_cast<int>(std::ceil(bw)));
  const int cover = static_cast<int>(std::floor(bw / min_coverage));
  int wc = std::max(contain, std::min(cover, view_w));
  wc = std::min(wc, view_w);

  RangeZoom out;
  out.viewport.width = wc;
  out.viewport.row_scale = static_cast<double>(side) / view_rows;
  out.viewport.col_scale = static_cast<double>(side) / wc;
  int col0 = static_cast<int>(std::round((cmin + cmax) / 2.0 - wc / 2.0));
  out.viewport.col0 = std::clamp(col0, 0, view_w - wc);
  for (int i = 0; i < 8; ++i) {
    const Vec2 p = out.viewport.apply_rc(box.rcd[i][0], box.rcd[i][1]);
    out.box[i] = {p.y, p.x, box.rcd[i][2]};  // keep (row, col, depth) layout
  }
  return out;
}

/// Resamples the cropped strip of a range-view channel to side x side:
/// rows by nearest-neighbour replication, columns by nearest sampling.
inline Grid range_crop_to_square(const Grid& channel, const RangeViewport& vp, int side) {
  Grid out(side, side);
  for (int r = 0; r < side; ++r) {
    const int sr = static_cast<int>(r / vp.row_scale);
    for (int c = 0; c < side; ++c) {
      const int sc = vp.col0 + static_cast<int>(c / vp.col_scale);
      out(r, c) = channel(sr, std::clamp(sc, 0, channel.cols() - 1));
    }
  }
  return out;
}

/// Default Fourier frequencies: omega_l = 2^l * pi for l in [0, count).
inline std::vector<double> default_fourier_frequencies(int count = 8) {
  std::vector<double> w(count);
  for (int l = 0; l < count; ++l) w[l] = std::ldexp(M_PI, l);
  return w;
}

/// Sinusoidal embedding of raw coordinates. Output order is coordinate-major,
/// frequency-minor, sin before cos, so the length is 2 * K * L.
inline std::vector<double> fourier_embed(const std::vector<double>& coords,
                                         const std::vector<double>& frequencies) {
  if (frequencies.empty()) throw std::invalid_argument("fourier_embed: need at least one frequency");
  std::vector<double> out;
  out.reserve(2 * coords.size() * frequencies.size());
  for (double x : coords) {
    for (double w : frequencies) {
      out.push_back(std::sin(w * x));
      out.push_back(std::cos(w * x));
    }
  }
  return out;
}

/// Flattens a projected box (8 x 3 rows of row/col/depth or u/v/depth) for
/// embedding, corner-major.
inline std::vector<double> box_coords(const ProjectedBoxRange& box) {
  std::vector<double> out;
  out.reserve(24);
  for (const auto& rcd : box.rcd) out.insert(out.end(), rcd.begin(), rcd.end());
  return out;
}

}  // namespace rangediff
