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

#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rangediff/box.hpp"
#include "rangediff/core.hpp"
#include "rangediff/denoiser.hpp"
#include "rangediff/pointcloud.hpp"
#include "rangediff/rangeview.hpp"

namespace rangediff {
namespace io {

// All binary formats are little-endian with explicit byte order, so files
// are portable across hosts.

inline void put_u32(std::ostream& os, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_u64(std::ostream& os, uint64_t v) {
  put_u32(os, static_cast<uint32_t>(v));
  put_u32(os, static_cast<uint32_t>(v >> 32));
}

inline void put_f32(std::ostream& os, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(os, bits);
}

inline void put_f64(std::ostream& os, double v) {
  uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(os, bits);
}

inline uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw IoError("unexpected end of file");
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

inline uint64_t get_u64(std::istream& is) {
  const uint64_t lo = get_u32(is);
  const uint64_t hi = get_u32(is);
  return lo | (hi << 32);
}

inline float get_f32(std::istream& is) {
  const uint32_t bits = get_u32(is);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

inline double get_f64(std::istream& is) {
  const uint64_t bits = get_u64(is);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

inline void put_magic(std::ostream& os, const char magic[5]) { os.write(magic, 4); }

inline void expect_magic(std::istream& is, const char magic[5], const std::string& what) {
  char buf[4];
  is.read(buf, 4);
  if (!is || std::memcmp(buf, magic, 4) != 0)
    throw IoError(what + ": bad magic, not a " + magic + " file");
}

inline std::ofstream open_out(const std::string& path, std::ios::openmode mode = {}) {
  std::ofstream os(path, std::ios::binary | mode);
  if (!os) throw IoError("cannot open for writing: " + path);
  return os;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open for reading: " + path);
  return is;
}

// ---------------------------------------------------------------------------
// Point clouds: "RDPC" v1 = header {magic, u32 version, u64 count} followed
// by count records of 4 float32 (x, y, z, intensity).

inline void write_pointcloud(const PointCloud& cloud, const std::string& path) {
  std::ofstream os = open_out(path);
  put_magic(os, "RDPC");
  put_u32(os, 1);
  put_u64(os, cloud.points.size());
  for (const LidarPoint& p : cloud.points) {
    put_f32(os, static_cast<float>(p.x));
    put_f32(os, static_cast<float>(p.y));
    put_f32(os, static_cast<float>(p.z));
    put_f32(os, static_cast<float>(p.intensity));
  }
  if (!os) throw IoError("write failed: " + path);
}

inline PointCloud read_pointcloud(const std::string& path) {
  std::ifstream is = open_in(path);
  expect_magic(is, "RDPC", path);
  const uint32_t version = get_u32(is);
  if (version != 1) throw IoError(path + ": unsupported RDPC version");
  const uint64_t count = get_u64(is);
  PointCloud cloud;
  cloud.points.reserve(count);
  for (uint64_t i = 0; i < count; ++i) {
    LidarPoint p;
    p.x = get_f32(is);
    p.y = get_f32(is);
    p.z = get_f32(is);
    p.intensity = get_f32(is);
    cloud.points.push_back(p);
  }
  return cloud;
}

/// Hand-authored fixtures: one "x,y,z,intensity" per line; blank lines and
/// lines starting with '#' are skipped.
inline PointCloud read_pointcloud_csv(const std::string& path) {
  std::ifstream is = open_in(path);
  PointCloud cloud;
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    LidarPoint p;
    char comma;
    if (!(ss >> p.x >> comma >> p.y >> comma >> p.z >> comma >> p.intensity))
      throw IoError(path + ":" + std::to_string(lineno) + ": expected x,y,z,intensity");
    cloud.points.push_back(p);
  }
  return cloud;
}

// ---------------------------------------------------------------------------
// Range views: "RDRV" v1 = header {magic, u32 version, u32 H, u32 W}, then
// planar float32 channels depth, intensity, pitch_raw, yaw_raw, then H*W
// occupancy bytes.

inline void write_rangeview(const RangeView& view, const std::string& path) {
  std::ofstream os = open_out(path);
  put_magic(os, "RDRV");
  put_u32(os, 1);
  put_u32(os, static_cast<uint32_t>(view.rows()));
  put_u32(os, static_cast<uint32_t>(view.cols()));
  for (const Grid* g : {&view.depth, &view.intensity, &view.pitch_raw, &view.yaw_raw})
    for (double v : g->values()) put_f32(os, static_cast<float>(v));
  os.write(reinterpret_cast<const char*>(view.occupancy.values().data()),
           static_cast<std::streamsize>(view.occupancy.size()));
  if (!os) throw IoError("write failed: " + path);
}

inline RangeView read_rangeview(const std::string& path) {
  std::ifstream is = open_in(path);
  expect_magic(is, "RDRV", path);
  const uint32_t version = get_u32(is);
  if (version != 1) throw IoError(path + ": unsupported RDRV version");
  const uint32_t rows = get_u32(is);
  const uint32_t cols = get_u32(is);
  RangeView view(static_cast<int>(rows), static_cast<int>(cols));
  for (Grid* g : {&view.depth, &view.intensity, &view.pitch_raw, &view.yaw_raw})
    for (double& v : g->values()) v = get_f32(is);
  is.read(reinterpret_cast<char*>(view.occupancy.values().data()),
          static_cast<std::streamsize>(view.occupancy.size()));
  if (!is) throw IoError(path + ": truncated occupancy plane");
  return view;
}

// ---------------------------------------------------------------------------
// Geometry fixtures as CSV.

namespace detail {

inline std::vector<std::vector<double>> read_csv_rows(const std::string& path, size_t rows,
                                                      size_t cols) {
  std::ifstream is = open_in(path);
  std::vector<std::vector<double>> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::vector<double> row;
    double v;
    char comma;
    while (ss >> v) {
      row.push_back(v);
      ss >> comma;
    }
    if (row.size() != cols)
      throw IoError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(cols) +
                    " values");
    out.push_back(std::move(row));
  }
  if (out.size() != rows)
    throw IoError(path + ": expected " + std::to_string(rows) + " rows, found " +
                  std::to_string(out.size()));
  return out;
}

}  // namespace detail

/// 8 corner rows of x,y,z in meters.
inline Box3D read_box_csv(const std::string& path) {
  const auto rows = detail::read_csv_rows(path, 8, 3);
  std::array<Vec3, 8> corners;
  for (int i = 0; i < 8; ++i) corners[i] = {rows[i][0], rows[i][1], rows[i][2]};
  return Box3D(corners);
}

inline void write_box_csv(const Box3D& box, const std::string& path) {
  std::ofstream os = open_out(path);
  os.precision(17);
  for (const Vec3& c : box.corners()) os << c.x << "," << c.y << "," << c.z << "\n";
  if (!os) throw IoError("write failed: " + path);
}

/// 3 rows of 4 projective-matrix entries.
inline CameraModel read_camera_csv(const std::string& path) {
  const auto rows = detail::read_csv_rows(path, 3, 4);
  CameraModel cam;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) cam.m[r * 4 + c] = rows[r][c];
  return cam;
}

// ---------------------------------------------------------------------------
// Figures: binary portable graymap (P5), maxval 255.

inline void write_pgm(const Grid& img, const std::string& path, double lo = 0.0,
                      double hi = 1.0) {
  if (!(hi > lo)) throw std::invalid_argument("write_pgm: need hi > lo");
  std::ofstream os = open_out(path);
  os << "P5\n" << img.cols() << " " << img.rows() << "\n255\n";
  for (double v : img.values()) {
    const double t = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
    const unsigned char byte = static_cast<unsigned char>(std::lround(t * 255.0));
    os.write(reinterpret_cast<const char*>(&byte), 1);
  }
  if (!os) throw IoError("write failed: " + path);
}

inline Grid read_pgm(const std::string& path) {
  std::ifstream is = open_in(path);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  is >> magic >> w >> h >> maxval;
  if (magic != "P5" || w < 1 || h < 1 || maxval != 255)
    throw IoError(path + ": expected a P5 graymap with maxval 255");
  is.get();  // single whitespace after the header
  Grid img(h, w);
  for (double& v : img.values()) {
    const int byte = is.get();
    if (byte == EOF) throw IoError(path + ": truncated pixel data");
    v = byte / 255.0;
  }
  return img;
}

// ---------------------------------------------------------------------------
// Denoiser checkpoints: "RDCP" v1 = header {magic, u32 version}, the
// architecture (u32 data_dim, embed_dim, d_h, d_tok, schedule T, hidden layer
// count, hidden sizes), then every tensor as float64 in declaration order.

inline void write_checkpoint(const DenoiserParams& params, const std::string& path) {
  std::ofstream os = open_out(path);
  put_magic(os, "RDCP");
  put_u32(os, 1);
  const DenoiserConfig& c = params.cfg;
  put_u32(os, static_cast<uint32_t>(c.data_dim));
  put_u32(os, static_cast<uint32_t>(c.embed_dim));
  put_u32(os, static_cast<uint32_t>(c.d_h));
  put_u32(os, static_cast<uint32_t>(c.d_tok));
  put_u32(os, static_cast<uint32_t>(c.schedule_steps));
  put_u32(os, static_cast<uint32_t>(c.hidden.size()));
  for (int hsz : c.hidden) put_u32(os, static_cast<uint32_t>(hsz));
  visit_tensors(params, [&](const std::vector<double>& t) {
    for (double v : t) put_f64(os, v);
  });
  if (!os) throw IoError("write failed: " + path);
}

inline DenoiserParams read_checkpoint(const std::string& path) {
  std::ifstream is = open_in(path);
  expect_magic(is, "RDCP", path);
  const uint32_t version = get_u32(is);
  if (version != 1) throw IoError(path + ": unsupported RDCP version");
  DenoiserConfig cfg;
  cfg.data_dim = static_cast<int>(get_u32(is));
  cfg.embed_dim = static_cast<int>(get_u32(is));
  cfg.d_h = static_cast<int>(get_u32(is));
  cfg.d_tok = static_cast<int>(get_u32(is));
  cfg.schedule_steps = static_cast<int>(get_u32(is));
  const uint32_t n_hidden = get_u32(is);
  cfg.hidden.clear();
  for (uint32_t i = 0; i < n_hidden; ++i) cfg.hidden.push_back(static_cast<int>(get_u32(is)));
  cfg.validate();
  std::mt19937_64 rng(0);
  DenoiserParams params = init_denoiser(cfg, rng);
  visit_tensors(params, [&](std::vector<double>& t) {
    for (double& v : t) v = get_f64(is);
  });
  if (!is) throw IoError(path + ": truncated tensor data");
  return params;
}

}  // namespace io
}  // namespace rangediff
