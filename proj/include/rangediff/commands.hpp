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
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "rangediff/box.hpp"
#include "rangediff/config.hpp"
#include "rangediff/core.hpp"
#include "rangediff/imageops.hpp"
#include "rangediff/io.hpp"
#include "rangediff/metrics.hpp"
#include "rangediff/normalize.hpp"
#include "rangediff/rangeview.hpp"
#include "rangediff/toy_data.hpp"

namespace rangediff {

namespace detail {

inline void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory: " + dir);
}

/// Yaw at the centre of a range-view column: the midpoint of the yaws that
/// floor onto it.
inline double column_center_yaw(int col, int width) {
  return (col + 0.5 - width / 2.0) * M_PI / (width / 2.0);
}

/// First hit of the ray t * dir (t > 0) against the box, via the slab method
/// in the box's edge basis. Returns t or a negative value on miss.
inline double ray_box_hit(const Vec3& dir, const Box3D& box) {
  const Vec3 o = box.corner(0);
  const Vec3 e1 = box.corner(1) - o;
  const Vec3 e2 = box.corner(3) - o;
  const Vec3 e3 = box.corner(4) - o;
  const double det = e1.dot(e2.cross(e3));
  if (std::abs(det) < 1e-12) return -1.0;
  // Express origin (-o) and direction in basis coordinates.
  const Vec3 r1 = e2.cross(e3), r2 = e3.cross(e1), r3 = e1.cross(e2);
  const Vec3 neg_o = Vec3{0, 0, 0} - o;
  const double ob[3] = {neg_o.dot(r1) / det, neg_o.dot(r2) / det, neg_o.dot(r3) / det};
  const double db[3] = {dir.dot(r1) / det, dir.dot(r2) / det, dir.dot(r3) / det};
  double t_enter = 0.0, t_exit = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (db[a] == 0.0) {
      if (ob[a] < 0.0 || ob[a] > 1.0) return -1.0;
      continue;
    }
    double t0 = (0.0 - ob[a]) / db[a];
    double t1 = (1.0 - ob[a]) / db[a];
    if (t0 > t1) std::swap(t0, t1);
    t_enter = std::max(t_enter, t0);
    t_exit = std::min(t_exit, t1);
  }
  if (t_enter > t_exit || t_enter <= 0.0) return -1.0;
  return t_enter;
}

}  // namespace detail

struct SynthSceneOptions {
  int object_points = 400;   // returns kept on the object surface (0 = background only)
  double sensor_height = 1.8;
  Vec3 box_center = {11.0, 2.0, -0.9};
  double box_length = 4.2;
  double box_width = 1.9;
  double box_height = 1.7;
  double box_yaw = 0.35;
};

/// Deterministic synthetic sweep: ground returns on the rings traced by the
/// downward beams plus raycast returns on one box-shaped object. Writes the
/// RDPC cloud and the box fixture CSV.
inline void cmd_synth_scene(const ExperimentConfig& config, const std::string& out_dir,
                            const SynthSceneOptions& opt = {}) {
  detail::ensure_dir(out_dir);
  const BeamTable table = BeamTable::nuscenes();
  const int width = kRangeViewWidth;
  const Box3D box = Box3D::from_center_size_yaw(opt.box_center, opt.box_length, opt.box_width,
                                                opt.box_height, opt.box_yaw);
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  PointCloud cloud;
  // Ground rings: beams that point down hit the plane z = -sensor_height.
  for (int k = 0; k < table.size(); ++k) {
    const double pitch = table.pitch(k);
    if (pitch >= -1e-3) continue;
    const double ring_radius = opt.sensor_height / std::tan(-pitch);
    const double depth = std::hypot(ring_radius, opt.sensor_height);
    if (depth < kMinDepth || depth > kMaxDepth) continue;
    for (int c = 0; c < width; c += 2) {
      const double yaw = detail::column_center_yaw(c, width);
      // Forward projection uses yaw = -atan2(y, x), so invert the sign here.
      const double gx = ring_radius * std::cos(yaw);
      const double gy = -ring_radius * std::sin(yaw);
      cloud.points.push_back({gx, gy, -opt.sensor_height, 20.0 + 10.0 * unit(rng)});
    }
  }
  // Object returns: raycast every view direction against the box, then keep
  // a deterministic subsample.
  std::vector<LidarPoint> hits;
  for (int k = 0; k < table.size(); ++k) {
    const double pitch = table.pitch(k);
    for (int c = 0; c < width; ++c) {
      const double yaw = detail::column_center_yaw(c, width);
      const double cp = std::cos(pitch);
      const Vec3 dir = {cp * std::cos(yaw), -cp * std::sin(yaw), std::sin(pitch)};
      const double t = detail::ray_box_hit(dir, box);
      if (t <= 0.0 || t < kMinDepth || t > kMaxDepth) continue;
      hits.push_back({t * dir.x, t * dir.y, t * dir.z, 180.0 + 40.0 * unit(rng)});
    }
  }
  if (opt.object_points < static_cast<int>(hits.size())) {
    // Even stride keeps the silhouette; deterministic.
    std::vector<LidarPoint> kept;
    if (opt.object_points > 0) {
      const double stride = static_cast<double>(hits.size()) / opt.object_points;
      for (int i = 0; i < opt.object_points; ++i)
        kept.push_back(hits[static_cast<size_t>(i * stride)]);
    }
    hits = std::move(kept);
  }
  cloud.points.insert(cloud.points.end(), hits.begin(), hits.end());

  io::write_pointcloud(cloud, out_dir + "/scene.rdpc");
  io::write_box_csv(box, out_dir + "/box.csv");
}

struct RoundtripReport {
  size_t input_points = 0;
  size_t in_range = 0;
  size_t retained = 0;
  size_t collisions = 0;
  double max_error = 0.0;
  double mean_error = 0.0;
};

/// Projects the cloud, reconstructs it, and reports retained-point counts and
/// per-coordinate errors against the winning input points.
inline RoundtripReport cmd_roundtrip(const std::string& cloud_path,
                                     const std::string& report_path) {
  const PointCloud cloud = io::read_pointcloud(cloud_path);
  const BeamTable table = BeamTable::nuscenes();
  const RangeView view = project(cloud, table);

  RoundtripReport rep;
  rep.input_points = cloud.points.size();
  rep.retained = view.occupancy.count();
  double err_sum = 0.0;
  size_t matched = 0;
  for (const LidarPoint& p : cloud.points) {
    const double d = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
    if (d < kMinDepth || d > kMaxDepth) continue;
    ++rep.in_range;
    const SphericalCoords sc = spherical_coords(p.x, p.y, p.z);
    const int row = assign_beam(sc.pitch, table);
    const int col = yaw_to_column(sc.yaw, view.cols());
    // The stored channels are bit-copies, so the winner is identifiable.
    if (!view.occupancy(row, col) || view.depth(row, col) != sc.depth ||
        view.pitch_raw(row, col) != sc.pitch || view.yaw_raw(row, col) != sc.yaw)
      continue;
    const LidarPoint q = reconstruct_pixel(view, row, col);
    const double err = std::max({std::abs(q.x - p.x), std::abs(q.y - p.y), std::abs(q.z - p.z)});
    rep.max_error = std::max(rep.max_error, err);
    err_sum += err;
    ++matched;
  }
  rep.collisions = rep.in_range - rep.retained;
  rep.mean_error = matched ? err_sum / matched : 0.0;

  std::ofstream os(report_path);
  if (!os) throw IoError("cannot open for writing: " + report_path);
  os << "input_points,in_range,retained,collisions,max_error,mean_error\n";
  os.precision(17);
  os << rep.input_points << "," << rep.in_range << "," << rep.retained << "," << rep.collisions
     << "," << rep.max_error << "," << rep.mean_error << "\n";
  return rep;
}

struct NormalizeCheckResult {
  struct Row {
    std::string name;
    size_t samples;
    double max_error;
    bool pass;
  };
  std::vector<Row> rows;
  bool all_pass = true;
};

/// Round-trip identity sweep over every normalisation map.
inline NormalizeCheckResult cmd_normalize_check(const ExperimentConfig& config,
                                                const std::string& report_path,
                                                size_t samples = 100000) {
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  NormalizeCheckResult res;
  auto add_row = [&](const std::string& name, size_t n, double max_err, double tol) {
    const bool pass = max_err < tol;
    res.rows.push_back({name, n, max_err, pass});
    res.all_pass = res.all_pass && pass;
  };

  {
    double max_err = 0.0;
    for (size_t i = 0; i < samples; ++i) {
      const double d = kMinDepth + unit(rng) * (kMaxDepth - kMinDepth);
      max_err = std::max(max_err, std::abs(depth_linear_denorm(depth_linear_norm(d)) - d));
    }
    add_row("depth_linear", samples, max_err, 1e-9);
  }
  for (double alpha : {0.3, 0.5, 0.7}) {
    double max_err = 0.0;
    for (size_t i = 0; i < samples; ++i) {
      DepthNormParams p;
      p.alpha = alpha;
      p.min_d = -1.0 + 1.8 * unit(rng);
      p.max_d = p.min_d + (1.0 - p.min_d) * (0.05 + 0.95 * unit(rng));
      const double d = -1.0 + 2.0 * unit(rng);
      max_err =
          std::max(max_err, std::abs(depth_object_denorm(depth_object_norm(d, p), p) - d));
    }
    add_row("depth_object_alpha_" + std::to_string(alpha).substr(0, 3), samples, max_err, 1e-9);
  }
  for (double lambda : {1.0, 4.0, 8.0}) {
    double max_err = 0.0;
    for (size_t i = 0; i < samples; ++i) {
      const double v = 255.0 * unit(rng);
      max_err =
          std::max(max_err, std::abs(intensity_denorm(intensity_norm(v, lambda), lambda) - v));
    }
    add_row("intensity_lambda_" + std::to_string(static_cast<int>(lambda)), samples, max_err,
            1e-9);
  }
  {
    std::uniform_real_distribution<double> val(-5.0, 5.0);
    bool exact = true;
    for (int factor : {2, 4, 16}) {
      Grid g(4, 6);
      for (double& v : g.values()) v = val(rng);
      exact = exact && (avg_pool_downscale(nn_upscale(g, factor), factor) == g);
    }
    add_row("upscale_pool_identity", 3, exact ? 0.0 : 1.0, 0.5);
  }
  (void)config;

  std::ofstream os(report_path);
  if (!os) throw IoError("cannot open for writing: " + report_path);
  os << "check,samples,max_error,pass\n";
  os.precision(17);
  for (const auto& row : res.rows)
    os << row.name << "," << row.samples << "," << row.max_error << ","
       << (row.pass ? "1" : "0") << "\n";
  return res;
}

/// Trains the toy denoiser per the config and writes checkpoint plus loss
/// curve.
inline TrainResult cmd_train_toy(const ExperimentConfig& config, const std::string& out_dir) {
  detail::ensure_dir(out_dir);
  const NoiseSchedule schedule = config.make_schedule();
  const DenoiserConfig dcfg = config.make_denoiser_config();
  const TrainConfig tcfg = config.make_train_config();

  std::function<std::pair<Vec, Grid>(std::mt19937_64&)> sampler;
  if (config.training.dataset == "ring") {
    RingDataset data(8, 3.0, 0.2, dcfg.d_tok);
    sampler = [data](std::mt19937_64& rng) { return data.sample(rng); };
  } else {
    TwoMoonsDataset data(0.1, dcfg.d_tok);
    sampler = [data](std::mt19937_64& rng) { return data.sample(rng); };
  }
  TrainResult result = train_denoiser(sampler, schedule, dcfg, tcfg);
  io::write_checkpoint(result.params, out_dir + "/checkpoint.rdcp");
  std::ofstream os(out_dir + "/loss.csv");
  if (!os) throw IoError("cannot open for writing: " + out_dir + "/loss.csv");
  os << "step,loss\n";
  os.precision(17);
  for (size_t i = 0; i < result.losses.size(); ++i) os << i << "," << result.losses[i] << "\n";
  return result;
}

struct SampleOptions {
  std::string sampler = "ddim";  // "ddpm" or "ddim"
  int steps = 50;                // ddim stride count
  double cfg_scale = 1.0;
  int count = 1000;
  bool conditional = false;
  double condition_angle = 0.0;  // token angle when conditional
  uint64_t seed = 0;
};

/// Draws samples from a trained checkpoint and writes them as x,y CSV rows.
inline std::vector<Vec> cmd_sample(const std::string& checkpoint_path,
                                   const ExperimentConfig& config, const SampleOptions& opt,
                                   const std::string& out_csv) {
  if (opt.sampler != "ddpm" && opt.sampler != "ddim")
    throw ConfigError("sample: sampler must be \"ddpm\" or \"ddim\"");
  if (opt.count < 0) throw ConfigError("sample: count must be >= 0");
  const DenoiserParams params = io::read_checkpoint(checkpoint_path);
  if (params.cfg.schedule_steps != config.schedule.steps)
    throw ConfigError("sample: checkpoint T=" + std::to_string(params.cfg.schedule_steps) +
                      " does not match config schedule.T=" +
                      std::to_string(config.schedule.steps));
  const NoiseSchedule schedule = config.make_schedule();
  Grid tokens;
  if (opt.conditional) {
    const std::vector<double> emb = fourier_embed(
        {opt.condition_angle}, default_fourier_frequencies(params.cfg.d_tok / 2));
    tokens = Grid(1, params.cfg.d_tok);
    for (int c = 0; c < params.cfg.d_tok; ++c) tokens(0, c) = emb[c];
  }
  std::mt19937_64 rng(opt.seed);
  std::vector<Vec> samples;
  samples.reserve(opt.count);
  for (int i = 0; i < opt.count; ++i) {
    if (opt.sampler == "ddpm")
      samples.push_back(
          generate_ddpm(params, schedule, tokens, opt.cfg_scale, rng, config.schedule.sigma_choice));
    else
      samples.push_back(generate_ddim(params, schedule, opt.steps, tokens, opt.cfg_scale, rng));
  }
  std::ofstream os(out_csv);
  if (!os) throw IoError("cannot open for writing: " + out_csv);
  os << "x,y\n";
  os.precision(17);
  for (const Vec& s : samples) os << s[0] << "," << s[1] << "\n";
  return samples;
}

struct CompositeDemoOptions {
  double shrink = 0.85;     // scale of the object about the box centre
  double yaw_delta = 0.15;  // extra rotation about the box centre
};

/// Builds an edited view by moving the object's points inside its box (shrink
/// plus rotation about the box centre), composites it into the original
/// sweep, and emits before/after depth and intensity figures. The identity
/// edit (shrink 1, rotation 0) leaves the view byte-identical.
inline RangeView cmd_composite_demo(const std::string& scene_path, const std::string& box_path,
                                    const std::string& out_dir,
                                    const CompositeDemoOptions& opt = {}) {
  detail::ensure_dir(out_dir);
  const PointCloud cloud = io::read_pointcloud(scene_path);
  const Box3D box = io::read_box_csv(box_path);
  const BeamTable table = BeamTable::nuscenes();
  const RangeView original = project(cloud, table);
  const Mask m_points = object_pixel_mask(original, box);

  RangeView edited = original;
  const bool identity = opt.shrink == 1.0 && opt.yaw_delta == 0.0;
  if (!identity && m_points.count() > 0) {
    // Pull the object's returns out, transform them about the box centre,
    // and reproject them over the cleared background.
    PointCloud moved;
    const Vec3 center = box.center();
    const double cy = std::cos(opt.yaw_delta), sy = std::sin(opt.yaw_delta);
    for (int r = 0; r < original.rows(); ++r)
      for (int c = 0; c < original.cols(); ++c) {
        if (!m_points(r, c)) continue;
        const LidarPoint p = reconstruct_pixel(original, r, c);
        const double dx = (p.x - center.x) * opt.shrink;
        const double dy = (p.y - center.y) * opt.shrink;
        const double dz = (p.z - center.z) * opt.shrink;
        moved.points.push_back(
            {center.x + dx * cy - dy * sy, center.y + dx * sy + dy * cy, center.z + dz,
             p.intensity});
        edited.depth(r, c) = 0.0;
        edited.intensity(r, c) = 0.0;
        edited.pitch_raw(r, c) = 0.0;
        edited.yaw_raw(r, c) = 0.0;
        edited.occupancy(r, c) = 0;
      }
    const RangeView moved_view = project(moved, table);
    for (int r = 0; r < edited.rows(); ++r)
      for (int c = 0; c < edited.cols(); ++c) {
        if (!moved_view.occupancy(r, c)) continue;
        if (edited.occupancy(r, c) && edited.depth(r, c) <= moved_view.depth(r, c)) continue;
        edited.depth(r, c) = moved_view.depth(r, c);
        edited.intensity(r, c) = moved_view.intensity(r, c);
        edited.pitch_raw(r, c) = moved_view.pitch_raw(r, c);
        edited.yaw_raw(r, c) = moved_view.yaw_raw(r, c);
        edited.occupancy(r, c) = 1;
      }
  }

  const RangeView composited = range_composite(original, edited, box, m_points);

  io::write_rangeview(composited, out_dir + "/composited.rdrv");
  io::write_pgm(original.depth, out_dir + "/before_depth.pgm", 0.0, kMaxDepth);
  io::write_pgm(original.intensity, out_dir + "/before_intensity.pgm", 0.0, 255.0);
  io::write_pgm(composited.depth, out_dir + "/after_depth.pgm", 0.0, kMaxDepth);
  io::write_pgm(composited.intensity, out_dir + "/after_intensity.pgm", 0.0, 255.0);
  return composited;
}

struct MetricsReport {
  double object_median_depth = 0.0;
  double object_intensity_mse = 0.0;
  double mask_median_depth = 0.0;
  double mask_intensity_mse = 0.0;
};

/// Reconstruction metrics between two range views over the object-point mask
/// and the rasterised edit mask of the box.
inline MetricsReport cmd_metrics(const std::string& reference_path,
                                 const std::string& candidate_path, const std::string& box_path,
                                 const std::string& out_csv) {
  const RangeView reference = io::read_rangeview(reference_path);
  const RangeView candidate = io::read_rangeview(candidate_path);
  if (reference.rows() != candidate.rows() || reference.cols() != candidate.cols())
    throw std::invalid_argument("metrics: view sizes differ");
  const Box3D box = io::read_box_csv(box_path);
  const BeamTable table = BeamTable::nuscenes();

  const Mask object_mask = object_pixel_mask(reference, box);
  const ProjectedBoxRange proj = project_box_range(box, table, reference.cols());
  std::array<Vec2, 8> pts;
  for (int i = 0; i < 8; ++i) pts[i] = Vec2{proj.rcd[i][1], proj.rcd[i][0]};
  const Mask edit_mask = rasterize_mask_rect(pts, reference.rows(), reference.cols()).mask;

  MetricsReport rep;
  rep.object_median_depth =
      median_depth_error({reference.depth, candidate.depth, object_mask});
  rep.object_intensity_mse =
      intensity_mse({reference.intensity, candidate.intensity, object_mask});
  rep.mask_median_depth = median_depth_error({reference.depth, candidate.depth, edit_mask});
  rep.mask_intensity_mse = intensity_mse({reference.intensity, candidate.intensity, edit_mask});

  std::ofstream os(out_csv);
  if (!os) throw IoError("cannot open for writing: " + out_csv);
  os << "mask,median_depth_error,intensity_mse\n";
  os.precision(17);
  os << "object," << rep.object_median_depth << "," << rep.object_intensity_mse << "\n";
  os << "edit," << rep.mask_median_depth << "," << rep.mask_intensity_mse << "\n";
  return rep;
}

/// Dumps the schedule tables as CSV.
inline void cmd_schedule_dump(const ExperimentConfig& config, const std::string& out_csv) {
  const NoiseSchedule s = config.make_schedule();
  std::ofstream os(out_csv);
  if (!os) throw IoError("cannot open for writing: " + out_csv);
  os << "t,beta,alpha,alpha_bar,beta_tilde\n";
  os.precision(17);
  for (int t = 1; t <= s.steps(); ++t)
    os << t << "," << s.beta(t) << "," << s.alpha(t) << "," << s.alpha_bar(t) << ","
       << s.beta_tilde(t) << "\n";
}

}  // namespace rangediff
