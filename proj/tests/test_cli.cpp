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

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "rangediff/commands.hpp"

using namespace rangediff;

namespace {

std::filesystem::path tmp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "rangediff_cli_tests" / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  REQUIRE(is);
  return std::string((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RANGEDIFF_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("synthetic scenes are deterministic and box-consistent") {
  const auto dir = tmp_dir("synth");
  ExperimentConfig cfg;
  cfg.seed = 1234;
  cmd_synth_scene(cfg, (dir / "a").string());
  cmd_synth_scene(cfg, (dir / "b").string());
  CHECK(slurp(dir / "a/scene.rdpc") == slurp(dir / "b/scene.rdpc"));
  CHECK(slurp(dir / "a/box.csv") == slurp(dir / "b/box.csv"));

  SECTION("a different seed changes the bytes") {
    ExperimentConfig other = cfg;
    other.seed = 99;
    cmd_synth_scene(other, (dir / "c").string());
    CHECK(slurp(dir / "a/scene.rdpc") != slurp(dir / "c/scene.rdpc"));
  }
  SECTION("object points all fall inside the box") {
    SynthSceneOptions none;
    none.object_points = 0;
    cmd_synth_scene(cfg, (dir / "bg").string(), none);
    const PointCloud background = io::read_pointcloud((dir / "bg/scene.rdpc").string());
    const PointCloud full = io::read_pointcloud((dir / "a/scene.rdpc").string());
    const Box3D box = io::read_box_csv((dir / "a/box.csv").string());
    REQUIRE(full.size() > background.size());
    for (size_t i = 0; i < background.size(); ++i)
      CHECK_FALSE(point_in_box(
          {background.points[i].x, background.points[i].y, background.points[i].z}, box));
    for (size_t i = background.size(); i < full.size(); ++i)
      CHECK(point_in_box({full.points[i].x, full.points[i].y, full.points[i].z}, box));
  }
}

TEST_CASE("roundtrip report") {
  const auto dir = tmp_dir("roundtrip");
  ExperimentConfig cfg;
  cmd_synth_scene(cfg, dir.string());
  const RoundtripReport rep =
      cmd_roundtrip((dir / "scene.rdpc").string(), (dir / "report.csv").string());
  CHECK(rep.max_error < 1e-6);
  CHECK(rep.retained > 0);
  CHECK(rep.retained + rep.collisions == rep.in_range);

  SECTION("clouds outside the depth window retain nothing") {
    PointCloud far;
    far.points.push_back({100, 0, 0, 1});
    far.points.push_back({0.5, 0, 0, 1});
    io::write_pointcloud(far, (dir / "far.rdpc").string());
    const RoundtripReport r = cmd_roundtrip((dir / "far.rdpc").string(), (dir / "r.csv").string());
    CHECK(r.in_range == 0);
    CHECK(r.retained == 0);
  }
  SECTION("an empty cloud produces an empty report") {
    io::write_pointcloud(PointCloud{}, (dir / "empty.rdpc").string());
    const RoundtripReport r =
        cmd_roundtrip((dir / "empty.rdpc").string(), (dir / "e.csv").string());
    CHECK(r.input_points == 0);
    CHECK(r.retained == 0);
    CHECK(r.max_error == 0.0);
  }
}

TEST_CASE("normalization check passes and reports") {
  const auto dir = tmp_dir("normcheck");
  ExperimentConfig cfg;
  const NormalizeCheckResult res =
      cmd_normalize_check(cfg, (dir / "report.csv").string(), 2000);
  CHECK(res.all_pass);
  CHECK(res.rows.size() == 8);  // linear + 3 alphas + 3 lambdas + pooling identity
  const std::string report = slurp(dir / "report.csv");
  CHECK(report.find("depth_linear") != std::string::npos);
}

TEST_CASE("toy training command") {
  const auto dir = tmp_dir("train");
  ExperimentConfig cfg;
  cfg.seed = 5;
  cfg.schedule.steps = 20;
  cfg.denoiser.hidden = {16};
  cfg.denoiser.embed_dim = 8;
  cfg.denoiser.d_h = 8;
  cfg.denoiser.d_tok = 8;
  cfg.training.steps = 0;
  const TrainResult res = cmd_train_toy(cfg, dir.string());
  CHECK(res.losses.empty());

  SECTION("zero steps write the untouched initialisation") {
    const DenoiserParams loaded = io::read_checkpoint((dir / "checkpoint.rdcp").string());
    std::mt19937_64 rng(cfg.seed);
    const DenoiserParams expect = init_denoiser(cfg.make_denoiser_config(), rng);
    std::vector<const std::vector<double>*> pa, pb;
    visit_tensors(loaded, [&](const std::vector<double>& t) { pa.push_back(&t); });
    visit_tensors(expect, [&](const std::vector<double>& t) { pb.push_back(&t); });
    for (size_t k = 0; k < pa.size(); ++k) CHECK(*pa[k] == *pb[k]);
    CHECK(slurp(dir / "loss.csv") == "step,loss\n");
  }
  SECTION("training runs are seed reproducible") {
    cfg.training.steps = 10;
    cfg.training.batch = 8;
    cmd_train_toy(cfg, (dir / "r1").string());
    cmd_train_toy(cfg, (dir / "r2").string());
    CHECK(slurp(dir / "r1/checkpoint.rdcp") == slurp(dir / "r2/checkpoint.rdcp"));
    CHECK(slurp(dir / "r1/loss.csv") == slurp(dir / "r2/loss.csv"));
  }
}

TEST_CASE("sampling command") {
  const auto dir = tmp_dir("sample");
  ExperimentConfig cfg;
  cfg.seed = 5;
  cfg.schedule.steps = 20;
  cfg.denoiser.hidden = {16};
  cfg.denoiser.embed_dim = 8;
  cfg.denoiser.d_h = 8;
  cfg.denoiser.d_tok = 8;
  cfg.training.steps = 0;
  cmd_train_toy(cfg, dir.string());
  const std::string ckpt = (dir / "checkpoint.rdcp").string();

  SECTION("zero samples still write the header") {
    SampleOptions opt;
    opt.count = 0;
    cmd_sample(ckpt, cfg, opt, (dir / "none.csv").string());
    CHECK(slurp(dir / "none.csv") == "x,y\n");
  }
  SECTION("guidance is inert at initialisation (zero gates)") {
    SampleOptions a;
    a.count = 5;
    a.conditional = true;
    a.cfg_scale = 1.0;
    a.seed = 9;
    SampleOptions b = a;
    b.cfg_scale = 5.0;
    const std::vector<Vec> sa = cmd_sample(ckpt, cfg, a, (dir / "a.csv").string());
    const std::vector<Vec> sb = cmd_sample(ckpt, cfg, b, (dir / "b.csv").string());
    CHECK(sa == sb);
  }
  SECTION("ddim stride must divide T") {
    SampleOptions opt;
    opt.steps = 7;
    opt.count = 1;
    CHECK_THROWS_AS(cmd_sample(ckpt, cfg, opt, (dir / "x.csv").string()),
                    std::invalid_argument);
  }
  SECTION("checkpoint and config schedules must agree") {
    ExperimentConfig other = cfg;
    other.schedule.steps = 40;
    SampleOptions opt;
    opt.steps = 10;
    CHECK_THROWS_AS(cmd_sample(ckpt, other, opt, (dir / "y.csv").string()), ConfigError);
  }
}

TEST_CASE("composite demo") {
  const auto dir = tmp_dir("composite");
  ExperimentConfig cfg;
  cmd_synth_scene(cfg, dir.string());
  const std::string scene = (dir / "scene.rdpc").string();
  const std::string box_csv = (dir / "box.csv").string();

  SECTION("identity edit leaves the view byte-identical") {
    CompositeDemoOptions identity;
    identity.shrink = 1.0;
    identity.yaw_delta = 0.0;
    cmd_composite_demo(scene, box_csv, (dir / "id").string(), identity);
    const PointCloud cloud = io::read_pointcloud(scene);
    const RangeView original = project(cloud, BeamTable::nuscenes());
    io::write_rangeview(original, (dir / "original.rdrv").string());
    CHECK(slurp(dir / "id/composited.rdrv") == slurp(dir / "original.rdrv"));
  }
  SECTION("a box far outside the sweep changes nothing") {
    const Box3D far = Box3D::from_center_size_yaw({500, 500, 0}, 4, 4, 2, 0.0);
    io::write_box_csv(far, (dir / "far_box.csv").string());
    cmd_composite_demo(scene, (dir / "far_box.csv").string(), (dir / "far").string());
    const PointCloud cloud = io::read_pointcloud(scene);
    const RangeView original = project(cloud, BeamTable::nuscenes());
    io::write_rangeview(original, (dir / "original.rdrv").string());
    CHECK(slurp(dir / "far/composited.rdrv") == slurp(dir / "original.rdrv"));
  }
  SECTION("a real edit moves pixels and writes figures") {
    const RangeView composited = cmd_composite_demo(scene, box_csv, (dir / "move").string());
    const PointCloud cloud = io::read_pointcloud(scene);
    const RangeView original = project(cloud, BeamTable::nuscenes());
    CHECK_FALSE(composited == original);
    for (const char* name :
         {"before_depth.pgm", "after_depth.pgm", "before_intensity.pgm", "after_intensity.pgm"})
      CHECK(std::filesystem::exists(dir / "move" / name));
  }
}

TEST_CASE("metrics command") {
  const auto dir = tmp_dir("metrics");
  ExperimentConfig cfg;
  cmd_synth_scene(cfg, dir.string());
  const PointCloud cloud = io::read_pointcloud((dir / "scene.rdpc").string());
  const RangeView view = project(cloud, BeamTable::nuscenes());
  io::write_rangeview(view, (dir / "ref.rdrv").string());
  RangeView noisy = view;
  for (double& v : noisy.depth.values()) v += 0.25;
  io::write_rangeview(noisy, (dir / "cand.rdrv").string());

  const MetricsReport rep =
      cmd_metrics((dir / "ref.rdrv").string(), (dir / "cand.rdrv").string(),
                  (dir / "box.csv").string(), (dir / "metrics.csv").string());
  // Storage is float32, so the offset survives only to single precision.
  CHECK_THAT(rep.object_median_depth, Catch::Matchers::WithinAbs(0.25, 1e-4));
  CHECK_THAT(rep.mask_median_depth, Catch::Matchers::WithinAbs(0.25, 1e-4));
  CHECK(rep.object_intensity_mse == 0.0);

  SECTION("identical views score zero") {
    const MetricsReport zero =
        cmd_metrics((dir / "ref.rdrv").string(), (dir / "ref.rdrv").string(),
                    (dir / "box.csv").string(), (dir / "z.csv").string());
    CHECK(zero.object_median_depth == 0.0);
    CHECK(zero.mask_intensity_mse == 0.0);
  }
}

TEST_CASE("schedule dump") {
  const auto dir = tmp_dir("sched");
  ExperimentConfig cfg;
  cfg.schedule.steps = 10;
  cmd_schedule_dump(cfg, (dir / "s.csv").string());
  const std::string text = slurp(dir / "s.csv");
  CHECK(std::count(text.begin(), text.end(), '\n') == 11);  // header + 10 rows
  CHECK(text.rfind("t,beta,alpha,alpha_bar,beta_tilde", 0) == 0);
}

TEST_CASE("cli executable maps errors to exit codes") {
  const auto dir = tmp_dir("exitcodes");
  SECTION("success") {
    CHECK(run_cli("schedule-dump --out " + (dir / "ok.csv").string()) == 0);
  }
  SECTION("config error is 2") {
    std::ofstream os(dir / "bad.json");
    os << R"({"schedule": {"T": -5}})";
    os.close();
    CHECK(run_cli("--config " + (dir / "bad.json").string() + " schedule-dump --out " +
                  (dir / "x.csv").string()) == 2);
  }
  SECTION("io error is 3") {
    CHECK(run_cli("roundtrip --in " + (dir / "missing.rdpc").string() + " --report " +
                  (dir / "r.csv").string()) == 3);
  }
}
