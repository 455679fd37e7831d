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

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rangediff/rangediff.hpp"

namespace {

// Exit codes: 0 success, 2 config error, 3 I/O error, 4 numerical validation.
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitValidation = 4;

rangediff::ExperimentConfig load_config_or_default(const std::string& path,
                                                   std::optional<uint64_t> seed_override) {
  rangediff::ExperimentConfig cfg =
      path.empty() ? rangediff::ExperimentConfig{} : rangediff::load_config(path);
  if (seed_override) cfg.seed = *seed_override;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rangediff: lidar range-view codec, toy diffusion and compositing toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<uint64_t> seed_override;
  app.add_option("--config", config_path, "experiment config JSON (defaults when omitted)");
  app.add_option("--seed", seed_override, "override the config seed");

  auto* synth = app.add_subcommand("synth-scene", "generate a synthetic sweep and box fixture");
  std::string synth_out = "out";
  int synth_object_points = 400;
  synth->add_option("--out", synth_out, "output directory");
  synth->add_option("--object-points", synth_object_points, "object returns to keep (0 = none)");

  auto* roundtrip = app.add_subcommand("roundtrip", "project + reconstruct a cloud and report errors");
  std::string rt_in, rt_report = "roundtrip.csv";
  roundtrip->add_option("--in", rt_in, "input RDPC cloud")->required();
  roundtrip->add_option("--report", rt_report, "output CSV report");

  auto* normcheck = app.add_subcommand("normalize-check", "verify normalisation round trips");
  std::string nc_report = "normalize_check.csv";
  size_t nc_samples = 100000;
  normcheck->add_option("--report", nc_report, "output CSV report");
  normcheck->add_option("--samples", nc_samples, "samples per map");

  auto* train = app.add_subcommand("train-toy", "train the toy denoiser on a 2D distribution");
  std::string train_out = "out";
  train->add_option("--out", train_out, "output directory");

  auto* sample = app.add_subcommand("sample", "sample from a trained checkpoint");
  rangediff::SampleOptions sopt;
  std::string sample_ckpt, sample_out = "samples.csv";
  sample->add_option("--checkpoint", sample_ckpt, "RDCP checkpoint")->required();
  sample->add_option("--sampler", sopt.sampler, "ddpm or ddim");
  sample->add_option("--steps", sopt.steps, "ddim step count (must divide T)");
  sample->add_option("--cfg-scale", sopt.cfg_scale, "guidance scale");
  sample->add_option("--n", sopt.count, "number of samples");
  sample->add_flag("--conditional", sopt.conditional, "condition on a mode angle token");
  sample->add_option("--condition-angle", sopt.condition_angle, "conditioning angle in radians");
  sample->add_option("--out", sample_out, "output CSV");

  auto* composite = app.add_subcommand("composite-demo", "move an object inside its box and composite");
  std::string comp_scene, comp_box, comp_out = "out";
  rangediff::CompositeDemoOptions copt;
  composite->add_option("--scene", comp_scene, "input RDPC cloud")->required();
  composite->add_option("--box", comp_box, "box fixture CSV")->required();
  composite->add_option("--out", comp_out, "output directory");
  composite->add_option("--shrink", copt.shrink, "object scale about the box centre");
  composite->add_option("--yaw-delta", copt.yaw_delta, "object rotation about the box centre");

  auto* metrics = app.add_subcommand("metrics", "reconstruction metrics between two range views");
  std::string met_ref, met_cand, met_box, met_out = "metrics.csv";
  metrics->add_option("--reference", met_ref, "reference RDRV view")->required();
  metrics->add_option("--candidate", met_cand, "candidate RDRV view")->required();
  metrics->add_option("--box", met_box, "box fixture CSV")->required();
  metrics->add_option("--out", met_out, "output CSV");

  auto* sched = app.add_subcommand("schedule-dump", "dump the noise schedule tables");
  std::string sched_out = "schedule.csv";
  sched->add_option("--out", sched_out, "output CSV");

  CLI11_PARSE(app, argc, argv);

  try {
    const rangediff::ExperimentConfig cfg = load_config_or_default(config_path, seed_override);
    if (synth->parsed()) {
      rangediff::SynthSceneOptions opt;
      opt.object_points = synth_object_points;
      rangediff::cmd_synth_scene(cfg, synth_out, opt);
      std::cout << "wrote " << synth_out << "/scene.rdpc and " << synth_out << "/box.csv\n";
    } else if (roundtrip->parsed()) {
      const rangediff::RoundtripReport rep = rangediff::cmd_roundtrip(rt_in, rt_report);
      std::cout << "retained " << rep.retained << "/" << rep.in_range
                << " in-range points, max error " << rep.max_error << " m\n";
    } else if (normcheck->parsed()) {
      const rangediff::NormalizeCheckResult res =
          rangediff::cmd_normalize_check(cfg, nc_report, nc_samples);
      for (const auto& row : res.rows)
        std::cout << (row.pass ? "[PASS] " : "[FAIL] ") << row.name << " max_error "
                  << row.max_error << "\n";
      if (!res.all_pass) return kExitValidation;
    } else if (train->parsed()) {
      const rangediff::TrainResult res = rangediff::cmd_train_toy(cfg, train_out);
      if (!res.losses.empty())
        std::cout << "trained " << res.losses.size() << " steps, first loss " << res.losses.front()
                  << ", last loss " << res.losses.back() << "\n";
      std::cout << "wrote " << train_out << "/checkpoint.rdcp and " << train_out << "/loss.csv\n";
    } else if (sample->parsed()) {
      sopt.seed = cfg.seed;
      rangediff::cmd_sample(sample_ckpt, cfg, sopt, sample_out);
      std::cout << "wrote " << sopt.count << " samples to " << sample_out << "\n";
    } else if (composite->parsed()) {
      rangediff::cmd_composite_demo(comp_scene, comp_box, comp_out, copt);
      std::cout << "wrote composited view and figures to " << comp_out << "\n";
    } else if (metrics->parsed()) {
      const rangediff::MetricsReport rep = rangediff::cmd_metrics(met_ref, met_cand, met_box, met_out);
      std::cout << "mask    median_depth_error  intensity_mse\n";
      std::cout << "object  " << rep.object_median_depth << "  " << rep.object_intensity_mse << "\n";
      std::cout << "edit    " << rep.mask_median_depth << "  " << rep.mask_intensity_mse << "\n";
    } else if (sched->parsed()) {
      rangediff::cmd_schedule_dump(cfg, sched_out);
      std::cout << "wrote " << sched_out << "\n";
    }
  } catch (const rangediff::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const rangediff::IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
