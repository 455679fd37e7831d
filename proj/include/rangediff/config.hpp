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

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rangediff/core.hpp"
#include "rangediff/denoiser.hpp"
#include "rangediff/schedule.hpp"

namespace rangediff {

/// Everything the CLI experiments read from one JSON document. Parsing is
/// strict: unknown keys and out-of-range values are rejected with the key
/// path in the message.
struct ExperimentConfig {
  uint64_t seed = 42;

  struct Schedule {
    int steps = 200;
    std::string family = "linear";
    double beta_start = 1e-4;
    double beta_end = 2e-2;
    SigmaChoice sigma_choice = SigmaChoice::kBetaTilde;
  } schedule;

  struct Denoiser {
    std::vector<int> hidden = {128, 128};
    int embed_dim = 16;
    int d_h = 32;
    int d_tok = 16;
    int fourier_frequencies = 8;  // L used for box embeddings
  } denoiser;

  struct Training {
    int steps = 20000;
    int batch = 128;
    double lr = 1e-3;
    double null_condition_rate = 0.3;
    std::string dataset = "ring";
  } training;

  struct Norm {
    double lambda = 4.0;
    double alpha = 0.5;
  } norm;

  struct Viewport {
    int side = 512;
    double min_coverage = 0.2;
  } viewport;

  NoiseSchedule make_schedule() const {
    if (schedule.family != "linear")
      throw ConfigError("schedule.family: only \"linear\" is supported, got \"" +
                        schedule.family + "\"");
    return make_linear_schedule(schedule.steps, schedule.beta_start, schedule.beta_end);
  }

  DenoiserConfig make_denoiser_config() const {
    DenoiserConfig cfg;
    cfg.data_dim = 2;
    cfg.embed_dim = denoiser.embed_dim;
    cfg.d_h = denoiser.d_h;
    cfg.d_tok = denoiser.d_tok;
    cfg.hidden = denoiser.hidden;
    cfg.schedule_steps = schedule.steps;
    return cfg;
  }

  TrainConfig make_train_config() const {
    TrainConfig cfg;
    cfg.steps = training.steps;
    cfg.batch = training.batch;
    cfg.lr = training.lr;
    cfg.null_condition_rate = training.null_condition_rate;
    cfg.seed = seed;
    return cfg;
  }
};

namespace detail {

using json = nlohmann::json;

inline void reject_unknown_keys(const json& obj, const std::set<std::string>& known,
                                const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!known.count(key))
      throw ConfigError(where + ": unknown key \"" + key + "\"");
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& root) {
  using detail::get_or;
  if (!root.is_object()) throw ConfigError("config: top level must be a JSON object");
  detail::reject_unknown_keys(
      root, {"seed", "schedule", "denoiser", "training", "norm", "viewport"}, "config");
  ExperimentConfig cfg;
  cfg.seed = get_or<uint64_t>(root, "seed", cfg.seed, "config");

  if (root.contains("schedule")) {
    const auto& s = root.at("schedule");
    detail::reject_unknown_keys(s, {"T", "family", "beta_start", "beta_end", "sigma_choice"},
                                "schedule");
    cfg.schedule.steps = detail::get_or<int>(s, "T", cfg.schedule.steps, "schedule");
    cfg.schedule.family = detail::get_or<std::string>(s, "family", cfg.schedule.family, "schedule");
    cfg.schedule.beta_start =
        detail::get_or<double>(s, "beta_start", cfg.schedule.beta_start, "schedule");
    cfg.schedule.beta_end = detail::get_or<double>(s, "beta_end", cfg.schedule.beta_end, "schedule");
    const std::string sigma =
        detail::get_or<std::string>(s, "sigma_choice", "beta_tilde", "schedule");
    if (sigma == "beta_tilde")
      cfg.schedule.sigma_choice = SigmaChoice::kBetaTilde;
    else if (sigma == "beta")
      cfg.schedule.sigma_choice = SigmaChoice::kBeta;
    else
      throw ConfigError("schedule.sigma_choice: expected \"beta_tilde\" or \"beta\", got \"" +
                        sigma + "\"");
    if (cfg.schedule.steps < 1) throw ConfigError("schedule.T: must be >= 1");
    if (!(cfg.schedule.beta_start > 0.0 && cfg.schedule.beta_start <= cfg.schedule.beta_end &&
          cfg.schedule.beta_end < 1.0))
      throw ConfigError("schedule: need 0 < beta_start <= beta_end < 1 (non-monotone rejected)");
  }

  if (root.contains("denoiser")) {
    const auto& d = root.at("denoiser");
    detail::reject_unknown_keys(
        d, {"hidden", "embed_dim", "d_h", "d_tok", "fourier_frequencies"}, "denoiser");
    cfg.denoiser.hidden = get_or<std::vector<int>>(d, "hidden", cfg.denoiser.hidden, "denoiser");
    cfg.denoiser.embed_dim = get_or<int>(d, "embed_dim", cfg.denoiser.embed_dim, "denoiser");
    cfg.denoiser.d_h = get_or<int>(d, "d_h", cfg.denoiser.d_h, "denoiser");
    cfg.denoiser.d_tok = get_or<int>(d, "d_tok", cfg.denoiser.d_tok, "denoiser");
    cfg.denoiser.fourier_frequencies =
        get_or<int>(d, "fourier_frequencies", cfg.denoiser.fourier_frequencies, "denoiser");
    if (cfg.denoiser.hidden.empty()) throw ConfigError("denoiser.hidden: must not be empty");
    for (int h : cfg.denoiser.hidden)
      if (h < 1) throw ConfigError("denoiser.hidden: sizes must be positive");
    if (cfg.denoiser.embed_dim < 2 || cfg.denoiser.embed_dim % 2 != 0)
      throw ConfigError("denoiser.embed_dim: must be even and >= 2");
    if (cfg.denoiser.d_h < 1) throw ConfigError("denoiser.d_h: must be positive");
    if (cfg.denoiser.d_tok < 2 || cfg.denoiser.d_tok % 2 != 0)
      throw ConfigError("denoiser.d_tok: must be even and >= 2");
    if (cfg.denoiser.fourier_frequencies < 1)
      throw ConfigError("denoiser.fourier_frequencies: must be >= 1");
  }

  if (root.contains("training")) {
    const auto& t = root.at("training");
    detail::reject_unknown_keys(
        t, {"steps", "batch", "lr", "null_condition_rate", "dataset"}, "training");
    cfg.training.steps = get_or<int>(t, "steps", cfg.training.steps, "training");
    cfg.training.batch = get_or<int>(t, "batch", cfg.training.batch, "training");
    cfg.training.lr = get_or<double>(t, "lr", cfg.training.lr, "training");
    cfg.training.null_condition_rate =
        get_or<double>(t, "null_condition_rate", cfg.training.null_condition_rate, "training");
    cfg.training.dataset = get_or<std::string>(t, "dataset", cfg.training.dataset, "training");
    if (cfg.training.steps < 0) throw ConfigError("training.steps: must be >= 0");
    if (cfg.training.batch < 1) throw ConfigError("training.batch: must be >= 1");
    if (!(cfg.training.lr > 0.0)) throw ConfigError("training.lr: must be positive");
    if (cfg.training.null_condition_rate < 0.0 || cfg.training.null_condition_rate > 1.0)
      throw ConfigError("training.null_condition_rate: must lie in [0, 1]");
    if (cfg.training.dataset != "ring" && cfg.training.dataset != "moons")
      throw ConfigError("training.dataset: expected \"ring\" or \"moons\", got \"" +
                        cfg.training.dataset + "\"");
  }

  if (root.contains("norm")) {
    const auto& n = root.at("norm");
    detail::reject_unknown_keys(n, {"lambda", "alpha"}, "norm");
    cfg.norm.lambda = get_or<double>(n, "lambda", cfg.norm.lambda, "norm");
    cfg.norm.alpha = get_or<double>(n, "alpha", cfg.norm.alpha, "norm");
    if (!(cfg.norm.lambda > 0.0)) throw ConfigError("norm.lambda: must be positive");
    if (!(cfg.norm.alpha > 0.0 && cfg.norm.alpha < 1.0))
      throw ConfigError("norm.alpha: must lie in (0, 1)");
  }

  if (root.contains("viewport")) {
    const auto& v = root.at("viewport");
    detail::reject_unknown_keys(v, {"D", "min_coverage"}, "viewport");
    cfg.viewport.side = get_or<int>(v, "D", cfg.viewport.side, "viewport");
    cfg.viewport.min_coverage =
        get_or<double>(v, "min_coverage", cfg.viewport.min_coverage, "viewport");
    if (cfg.viewport.side < 32 || cfg.viewport.side % 32 != 0)
      throw ConfigError("viewport.D: must be a positive multiple of 32");
    if (!(cfg.viewport.min_coverage > 0.0 && cfg.viewport.min_coverage <= 1.0))
      throw ConfigError("viewport.min_coverage: must lie in (0, 1]");
  }

  return cfg;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_config(root);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config: " + path);
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return parse_config_text(text);
}

}  // namespace rangediff
