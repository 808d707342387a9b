// Copyright 2026 The GaP Authors. All Rights Reserved.
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

#ifndef GAP_TOOLS_RUN_CONFIG_HPP
#define GAP_TOOLS_RUN_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gap/evaluation.hpp"
#include "gap/optimizer.hpp"
#include "gap/oracle.hpp"
#include "gap/remote_oracle.hpp"
#include "gap/synth_faces.hpp"

namespace gap::cli {

inline constexpr const char* kOracleUrlEnv = "GAP_ORACLE_URL";

/// Everything a command needs. Each field is both a `--flag` and a key of the
/// JSON config file, spelled the same way.
struct RunConfig {
  std::string out = "gap_out";
  std::uint64_t seed = 0;
  int jobs = 1;

  // corpus
  std::uint64_t corpus_seed = 1;
  int identities = 20;
  int photos = 4;
  double jitter_brightness = 0.05;
  double jitter_noise = 0.02;
  int jitter_shift = 2;

  // optimizer
  int iters = 625;
  int batch = 8;
  int restart_interval = 50;
  bool restarts = true;
  bool symmetric = true;
  int channels = 1;
  double amplitude_max = 1.0;
  double sigma_lo = 1.5;
  double sigma_hi = 12.0;
  double sigma_min = 1.0;
  bool cache_embeddings = false;
  bool monotone_accept = false;

  // placement
  int top = 8;
  int left = 20;
  int width = 72;
  int height = 28;

  // optimization pair
  int opt_identity = 0;
  int photo_a = 0;
  int photo_b = 1;
  bool include_opt_pair = false;

  // oracle
  std::string oracle = "toy";  // toy | remote
  std::string oracle_url;
  double max_qps = 0.0;
  int max_in_flight = 4;
  int transport_retries = 3;
  int rate_limit_retries = 3;
  int timeout_ms = 30000;

  // threshold
  double target_far = 1e-3;
  int impostor_pairs = 10000;
  std::uint64_t threshold_seed = 1;

  // eval / sweep / export-png
  std::string patch;
  std::string baseline;  // gray | noise | graft
  int graft_donor = 1;
  std::vector<int> bands{4, 8, 12};

  // ablate
  std::string grid = "single";  // single | full
  int ablate_seeds = 5;

  // curve
  int runs = 5;
  std::vector<std::int64_t> checkpoints{1000, 2000, 5000, 10000, 20000};

  // Throws InvalidArgument.
  void validate() const;

  OptimizerConfig optimizer() const;
  Placement placement() const;
  PairSelection selection() const;
  PhotoJitter jitter() const;
  ThrottleConfig throttle() const;
  std::filesystem::path out_dir() const { return out; }
};

// Calls f(flag_name, member_pointer, help) for every RunConfig field.
template <class F>
void for_each_field(F&& f) {
  f("out", &RunConfig::out, "output directory");
  f("seed", &RunConfig::seed, "root seed; every random stream is derived from it");
  f("jobs", &RunConfig::jobs, "max concurrent candidate evaluations");
  f("corpus-seed", &RunConfig::corpus_seed, "synthetic corpus seed");
  f("identities", &RunConfig::identities, "identities in the corpus");
  f("photos", &RunConfig::photos, "photos per identity");
  f("jitter-brightness", &RunConfig::jitter_brightness, "max |brightness offset| per photo");
  f("jitter-noise", &RunConfig::jitter_noise, "std-dev of per-pixel photo noise");
  f("jitter-shift", &RunConfig::jitter_shift, "max |pixel shift| per axis");
  f("iters", &RunConfig::iters, "optimizer iterations");
  f("batch", &RunConfig::batch, "candidates per iteration");
  f("restart-interval", &RunConfig::restart_interval, "iterations between restarts");
  f("restarts", &RunConfig::restarts, "enable periodic restarts");
  f("symmetric", &RunConfig::symmetric, "mirror the patch left to right");
  f("channels", &RunConfig::channels, "patch channels (1 or 3)");
  f("amplitude-max", &RunConfig::amplitude_max, "max |blob amplitude|");
  f("sigma-lo", &RunConfig::sigma_lo, "lower bound of the blob sigma range");
  f("sigma-hi", &RunConfig::sigma_hi, "upper bound of the blob sigma range");
  f("sigma-min", &RunConfig::sigma_min, "smallest sigma the renderer accepts");
  f("cache-embeddings", &RunConfig::cache_embeddings,
    "embed clean images once and score candidates locally (toy oracle only)");
  f("monotone-accept", &RunConfig::monotone_accept,
    "move the working patch only when the batch best improves on it");
  f("top", &RunConfig::top, "patch placement row");
  f("left", &RunConfig::left, "patch placement column");
  f("width", &RunConfig::width, "patch width");
  f("height", &RunConfig::height, "patch height");
  f("opt-identity", &RunConfig::opt_identity, "identity optimized on");
  f("photo-a", &RunConfig::photo_a, "first photo of the optimization pair");
  f("photo-b", &RunConfig::photo_b, "second photo of the optimization pair");
  f("include-opt-pair", &RunConfig::include_opt_pair,
    "also evaluate on the optimization pair");
  f("oracle", &RunConfig::oracle, "toy or remote");
  f("oracle-url", &RunConfig::oracle_url, "remote oracle endpoint (GAP_ORACLE_URL wins)");
  f("max-qps", &RunConfig::max_qps, "remote request rate ceiling, 0 = unthrottled");
  f("max-in-flight", &RunConfig::max_in_flight, "concurrent remote requests");
  f("transport-retries", &RunConfig::transport_retries, "retries after transport failures");
  f("rate-limit-retries", &RunConfig::rate_limit_retries, "retries after HTTP 429");
  f("timeout-ms", &RunConfig::timeout_ms, "remote request timeout");
  f("target-far", &RunConfig::target_far, "false-accept rate the threshold is set at");
  f("impostor-pairs", &RunConfig::impostor_pairs, "impostor pairs used for calibration");
  f("threshold-seed", &RunConfig::threshold_seed, "seed of the impostor sample");
  f("patch", &RunConfig::patch, "patch JSON to evaluate, sweep or export");
  f("baseline", &RunConfig::baseline, "evaluate a baseline instead: gray, noise or graft");
  f("graft-donor", &RunConfig::graft_donor, "identity whose forehead the graft copies");
  f("bands", &RunConfig::bands, "central band heights for the sweep");
  f("grid", &RunConfig::grid, "ablation grid: single or full");
  f("ablate-seeds", &RunConfig::ablate_seeds, "seeds per ablation cell (>= 3)");
  f("runs", &RunConfig::runs, "independent runs for the query curve");
  f("checkpoints", &RunConfig::checkpoints, "query checkpoints for the curve");
}

nlohmann::json to_json(const RunConfig& c);

// Applies a JSON config document on top of `base`. Unknown keys and wrongly
// typed values throw InvalidArgument.
void apply_json(RunConfig& base, const nlohmann::json& doc);

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});

// A non-empty GAP_ORACLE_URL replaces oracle_url.
void apply_environment(RunConfig& c);

Corpus make_corpus(const RunConfig& c);

OracleFactory make_oracle_factory(const RunConfig& c);

}  // namespace gap::cli

#endif  // GAP_TOOLS_RUN_CONFIG_HPP
