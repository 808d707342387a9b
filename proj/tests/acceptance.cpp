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

// Acceptance checks. Prints one PASS/FAIL line per criterion.
//
//   acceptance               run every criterion
//   acceptance --criterion N run criterion N only

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "commands.hpp"
#include "gap/error.hpp"
#include "gap/evaluation.hpp"
#include "gap/io.hpp"
#include "gap/optimizer.hpp"
#include "gap/remote_oracle.hpp"
#include "gap/rng.hpp"
#include "gap/synth_faces.hpp"
#include "gap/threshold.hpp"
#include "gap/toy_oracle.hpp"
#include "mock_server.hpp"
#include "reference_pipeline.hpp"

namespace gap {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) { return format_double(v); }

int worker_count() {
  return static_cast<int>(std::clamp(std::thread::hardware_concurrency(), 1u, 8u));
}

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("gap_acceptance_" + name);
  fs::remove_all(p);
  return p;
}

int cli(std::vector<std::string> args) {
  args.insert(args.begin(), "gap");
  std::ostringstream out, err;
  const int code = cli::run_cli(args, out, err);
  if (code != 0) std::cerr << err.str();
  return code;
}

ImagePair default_pair(const Corpus& corpus) {
  return optimization_pair(corpus, PairSelection{});
}

Verdict query_accounting() {
  const fs::path dir = scratch("c1");
  const auto t0 = Clock::now();
  const int code = cli({"optimize", "--iters", "100", "--batch", "8", "--out", dir.string()});
  const double secs = seconds_since(t0);
  if (code != 0) return {false, "optimize exited " + std::to_string(code)};
  const auto report = nlohmann::json::parse(read_text_file(dir / "report.json"));
  fs::remove_all(dir);
  const auto q = report["ledger"]["optimization_queries"].get<std::int64_t>();
  return {q == 3200 && report["queries"] == 3200 && secs < 10.0,
          "optimization_queries=" + std::to_string(q) + " runtime=" + fmt(secs) + "s"};
}

Verdict determinism() {
  const fs::path a = scratch("c2a"), b = scratch("c2b");
  const auto j = std::to_string(worker_count());
  if (cli({"optimize", "--seed", "42", "--out", a.string()}) != 0 ||
      cli({"optimize", "--seed", "42", "--jobs", j, "--out", b.string()}) != 0) {
    return {false, "optimize failed"};
  }
  const bool patch_same = read_text_file(a / "patch.json") == read_text_file(b / "patch.json");
  const bool trace_same = read_text_file(a / "trace.csv") == read_text_file(b / "trace.csv");
  fs::remove_all(a);
  fs::remove_all(b);
  return {patch_same && trace_same, std::string("patch.json ") +
                                        (patch_same ? "identical" : "differs") + ", trace.csv " +
                                        (trace_same ? "identical" : "differs")};
}

Verdict monotone_and_restarts() {
  const Corpus corpus = build_corpus(1, 20, 4);
  const ImagePair pair = default_pair(corpus);
  int violations = 0;
  int restarts_seen = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    OptimizerConfig config;
    config.seed = seed;
    config.jobs = worker_count();
    ToyOracle oracle;
    bool have_prev = false;
    Patch prev_best;
    double prev_loss = 0.0;
    const auto observe = [&](const OptState& s, const TraceRecord& r) {
      if (have_prev) {
        if (s.best_loss > prev_loss) ++violations;
        if (r.restarted) {
          ++restarts_seen;
          // The restart itself must not touch the global best: it can only
          // have moved because this iteration's batch beat it.
          const bool improved = r.batch_best_loss < prev_loss;
          if (!improved && (s.best_loss != prev_loss || !(s.best_patch == prev_best))) {
            ++violations;
          }
          if (improved && s.best_loss != r.batch_best_loss) ++violations;
          const auto v = s.current_patch.values();
          if (std::any_of(v.begin(), v.end(), [](double x) { return x != 0.0; })) ++violations;
        }
      }
      have_prev = true;
      prev_best = s.best_patch;
      prev_loss = s.best_loss;
    };
    const OptResult res = run_greedy(config, pair, Placement{}, oracle, observe);
    for (std::size_t i = 1; i < res.trace.records.size(); ++i) {
      if (res.trace.records[i].global_best_loss > res.trace.records[i - 1].global_best_loss) {
        ++violations;
      }
    }
    if (res.best_loss != res.trace.records.back().global_best_loss) ++violations;
  }
  return {violations == 0 && restarts_seen == 5 * 12,
          "5 seeds, " + std::to_string(restarts_seen) + " restarts checked, " +
              std::to_string(violations) + " violations"};
}

Verdict blob_rendering() {
  Rng rng(derive_seed(0, "acceptance.blobs"));
  const SamplerConfig sampler;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const GaussianBlob b = sample_blob(rng, sampler, 72, 28, false);
    const BlobField f = render_blob(b, 72, 28);
    for (int r = 0; r < 28; ++r) {
      for (int c = 0; c < 72; ++c) {
        const double want = reference::blob_value(b.amplitude[0], b.center_x, b.center_y,
                                                  b.sigma_x, b.sigma_y, b.theta, r, c);
        worst = std::max(worst, std::abs(f.at(r, c) - want));
      }
    }
  }
  return {worst <= 1e-9, "100 blobs, max |diff|=" + fmt(worst)};
}

Verdict attack_efficacy() {
  const auto t0 = Clock::now();
  const Corpus corpus = build_corpus(1, 20, 4);
  ToyOracle oracle;
  OptimizerConfig config;  // 625 iterations x 32 queries = 20000
  config.jobs = worker_count();
  const OptResult res = run_greedy(config, default_pair(corpus), Placement{}, oracle);
  const double thr = calibrate_threshold(corpus, oracle, 1e-3, 10000, 1).threshold;
  const auto pairs = genuine_pairs(corpus, PairSelection{});
  const auto asr = [&](const Patch& p) {
    return attack_success_rate(corpus, p, Placement{}, oracle, thr, pairs).asr;
  };
  Rng noise_rng(derive_seed(0, "baseline.noise"));
  const double gap_asr = asr(res.best_patch);
  const double gray_asr = asr(Patch(72, 28));
  const double noise_asr = asr(noise_patch(noise_rng, 72, 28));
  const double secs = seconds_since(t0);
  const bool ok = res.queries == 20000 && gap_asr - gray_asr >= 0.2 &&
                  gap_asr - noise_asr >= 0.2 && secs < 120.0;
  return {ok, "queries=" + std::to_string(res.queries) + " ASR gap=" + fmt(gap_asr) +
                  " gray=" + fmt(gray_asr) + " noise=" + fmt(noise_asr) +
                  " runtime=" + fmt(secs) + "s"};
}

Verdict restart_ablation() {
  const Corpus corpus = build_corpus(1, 20, 4);
  const ImagePair pair = default_pair(corpus);
  std::vector<double> with, without;
  for (int i = 0; i < 5; ++i) {
    OptimizerConfig config;
    config.seed = derive_seed(0, "ablate.seed", static_cast<std::uint64_t>(i));
    config.jobs = worker_count();
    ToyOracle a, b;
    with.push_back(run_greedy(config, pair, Placement{}, a).best_loss);
    config.restarts_enabled = false;
    without.push_back(run_greedy(config, pair, Placement{}, b).best_loss);
  }
  const double m_with = median(with), m_without = median(without);
  return {m_with <= m_without, "median best_loss with restarts=" + fmt(m_with) +
                                   " without=" + fmt(m_without) + " (20000 queries each)"};
}

Verdict sweep_exactness() {
  const Corpus corpus = build_corpus(1, 20, 4);
  const ImagePair pair = default_pair(corpus);
  ToyOracle oracle;
  OptimizerConfig config;
  config.n_iters = 60;
  const Patch patch = run_greedy(config, pair, Placement{}, oracle).best_patch;
  const auto rows = geometry_sweep(patch, pair, Placement{}, oracle);
  const double zero = loss(Patch(72, 28), pair, Placement{}, oracle);
  const double full = loss(patch, pair, Placement{}, oracle);
  bool drop_all = false, keep_all = false;
  int checked = 0;
  for (const auto& r : rows) {
    if (r.mask_kind == "band") continue;
    if (r.k == 28) {
      drop_all = r.loss == zero;
      ++checked;
      if (!drop_all) break;
    }
    if (r.k == 0) {
      keep_all = r.loss == full;
      ++checked;
      if (!keep_all) break;
    }
  }
  return {drop_all && keep_all && checked == 4,
          "drop-all=" + fmt(zero) + " k=0=" + fmt(full) + " (" + std::to_string(checked) +
              " rows compared bit-exactly)"};
}

Verdict threshold_calibration() {
  const Corpus corpus = build_corpus(1, 20, 4);
  ToyOracle oracle;
  const double far = 1e-3;
  const int n = 10000;
  const double thr = calibrate_threshold(corpus, oracle, far, n, 1).threshold;

  std::vector<double> sims;
  for (const auto& p : sample_impostor_pairs(corpus, n, 1)) {
    sims.push_back(oracle.similarity(render_photo(corpus, p.identity_a, p.photo_a),
                                     render_photo(corpus, p.identity_b, p.photo_b)));
  }
  std::sort(sims.begin(), sims.end(), std::greater<>());
  const double oracle_thr = sims[static_cast<std::size_t>(std::floor(far * n + 1e-9))];

  const double fresh = measure_far(corpus, oracle, thr, n, derive_seed(1, "acceptance.fresh_far"));
  return {thr == oracle_thr && fresh >= 0.0 && fresh <= 0.005,
          "threshold=" + fmt(thr) + " sort-and-index=" + fmt(oracle_thr) +
              " fresh FAR=" + fmt(fresh)};
}

Verdict protocol_client() {
  test_support::MockServer server;
  ThrottleConfig fast;
  fast.backoff_initial = std::chrono::milliseconds(1);

  const Corpus corpus = build_corpus(1, 20, 4);
  Rng rng(derive_seed(0, "acceptance.remote_pairs"));
  double worst = 0.0;
  {
    RemoteOracle remote(server.url(), fast);
    ToyOracle toy;
    for (int i = 0; i < 50; ++i) {
      const Image a = render_photo(corpus, rng.uniform_int(0, 19), rng.uniform_int(0, 3));
      const Image b = render_photo(corpus, rng.uniform_int(0, 19), rng.uniform_int(0, 3));
      const double want = toy.similarity(quantize_8bit(a), quantize_8bit(b));
      worst = std::max(worst, std::abs(remote.similarity(a, b) - want));
    }
  }

  ThrottleConfig slow = fast;
  slow.max_qps = 5.0;
  double secs;
  {
    RemoteOracle remote(server.url(), slow);
    const Image img = render_photo(corpus, 0, 0);
    const auto t0 = Clock::now();
    for (int i = 0; i < 20; ++i) remote.similarity(img, img);
    secs = seconds_since(t0);
  }

  bool budget = false;
  {
    ThrottleConfig limited = fast;
    limited.rate_limit_retries = 2;
    RemoteOracle remote(server.url(), limited);
    server.set_mode(test_support::MockServer::Mode::kAlways429);
    const Image img = render_photo(corpus, 0, 0);
    try {
      remote.similarity(img, img);
    } catch (const BudgetExceeded&) {
      budget = true;
    } catch (const std::exception&) {
    }
  }
  return {worst <= 1e-6 && secs >= 3.8 && budget,
          "50 pairs max |diff|=" + fmt(worst) + ", 20 queries at 5 qps took " + fmt(secs) +
              "s, 429 -> " + (budget ? "BudgetExceeded" : "wrong error")};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "query accounting", query_accounting},
      {2, "determinism", determinism},
      {3, "global-best monotonicity and restart preservation", monotone_and_restarts},
      {4, "blob rendering equivalence", blob_rendering},
      {5, "attack efficacy", attack_efficacy},
      {6, "restart ablation", restart_ablation},
      {7, "geometry sweep exactness", sweep_exactness},
      {8, "threshold calibration", threshold_calibration},
      {9, "protocol client robustness", protocol_client},
  };
  return all;
}

}  // namespace
}  // namespace gap

int main(int argc, char** argv) {
  int only = 0;
  if (argc == 3 && std::string(argv[1]) == "--criterion") {
    only = std::atoi(argv[2]);
  } else if (argc != 1) {
    std::cerr << "usage: acceptance [--criterion N]\n";
    return 2;
  }
  int failures = 0;
  int ran = 0;
  for (const auto& c : gap::criteria()) {
    if (only != 0 && c.id != only) continue;
    ++ran;
    gap::Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name
              << "): " << v.detail << std::endl;
    failures += v.pass ? 0 : 1;
  }
  if (ran == 0) {
    std::cerr << "no criterion " << only << "\n";
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
