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

#include "gap/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gap/error.hpp"
#include "gap/io.hpp"
#include "gap/rng.hpp"

namespace gap {

namespace {

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json PairSelection::to_json() const {
  return {{"opt_identity", opt_identity},
          {"opt_photo_a", opt_photo_a},
          {"opt_photo_b", opt_photo_b},
          {"exclude_optimization_pair", exclude_optimization_pair}};
}

ImagePair optimization_pair(const Corpus& corpus, const PairSelection& sel) {
  if (sel.opt_photo_a == sel.opt_photo_b) {
    throw InvalidArgument("optimization pair needs two different photos");
  }
  return {render_photo(corpus, sel.opt_identity, sel.opt_photo_a),
          render_photo(corpus, sel.opt_identity, sel.opt_photo_b)};
}

std::vector<GenuinePair> genuine_pairs(const Corpus& corpus, const PairSelection& sel) {
  std::vector<GenuinePair> out;
  for (int id = 0; id < corpus.identity_count(); ++id) {
    for (int a = 0; a < corpus.photos_per_identity; ++a) {
      for (int b = 0; b < corpus.photos_per_identity; ++b) {
        if (a == b) continue;
        if (sel.exclude_optimization_pair && id == sel.opt_identity &&
            ((a == sel.opt_photo_a && b == sel.opt_photo_b) ||
             (a == sel.opt_photo_b && b == sel.opt_photo_a))) {
          continue;
        }
        out.push_back({id, a, b});
      }
    }
  }
  return out;
}

nlohmann::json EvalReport::to_json() const {
  nlohmann::json per_pair = nlohmann::json::array();
  for (const auto& p : pairs) {
    per_pair.push_back({{"identity", p.pair.identity},
                        {"armed_photo", p.pair.armed_photo},
                        {"clean_photo", p.pair.clean_photo},
                        {"clean_similarity", p.clean_similarity},
                        {"armed_similarity", p.armed_similarity},
                        {"success", p.success}});
  }
  return {{"schema_version", kReportSchemaVersion},
          {"config", config},
          {"asr", asr},
          {"threshold", threshold},
          {"n_pairs", pairs.size()},
          {"evaluation_queries", queries},
          {"seeds", seeds},
          {"pairs", per_pair}};
}

double success_fraction(std::span<const double> armed_similarities, double threshold) {
  if (armed_similarities.empty()) throw InvalidArgument("ASR over an empty pair set");
  const auto hits = std::count_if(armed_similarities.begin(), armed_similarities.end(),
                                  [&](double s) { return s < threshold; });
  return static_cast<double>(hits) / static_cast<double>(armed_similarities.size());
}

EvalReport attack_success_rate(const Corpus& corpus, const Patch& patch,
                               const Placement& placement, SimilarityOracle& oracle,
                               double threshold, std::span<const GenuinePair> pairs) {
  if (pairs.empty()) throw InvalidArgument("attack_success_rate: empty pair set");
  PhaseScope phase(oracle, Phase::kEvaluation);
  const std::int64_t start = oracle.ledger().queries(Phase::kEvaluation);

  const auto photos = render_all(corpus);
  std::vector<std::vector<Image>> armed(photos.size());
  for (std::size_t id = 0; id < photos.size(); ++id) {
    for (const auto& img : photos[id]) armed[id].push_back(apply_patch(img, patch, placement));
  }

  EvalReport report;
  report.threshold = threshold;
  std::vector<double> armed_sims;
  for (const auto& gp : pairs) {
    if (gp.identity < 0 || gp.identity >= corpus.identity_count() || gp.armed_photo < 0 ||
        gp.armed_photo >= corpus.photos_per_identity || gp.clean_photo < 0 ||
        gp.clean_photo >= corpus.photos_per_identity) {
      throw NotFound("genuine pair refers to a photo outside the corpus");
    }
    const Image& clean_ref = photos[gp.identity][gp.clean_photo];
    PairScore ps{gp, 0.0, 0.0, false};
    ps.clean_similarity = oracle.similarity(photos[gp.identity][gp.armed_photo], clean_ref);
    ps.armed_similarity = oracle.similarity(armed[gp.identity][gp.armed_photo], clean_ref);
    ps.success = ps.armed_similarity < threshold;
    armed_sims.push_back(ps.armed_similarity);
    report.pairs.push_back(ps);
  }
  report.asr = success_fraction(armed_sims, threshold);
  report.queries = oracle.ledger().queries(Phase::kEvaluation) - start;
  return report;
}

double misidentification_rate(std::span<const Image> probes,
                              std::span<const Image> subject_references,
                              std::span<const Image> distractors,
                              SimilarityOracle& oracle) {
  if (probes.empty()) throw InvalidArgument("misidentification_rate: no probes");
  if (subject_references.empty()) {
    throw InvalidArgument("misidentification_rate: subject has no references in the gallery");
  }
  PhaseScope phase(oracle, Phase::kEvaluation);
  int missed = 0;
  for (const Image& probe : probes) {
    double best_ref = -std::numeric_limits<double>::infinity();
    for (const Image& r : subject_references) best_ref = std::max(best_ref, oracle.similarity(probe, r));
    double best_other = -std::numeric_limits<double>::infinity();
    for (const Image& d : distractors) best_other = std::max(best_other, oracle.similarity(probe, d));
    if (best_other > best_ref) ++missed;
  }
  return static_cast<double>(missed) / static_cast<double>(probes.size());
}

double corpus_misidentification_rate(const Corpus& corpus, const Patch& patch,
                                     const Placement& placement,
                                     SimilarityOracle& oracle) {
  const auto photos = render_all(corpus);
  int missed = 0;
  int total = 0;
  for (int id = 0; id < corpus.identity_count(); ++id) {
    std::vector<Image> distractors;
    for (int other = 0; other < corpus.identity_count(); ++other) {
      if (other == id) continue;
      for (const auto& img : photos[other]) distractors.push_back(img);
    }
    for (int p = 0; p < corpus.photos_per_identity; ++p) {
      std::vector<Image> refs;
      for (int q = 0; q < corpus.photos_per_identity; ++q) {
        if (q != p) refs.push_back(photos[id][q]);
      }
      const Image probe = apply_patch(photos[id][p], patch, placement);
      const double rate =
          misidentification_rate(std::span(&probe, 1), refs, distractors, oracle);
      missed += rate > 0.5 ? 1 : 0;
      ++total;
    }
  }
  return static_cast<double>(missed) / static_cast<double>(total);
}

std::string AblationCell::label() const {
  std::string s = symmetric ? "symmetric" : "asymmetric";
  s += channels == 1 ? "+gray" : "+color";
  s += restarts ? "+restarts" : "+norestarts";
  return s;
}

AblationGrid AblationGrid::single_factor(std::vector<std::uint64_t> seeds) {
  AblationGrid g;
  g.cells = {{true, 1, true}, {false, 1, true}, {true, 3, true}, {true, 1, false}};
  g.seeds = std::move(seeds);
  return g;
}

AblationGrid AblationGrid::full(std::vector<std::uint64_t> seeds) {
  AblationGrid g;
  for (bool sym : {true, false})
    for (int ch : {1, 3})
      for (bool rs : {true, false}) g.cells.push_back({sym, ch, rs});
  g.seeds = std::move(seeds);
  return g;
}

void AblationGrid::validate() const {
  if (seeds.empty()) throw InvalidArgument("ablation grid needs at least one seed");
  if (std::find(cells.begin(), cells.end(), AblationCell{}) == cells.end()) {
    throw InvalidArgument("ablation grid must contain the default cell");
  }
}

double median(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("median of an empty set");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::vector<AblationRow> run_ablation(const AblationGrid& grid, const Corpus& corpus,
                                      const OracleFactory& factory,
                                      const EvalSetup& setup) {
  grid.validate();
  const ImagePair pair = optimization_pair(corpus, setup.selection);
  const auto eval_pairs = genuine_pairs(corpus, setup.selection);

  std::vector<AblationRow> rows;
  for (const auto& cell : grid.cells) {
    AblationRow row;
    row.cell = cell;
    std::vector<double> asrs;
    std::vector<double> losses;
    for (std::uint64_t seed : grid.seeds) {
      AblationRun run;
      run.seed = seed;
      try {
        OptimizerConfig cfg = setup.base;
        cfg.symmetric = cell.symmetric;
        cfg.channels = cell.channels;
        cfg.restarts_enabled = cell.restarts;
        cfg.seed = seed;
        auto oracle = factory();
        const OptResult res = run_greedy(cfg, pair, setup.placement, *oracle);
        if (res.trace.aborted) throw OracleError(res.trace.abort_reason);
        run.best_loss = res.best_loss;
        run.optimization_queries = res.queries;
        run.asr = attack_success_rate(corpus, res.best_patch, setup.placement, *oracle,
                                      setup.threshold, eval_pairs)
                      .asr;
        asrs.push_back(run.asr);
        losses.push_back(run.best_loss);
      } catch (const std::exception& e) {
        run.failed = true;
        run.error = e.what();
        row.failed = true;
      }
      row.runs.push_back(std::move(run));
    }
    if (!row.failed) {
      row.median_asr = median(asrs);
      row.median_best_loss = median(losses);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json ablation_to_json(std::span<const AblationRow> rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& r : row.runs) {
      nlohmann::json jr = {{"seed", r.seed},
                           {"failed", r.failed},
                           {"optimization_queries", r.optimization_queries}};
      if (r.failed) {
        jr["error"] = r.error;
      } else {
        jr["best_loss"] = r.best_loss;
        jr["asr"] = r.asr;
      }
      runs.push_back(std::move(jr));
    }
    nlohmann::json jrow = {{"label", row.cell.label()},
                           {"symmetric", row.cell.symmetric},
                           {"channels", row.cell.channels},
                           {"restarts", row.cell.restarts},
                           {"failed", row.failed},
                           {"runs", runs}};
    if (!row.failed) {
      jrow["median_asr"] = row.median_asr;
      jrow["median_best_loss"] = row.median_best_loss;
    }
    out.push_back(std::move(jrow));
  }
  return out;
}

std::vector<SweepRow> geometry_sweep(const Patch& patch, const ImagePair& pair,
                                     const Placement& placement,
                                     SimilarityOracle& oracle, const SweepSpec& spec) {
  if (patch.width() != placement.width || patch.height() != placement.height) {
    throw InvalidArgument("geometry_sweep: patch dims do not match placement");
  }
  const int w = patch.width();
  const int h = patch.height();
  PhaseScope phase(oracle, Phase::kEvaluation);
  std::vector<SweepRow> rows;
  auto score = [&](const char* kind, int k, const RegionMask& mask) {
    rows.push_back({kind, k, loss(mask_patch(patch, mask), pair, placement, oracle)});
  };
  if (spec.trim_top) {
    for (int k = 0; k <= h; ++k) score("top", k, RegionMask::trim_top(w, h, k));
  }
  if (spec.trim_bottom) {
    for (int k = 0; k <= h; ++k) score("bottom", k, RegionMask::trim_bottom(w, h, k));
  }
  for (int k : spec.center_bands) {
    if (k < 0 || k > h) throw InvalidArgument("center band taller than the patch");
    score("band", k, RegionMask::center_band(w, h, k));
  }
  return rows;
}

std::string sweep_csv(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << "mask_kind,k,loss\n";
  for (const auto& r : rows) out << r.mask_kind << ',' << r.k << ',' << format_double(r.loss) << '\n';
  return out.str();
}

nlohmann::json CurveTable::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points) {
    nlohmann::json asr = nlohmann::json::array();
    nlohmann::json loss = nlohmann::json::array();
    for (const auto& v : p.asr) asr.push_back(optional_json(v));
    for (const auto& v : p.best_loss) loss.push_back(optional_json(v));
    pts.push_back({{"queries", p.queries},
                   {"mean_asr", optional_json(p.mean_asr)},
                   {"asr", asr},
                   {"best_loss", loss}});
  }
  return {{"seeds", seeds}, {"points", pts}};
}

CurveTable queries_vs_asr(const EvalSetup& setup, const Corpus& corpus,
                          const OracleFactory& factory, int n_runs,
                          std::span<const std::int64_t> checkpoints) {
  if (n_runs < 1) throw InvalidArgument("queries_vs_asr needs at least one run");
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end())) {
    throw InvalidArgument("checkpoints must be sorted ascending");
  }
  if (!checkpoints.empty() && checkpoints.front() < 0) {
    throw InvalidArgument("checkpoints must be non-negative");
  }
  const ImagePair pair = optimization_pair(corpus, setup.selection);
  const auto eval_pairs = genuine_pairs(corpus, setup.selection);
  const std::size_t n_ck = checkpoints.size();

  CurveTable table;
  table.points.resize(n_ck);
  for (std::size_t j = 0; j < n_ck; ++j) table.points[j].queries = checkpoints[j];

  for (int r = 0; r < n_runs; ++r) {
    OptimizerConfig cfg = setup.base;
    cfg.seed = derive_seed(setup.base.seed, "curve.run", static_cast<std::uint64_t>(r));
    table.seeds.push_back(cfg.seed);

    const Patch blank(setup.placement.width, setup.placement.height, cfg.channels,
                      cfg.symmetric);
    std::vector<Patch> snap(n_ck, blank);
    std::vector<std::optional<double>> snap_loss(n_ck);
    auto observer = [&](const OptState& st, const TraceRecord& rec) {
      for (std::size_t j = 0; j < n_ck; ++j) {
        if (rec.queries <= checkpoints[j]) {
          snap[j] = st.best_patch;
          snap_loss[j] = st.best_loss;
        }
      }
    };
    auto oracle = factory();
    const OptResult res = run_greedy(cfg, pair, setup.placement, *oracle, observer);

    for (std::size_t j = 0; j < n_ck; ++j) {
      CurvePoint& pt = table.points[j];
      if (checkpoints[j] > res.queries) {
        pt.asr.emplace_back();
        pt.best_loss.emplace_back();
        continue;
      }
      pt.asr.emplace_back(attack_success_rate(corpus, snap[j], setup.placement, *oracle,
                                              setup.threshold, eval_pairs)
                              .asr);
      pt.best_loss.push_back(snap_loss[j]);
    }
  }

  for (auto& pt : table.points) {
    double sum = 0.0;
    bool all = true;
    for (const auto& v : pt.asr) {
      if (!v) {
        all = false;
        break;
      }
      sum += *v;
    }
    if (all) pt.mean_asr = sum / static_cast<double>(pt.asr.size());
  }
  return table;
}

std::string curve_csv(const CurveTable& table) {
  std::ostringstream out;
  out << "queries,mean_asr";
  for (std::size_t r = 0; r < table.seeds.size(); ++r) out << ",run" << (r + 1);
  out << '\n';
  for (const auto& pt : table.points) {
    out << pt.queries << ',';
    if (pt.mean_asr) out << format_double(*pt.mean_asr);
    for (const auto& v : pt.asr) {
      out << ',';
      if (v) out << format_double(*v);
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace gap
