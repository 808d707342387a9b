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

#ifndef GAP_EVALUATION_HPP
#define GAP_EVALUATION_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gap/optimizer.hpp"
#include "gap/oracle.hpp"
#include "gap/patch.hpp"
#include "gap/synth_faces.hpp"

namespace gap {

inline constexpr int kReportSchemaVersion = 1;

/// Which photos of which identity the patch was optimized on, and whether
/// evaluation should skip that pair.
struct PairSelection {
  int opt_identity = 0;
  int opt_photo_a = 0;
  int opt_photo_b = 1;
  bool exclude_optimization_pair = true;

  nlohmann::json to_json() const;
};

// The optimization pair drawn from the corpus. Throws NotFound on bad ids.
ImagePair optimization_pair(const Corpus& corpus, const PairSelection& sel);

struct GenuinePair {
  int identity;
  int armed_photo;
  int clean_photo;
};

// Ordered photo pairs (armed != clean) of every identity. With exclusion on,
// both orderings of the optimization pair are skipped.
std::vector<GenuinePair> genuine_pairs(const Corpus& corpus, const PairSelection& sel);

struct PairScore {
  GenuinePair pair;
  double clean_similarity;
  double armed_similarity;
  bool success;  // armed_similarity < threshold
};

struct EvalReport {
  nlohmann::json config;
  std::vector<PairScore> pairs;
  double asr = 0.0;
  double threshold = 0.0;
  std::int64_t queries = 0;  // evaluation queries this report spent
  std::vector<std::uint64_t> seeds;

  nlohmann::json to_json() const;
};

// Success iff sim < threshold. Throws InvalidArgument when empty.
double success_fraction(std::span<const double> armed_similarities, double threshold);

EvalReport attack_success_rate(const Corpus& corpus, const Patch& patch,
                               const Placement& placement, SimilarityOracle& oracle,
                               double threshold, std::span<const GenuinePair> pairs);

/// Fraction of probes whose best distractor similarity beats their best
/// reference similarity. An empty distractor set never wins.
double misidentification_rate(std::span<const Image> probes,
                              std::span<const Image> subject_references,
                              std::span<const Image> distractors,
                              SimilarityOracle& oracle);

// Every photo of every identity becomes an armed probe; references are that
// identity's other clean photos, distractors all other identities' photos.
double corpus_misidentification_rate(const Corpus& corpus, const Patch& patch,
                                     const Placement& placement,
                                     SimilarityOracle& oracle);

// ---------------------------------------------------------------------------
// Ablations over {symmetry, color, restarts}.

struct AblationCell {
  bool symmetric = true;
  int channels = 1;
  bool restarts = true;

  std::string label() const;
  bool operator==(const AblationCell&) const = default;
};

struct AblationGrid {
  std::vector<AblationCell> cells;
  std::vector<std::uint64_t> seeds;

  // Default cell plus each single-factor flip.
  static AblationGrid single_factor(std::vector<std::uint64_t> seeds);
  // All eight combinations.
  static AblationGrid full(std::vector<std::uint64_t> seeds);

  // The default cell must be present and there must be at least one seed.
  void validate() const;
};

struct AblationRun {
  std::uint64_t seed = 0;
  double best_loss = 0.0;
  double asr = 0.0;
  std::int64_t optimization_queries = 0;
  bool failed = false;
  std::string error;
};

struct AblationRow {
  AblationCell cell;
  std::vector<AblationRun> runs;
  double median_asr = 0.0;
  double median_best_loss = 0.0;
  bool failed = false;
};

struct EvalSetup {
  OptimizerConfig base;  // n_iters, batch and sampler are shared by all cells
  Placement placement;
  PairSelection selection;
  double threshold = 0.0;
};

// Each (cell, seed) run gets a fresh oracle from `factory`.
std::vector<AblationRow> run_ablation(const AblationGrid& grid, const Corpus& corpus,
                                      const OracleFactory& factory,
                                      const EvalSetup& setup);

nlohmann::json ablation_to_json(std::span<const AblationRow> rows);

// Median with the mean-of-middles convention for even sizes.
double median(std::vector<double> values);

// ---------------------------------------------------------------------------
// Geometry sweep.

struct SweepSpec {
  bool trim_top = true;
  bool trim_bottom = true;
  std::vector<int> center_bands{4, 8, 12};
};

struct SweepRow {
  std::string mask_kind;  // "top", "bottom" or "band"
  int k;
  double loss;
};

std::vector<SweepRow> geometry_sweep(const Patch& patch, const ImagePair& pair,
                                     const Placement& placement,
                                     SimilarityOracle& oracle, const SweepSpec& spec = {});

// mask_kind,k,loss
std::string sweep_csv(std::span<const SweepRow> rows);

// ---------------------------------------------------------------------------
// Attack success as a function of optimization queries.

struct CurvePoint {
  std::int64_t queries = 0;
  // nullopt where the run's budget never reached the checkpoint.
  std::vector<std::optional<double>> asr;
  std::vector<std::optional<double>> best_loss;
  std::optional<double> mean_asr;
};

struct CurveTable {
  std::vector<std::uint64_t> seeds;
  std::vector<CurvePoint> points;

  nlohmann::json to_json() const;
};

// Checkpoints must be sorted ascending. For every checkpoint c the snapshot
// is the best patch after the last iteration whose cumulative query count is
// <= c (the zero patch before the first iteration).
CurveTable queries_vs_asr(const EvalSetup& setup, const Corpus& corpus,
                          const OracleFactory& factory, int n_runs,
                          std::span<const std::int64_t> checkpoints);

// queries,mean_asr,run1..runN
std::string curve_csv(const CurveTable& table);

}  // namespace gap

#endif  // GAP_EVALUATION_HPP
