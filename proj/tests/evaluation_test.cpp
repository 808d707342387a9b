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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "gap/error.hpp"
#include "gap/evaluation.hpp"
#include "gap/threshold.hpp"
#include "gap/toy_oracle.hpp"
#include "reference_pipeline.hpp"

namespace gap {
namespace {

const Corpus& small_corpus() {
  static const Corpus c = build_corpus(1, 6, 3);
  return c;
}

class FixedOracle final : public SimilarityOracle {
 public:
  explicit FixedOracle(double score) : score_(score) {}
  std::string backend_name() const override { return "fixed"; }

 protected:
  double do_similarity(const Image&, const Image&) override { return score_; }

 private:
  double score_;
};

// Similarity falls off with the difference in mean brightness.
class MeanOracle final : public SimilarityOracle {
 public:
  std::string backend_name() const override { return "mean"; }

 protected:
  double do_similarity(const Image& a, const Image& b) override {
    return 1.0 - std::abs(mean(a) - mean(b));
  }

 private:
  static double mean(const Image& img) {
    double s = 0.0;
    for (double v : img.pixels()) s += v;
    return s / static_cast<double>(img.pixels().size());
  }
};

class DeadOracle final : public SimilarityOracle {
 public:
  std::string backend_name() const override { return "dead"; }

 protected:
  double do_similarity(const Image&, const Image&) override {
    throw TransportError("unreachable");
  }
};

Image flat(double v) { return Image(kFaceSize, kFaceSize, 1, v); }

EvalSetup tiny_setup(double threshold) {
  EvalSetup s;
  s.base.n_iters = 6;
  s.base.seed = 5;
  s.threshold = threshold;
  return s;
}

double toy_threshold() {
  ToyOracle o;
  return calibrate_threshold(small_corpus(), o, 1e-2, 1000, 1).threshold;
}

TEST(SuccessFraction, BasicCases) {
  const std::vector<double> all_below{0.1, 0.2, 0.3};
  const std::vector<double> none_below{0.6, 0.7};
  const std::vector<double> half{0.1, 0.9, 0.2, 0.8};
  EXPECT_EQ(success_fraction(all_below, 0.5), 1.0);
  EXPECT_EQ(success_fraction(none_below, 0.5), 0.0);
  EXPECT_EQ(success_fraction(half, 0.5), 0.5);
  // Equal to the threshold still verifies.
  EXPECT_EQ(success_fraction(std::vector<double>{0.5}, 0.5), 0.0);
  EXPECT_THROW(success_fraction(std::vector<double>{}, 0.5), InvalidArgument);
}

TEST(GenuinePairs, OrderedAndExcludesBothOrders) {
  const Corpus c = build_corpus(1, 20, 4);
  EXPECT_EQ(genuine_pairs(c, PairSelection{}).size(), 20u * 4 * 3 - 2);
  PairSelection keep;
  keep.exclude_optimization_pair = false;
  EXPECT_EQ(genuine_pairs(c, keep).size(), 20u * 4 * 3);
  for (const auto& p : genuine_pairs(c, PairSelection{})) {
    EXPECT_NE(p.armed_photo, p.clean_photo);
    if (p.identity == 0) {
      EXPECT_FALSE((p.armed_photo == 0 && p.clean_photo == 1) ||
                   (p.armed_photo == 1 && p.clean_photo == 0));
    }
  }
}

TEST(AttackSuccessRate, FixedScoresGiveZeroOrOne) {
  const auto pairs = genuine_pairs(small_corpus(), PairSelection{});
  const Patch p(72, 28);
  FixedOracle o(0.3);
  EXPECT_EQ(attack_success_rate(small_corpus(), p, Placement{}, o, 0.5, pairs).asr, 1.0);
  EXPECT_EQ(attack_success_rate(small_corpus(), p, Placement{}, o, 0.2, pairs).asr, 0.0);
  EXPECT_EQ(o.ledger().queries(Phase::kEvaluation), 4 * static_cast<std::int64_t>(pairs.size()));
  EXPECT_EQ(o.ledger().queries(Phase::kOptimization), 0);
}

TEST(AttackSuccessRate, MatchesReferenceScores) {
  const auto pairs = genuine_pairs(small_corpus(), PairSelection{});
  const auto photos = render_all(small_corpus());
  const auto proj = reference::projection(0x6A7C0FFEE5EEDULL);
  Rng rng(3);
  Patch patch(72, 28, 1, true);
  for (int k = 0; k < 30; ++k) patch = add_blob(patch, sample_blob(rng, {}, 72, 28, true));
  const std::vector<double> pv(patch.values().begin(), patch.values().end());
  ToyOracle o;
  const double thr = 0.9;
  const EvalReport rep = attack_success_rate(small_corpus(), patch, Placement{}, o, thr, pairs);
  int hits = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& gp = pairs[i];
    auto px = [](const Image& img) { return std::vector<double>(img.pixels().begin(), img.pixels().end()); };
    const auto clean = reference::embed(px(photos[gp.identity][gp.clean_photo]), 1, proj);
    const auto armed = reference::embed(
        reference::overlay(px(photos[gp.identity][gp.armed_photo]), pv, 8, 20, 72, 28), 1, proj);
    const double s = reference::dot(armed, clean);
    EXPECT_NEAR(rep.pairs[i].armed_similarity, s, 1e-9);
    hits += s < thr;
  }
  EXPECT_DOUBLE_EQ(rep.asr, static_cast<double>(hits) / pairs.size());
}

TEST(AttackSuccessRate, NonDecreasingInThreshold) {
  const auto pairs = genuine_pairs(small_corpus(), PairSelection{});
  Rng rng(4);
  const Patch noise = noise_patch(rng, 72, 28);
  ToyOracle o;
  double prev = 0.0;
  for (double t : {0.0, 0.5, 0.8, 0.9, 0.95, 0.99, 1.01}) {
    const double asr = attack_success_rate(small_corpus(), noise, Placement{}, o, t, pairs).asr;
    EXPECT_GE(asr, prev);
    prev = asr;
  }
  EXPECT_EQ(prev, 1.0);
}

TEST(AttackSuccessRate, RejectsEmptyAndOutOfRangePairs) {
  ToyOracle o;
  EXPECT_THROW(attack_success_rate(small_corpus(), Patch(72, 28), Placement{}, o, 0.5, {}),
               InvalidArgument);
  const GenuinePair bad[] = {{99, 0, 1}};
  EXPECT_THROW(attack_success_rate(small_corpus(), Patch(72, 28), Placement{}, o, 0.5, bad),
               NotFound);
}

TEST(Misidentification, HandBuiltCases) {
  MeanOracle o;
  const Image probes[] = {flat(0.50), flat(0.20)};
  const Image refs[] = {flat(0.45)};
  const Image distractors[] = {flat(0.52), flat(0.90)};
  // First probe sits closer to a distractor, second to its reference.
  EXPECT_DOUBLE_EQ(misidentification_rate(probes, refs, distractors, o), 0.5);
  EXPECT_EQ(misidentification_rate(probes, refs, {}, o), 0.0);
  const Image far_distractor[] = {flat(0.99)};
  EXPECT_EQ(misidentification_rate(probes, refs, far_distractor, o), 0.0);
  EXPECT_THROW(misidentification_rate(probes, {}, distractors, o), InvalidArgument);
  EXPECT_THROW(misidentification_rate({}, refs, distractors, o), InvalidArgument);
}

TEST(Misidentification, TieDoesNotCountAsMiss) {
  MeanOracle o;
  const Image probes[] = {flat(0.5)};
  const Image refs[] = {flat(0.4)};
  const Image distractors[] = {flat(0.6)};
  EXPECT_EQ(misidentification_rate(probes, refs, distractors, o), 0.0);
}

TEST(Misidentification, CorpusRateMatchesBruteForce) {
  const Corpus& c = small_corpus();
  const auto photos = render_all(c);
  const auto proj = reference::projection(0x6A7C0FFEE5EEDULL);
  const Placement pl;
  const Patch graft = forehead_graft_patch(photos[4][0], pl);
  const std::vector<double> pv(graft.values().begin(), graft.values().end());
  auto px = [](const Image& img) { return std::vector<double>(img.pixels().begin(), img.pixels().end()); };

  std::vector<std::vector<std::vector<double>>> clean(photos.size());
  for (std::size_t id = 0; id < photos.size(); ++id)
    for (const auto& img : photos[id]) clean[id].push_back(reference::embed(px(img), 1, proj));

  int missed = 0, total = 0;
  for (int id = 0; id < c.identity_count(); ++id) {
    for (int p = 0; p < c.photos_per_identity; ++p) {
      const auto probe =
          reference::embed(reference::overlay(px(photos[id][p]), pv, 8, 20, 72, 28), 1, proj);
      double best_ref = -2, best_other = -2;
      for (int q = 0; q < c.photos_per_identity; ++q)
        if (q != p) best_ref = std::max(best_ref, reference::dot(probe, clean[id][q]));
      for (int o = 0; o < c.identity_count(); ++o)
        if (o != id)
          for (const auto& e : clean[o]) best_other = std::max(best_other, reference::dot(probe, e));
      missed += best_other > best_ref;
      ++total;
    }
  }
  ToyOracle oracle;
  EXPECT_DOUBLE_EQ(corpus_misidentification_rate(c, graft, pl, oracle),
                   static_cast<double>(missed) / total);
  ToyOracle o2;
  EXPECT_EQ(corpus_misidentification_rate(c, Patch(72, 28), pl, o2), 0.0);
}

TEST(Median, OddEvenAndEmpty) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 3.0, 2.0}), 2.5);
  EXPECT_THROW(median({}), InvalidArgument);
}

TEST(AblationGrid, ShapesAndValidation) {
  EXPECT_EQ(AblationGrid::single_factor({1, 2, 3}).cells.size(), 4u);
  EXPECT_EQ(AblationGrid::full({1}).cells.size(), 8u);
  EXPECT_THROW(AblationGrid::full({}).validate(), InvalidArgument);
  AblationGrid g = AblationGrid::full({1});
  g.cells.erase(std::find(g.cells.begin(), g.cells.end(), AblationCell{}));
  EXPECT_THROW(g.validate(), InvalidArgument);
  EXPECT_EQ(AblationCell{}.label(), "symmetric+gray+restarts");
}

TEST(Ablation, DegenerateGridEqualsPlainRun) {
  const double thr = toy_threshold();
  EvalSetup setup = tiny_setup(thr);
  AblationGrid g;
  g.cells = {AblationCell{}};
  g.seeds = {11};
  const auto rows = run_ablation(g, small_corpus(), [] { return std::make_unique<ToyOracle>(); },
                                 setup);
  ASSERT_EQ(rows.size(), 1u);
  ASSERT_EQ(rows[0].runs.size(), 1u);

  OptimizerConfig cfg = setup.base;
  cfg.seed = 11;
  ToyOracle o;
  const OptResult res = run_greedy(cfg, optimization_pair(small_corpus(), setup.selection),
                                   setup.placement, o);
  const auto pairs = genuine_pairs(small_corpus(), setup.selection);
  const double asr =
      attack_success_rate(small_corpus(), res.best_patch, setup.placement, o, thr, pairs).asr;
  EXPECT_EQ(rows[0].runs[0].best_loss, res.best_loss);
  EXPECT_EQ(rows[0].runs[0].asr, asr);
  EXPECT_EQ(rows[0].median_asr, asr);
  EXPECT_EQ(rows[0].runs[0].optimization_queries, res.queries);
}

TEST(Ablation, EveryCellSpendsTheSameBudget) {
  const auto rows = run_ablation(AblationGrid::full({1, 2}), small_corpus(),
                                 [] { return std::make_unique<ToyOracle>(); },
                                 tiny_setup(toy_threshold()));
  ASSERT_EQ(rows.size(), 8u);
  for (const auto& row : rows) {
    EXPECT_FALSE(row.failed);
    for (const auto& run : row.runs) EXPECT_EQ(run.optimization_queries, 6 * 8 * 4);
  }
  const auto j = ablation_to_json(rows);
  EXPECT_EQ(j.size(), 8u);
  EXPECT_TRUE(j[0].contains("median_asr"));
}

TEST(Ablation, FailingOracleIsReportedNotDropped) {
  const auto rows = run_ablation(AblationGrid::single_factor({1, 2, 3}), small_corpus(),
                                 [] { return std::make_unique<DeadOracle>(); },
                                 tiny_setup(0.5));
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& row : rows) {
    EXPECT_TRUE(row.failed);
    ASSERT_EQ(row.runs.size(), 3u);
    EXPECT_NE(row.runs[0].error.find("unreachable"), std::string::npos);
  }
  EXPECT_FALSE(ablation_to_json(rows)[0].contains("median_asr"));
}

TEST(GeometrySweep, EndpointsMatchFullAndEmptyPatch) {
  const ImagePair pair = optimization_pair(small_corpus(), PairSelection{});
  Rng rng(9);
  Patch patch(72, 28, 1, true);
  for (int k = 0; k < 25; ++k) patch = add_blob(patch, sample_blob(rng, {}, 72, 28, true));
  ToyOracle o;
  const auto rows = geometry_sweep(patch, pair, Placement{}, o);
  ASSERT_EQ(rows.size(), 29u + 29u + 3u);
  ToyOracle ref;
  const double full = loss(patch, pair, Placement{}, ref);
  const double blank = loss(Patch(72, 28), pair, Placement{}, ref);
  EXPECT_EQ(rows.front().mask_kind, "top");
  EXPECT_EQ(rows[0].loss, full);
  EXPECT_EQ(rows[28].loss, blank);
  EXPECT_EQ(rows[29].mask_kind, "bottom");
  EXPECT_EQ(rows[29].loss, full);
  EXPECT_EQ(rows[57].loss, blank);
  EXPECT_EQ(rows[58].mask_kind, "band");
  EXPECT_EQ(rows[58].k, 4);
  EXPECT_EQ(o.ledger().queries(Phase::kEvaluation), 61 * 4);
  const std::string csv = sweep_csv(rows);
  EXPECT_EQ(csv.rfind("mask_kind,k,loss\ntop,0,", 0), 0u);
}

TEST(GeometrySweep, RejectsOversizedBand) {
  const ImagePair pair = optimization_pair(small_corpus(), PairSelection{});
  ToyOracle o;
  SweepSpec spec;
  spec.center_bands = {40};
  EXPECT_THROW(geometry_sweep(Patch(72, 28), pair, Placement{}, o, spec), InvalidArgument);
}

TEST(Curve, ZeroCheckpointIsUnpatchedBaseline) {
  const double thr = toy_threshold();
  const EvalSetup setup = tiny_setup(thr);
  const std::int64_t cks[] = {0, 64, 192, 100000};
  const CurveTable t = queries_vs_asr(setup, small_corpus(),
                                      [] { return std::make_unique<ToyOracle>(); }, 2, cks);
  ASSERT_EQ(t.points.size(), 4u);
  ToyOracle o;
  const double gray = attack_success_rate(small_corpus(), Patch(72, 28, 1, true), Placement{}, o,
                                          thr, genuine_pairs(small_corpus(), PairSelection{}))
                          .asr;
  EXPECT_EQ(*t.points[0].mean_asr, gray);
  EXPECT_FALSE(t.points[0].best_loss[0].has_value());
  EXPECT_FALSE(t.points[3].mean_asr.has_value());
  EXPECT_FALSE(t.points[3].asr[1].has_value());

  // Checkpoint 64 is the state after iteration 2 of each run.
  for (std::size_t r = 0; r < 2; ++r) {
    OptimizerConfig cfg = setup.base;
    cfg.seed = t.seeds[r];
    ToyOracle run_oracle;
    const OptResult res =
        run_greedy(cfg, optimization_pair(small_corpus(), PairSelection{}), Placement{}, run_oracle);
    EXPECT_EQ(*t.points[1].best_loss[r], res.trace.records[1].global_best_loss);
    EXPECT_EQ(*t.points[2].best_loss[r], res.trace.records[5].global_best_loss);
  }
  const std::string csv = curve_csv(t);
  EXPECT_EQ(csv.rfind("queries,mean_asr,run1,run2\n", 0), 0u);
  EXPECT_NE(csv.find("\n100000,,,\n"), std::string::npos);
}

TEST(Curve, RejectsUnsortedCheckpoints) {
  const std::int64_t cks[] = {100, 10};
  EXPECT_THROW(queries_vs_asr(tiny_setup(0.5), small_corpus(),
                              [] { return std::make_unique<ToyOracle>(); }, 1, cks),
               InvalidArgument);
}

}  // namespace
}  // namespace gap
