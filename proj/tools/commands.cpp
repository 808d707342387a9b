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

#include "commands.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <functional>
#include <map>

#include "gap/error.hpp"
#include "gap/evaluation.hpp"
#include "gap/io.hpp"
#include "gap/threshold.hpp"

namespace gap::cli {

namespace {

namespace fs = std::filesystem;

fs::path prepare_out(const RunConfig& c) {
  std::error_code ec;
  fs::create_directories(c.out_dir(), ec);
  if (ec) throw IoError("cannot create " + c.out + ": " + ec.message());
  return c.out_dir();
}

void emit(std::ostream& out, const fs::path& p) { out << "artifact: " << p.string() << '\n'; }

void write_json(const fs::path& path, const nlohmann::json& j, std::ostream& out) {
  write_text_file(path, j.dump(2) + "\n");
  emit(out, path);
}

void write_text(const fs::path& path, const std::string& text, std::ostream& out) {
  write_text_file(path, text);
  emit(out, path);
}

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

nlohmann::json ledger_json(const SimilarityOracle& o) {
  const QueryLedger& l = o.ledger();
  return {{"optimization_queries", l.queries(Phase::kOptimization)},
          {"optimization_terms", l.terms(Phase::kOptimization)},
          {"evaluation_queries", l.queries(Phase::kEvaluation)},
          {"evaluation_terms", l.terms(Phase::kEvaluation)}};
}

// The patch under test plus a description of where it came from.
struct PatchUnderTest {
  PatchDocument doc;
  nlohmann::json source;
};

PatchUnderTest resolve_patch(const RunConfig& c, const Corpus& corpus) {
  if (!c.patch.empty() && !c.baseline.empty()) {
    throw InvalidArgument("give either --patch or --baseline, not both");
  }
  if (!c.patch.empty()) {
    PatchDocument doc = read_patch_json(c.patch);
    if (!doc.placement.fits(kFaceSize, kFaceSize)) {
      throw InvalidArgument("patch placement in " + c.patch + " does not fit a 112x112 face");
    }
    return {std::move(doc), {{"kind", "file"}, {"path", c.patch}}};
  }
  const Placement pl = c.placement();
  if (c.baseline == "gray") {
    return {{gray_rectangle_patch(pl.width, pl.height), pl}, {{"kind", "gray"}}};
  }
  if (c.baseline == "noise") {
    const std::uint64_t s = derive_seed(c.seed, "baseline.noise");
    Rng rng(s);
    return {{noise_patch(rng, pl.width, pl.height), pl}, {{"kind", "noise"}, {"seed", s}}};
  }
  if (c.baseline == "graft") {
    return {{forehead_graft_patch(render_photo(corpus, c.graft_donor, 0), pl), pl},
            {{"kind", "graft"}, {"donor_identity", c.graft_donor}}};
  }
  throw InvalidArgument("this command needs --patch or --baseline");
}

VerificationThreshold calibrate(const RunConfig& c, const Corpus& corpus,
                                SimilarityOracle& oracle) {
  return calibrate_threshold(corpus, oracle, c.target_far, c.impostor_pairs, c.threshold_seed);
}

}  // namespace

int cmd_gen_corpus(const RunConfig& c, std::ostream& out) {
  const fs::path dir = prepare_out(c) / "corpus";
  const Corpus corpus = make_corpus(c);
  for (const auto& p : export_corpus(corpus, dir)) emit(out, p);
  return kExitOk;
}

int cmd_optimize(const RunConfig& c, std::ostream& out) {
  const fs::path dir = prepare_out(c);
  const Corpus corpus = make_corpus(c);
  const ImagePair pair = optimization_pair(corpus, c.selection());
  const OptimizerConfig opt = c.optimizer();
  const Placement pl = c.placement();

  auto oracle = make_oracle_factory(c)();
  const OptResult res = run_greedy(opt, pair, pl, *oracle);

  write_patch_json(dir / "patch.json", {res.best_patch, pl});
  emit(out, dir / "patch.json");
  write_png(dir / "patch.png", patch_to_image(res.best_patch));
  emit(out, dir / "patch.png");
  write_text(dir / "trace.csv", trace_csv(res.trace), out);

  const nlohmann::json report = {
      {"schema_version", kReportSchemaVersion},
      {"command", "optimize"},
      {"config", to_json(c)},
      {"optimizer", to_json(opt)},
      {"backend", oracle->backend_name()},
      {"best_loss", finite_or_null(res.best_loss)},
      {"queries", res.queries},
      {"ledger", ledger_json(*oracle)},
      {"iterations_completed", res.trace.records.size()},
      {"aborted", res.trace.aborted},
      {"abort_reason", res.trace.abort_reason},
      {"seeds", {{"root", c.seed}, {"blobs", derive_seed(c.seed, "optimizer.blobs")}}},
  };
  write_json(dir / "report.json", report, out);

  out << "best_loss " << format_double(res.best_loss) << '\n';
  out << "queries " << res.queries << '\n';
  if (res.trace.aborted) {
    out << "aborted: " << res.trace.abort_reason << '\n';
    return kExitOracle;
  }
  return kExitOk;
}

int cmd_eval(const RunConfig& c, std::ostream& out) {
  const Corpus corpus = make_corpus(c);
  const PatchUnderTest put = resolve_patch(c, corpus);
  const fs::path dir = prepare_out(c);

  auto oracle = make_oracle_factory(c)();
  const VerificationThreshold thr = calibrate(c, corpus, *oracle);
  const auto pairs = genuine_pairs(corpus, c.selection());
  EvalReport rep = attack_success_rate(corpus, put.doc.patch, put.doc.placement, *oracle,
                                       thr.threshold, pairs);
  const double misid =
      corpus_misidentification_rate(corpus, put.doc.patch, put.doc.placement, *oracle);
  rep.config = to_json(c);
  rep.seeds = {c.seed, c.threshold_seed};

  nlohmann::json j = rep.to_json();
  j["command"] = "eval";
  j["patch_source"] = put.source;
  j["calibration"] = to_json(thr);
  j["misidentification_rate"] = misid;
  j["ledger"] = ledger_json(*oracle);
  write_json(dir / "eval_report.json", j, out);

  out << "threshold " << format_double(thr.threshold) << '\n';
  out << "asr " << format_double(rep.asr) << '\n';
  out << "misidentification_rate " << format_double(misid) << '\n';
  return kExitOk;
}

int cmd_ablate(const RunConfig& c, std::ostream& out) {
  const fs::path dir = prepare_out(c);
  const Corpus corpus = make_corpus(c);
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < c.ablate_seeds; ++i) {
    seeds.push_back(derive_seed(c.seed, "ablate.seed", static_cast<std::uint64_t>(i)));
  }
  const AblationGrid grid =
      c.grid == "full" ? AblationGrid::full(seeds) : AblationGrid::single_factor(seeds);

  const OracleFactory factory = make_oracle_factory(c);
  auto calib_oracle = factory();
  const VerificationThreshold thr = calibrate(c, corpus, *calib_oracle);
  const EvalSetup setup{c.optimizer(), c.placement(), c.selection(), thr.threshold};
  const auto rows = run_ablation(grid, corpus, factory, setup);

  const nlohmann::json report = {{"schema_version", kReportSchemaVersion},
                                 {"command", "ablate"},
                                 {"config", to_json(c)},
                                 {"calibration", to_json(thr)},
                                 {"seeds", seeds},
                                 {"cells", ablation_to_json(rows)}};
  write_json(dir / "ablation.json", report, out);

  bool any_failed = false;
  for (const auto& row : rows) {
    out << row.cell.label() << ' ';
    if (row.failed) {
      out << "FAILED\n";
      any_failed = true;
    } else {
      out << "median_asr " << format_double(row.median_asr) << " median_best_loss "
          << format_double(row.median_best_loss) << '\n';
    }
  }
  return any_failed ? kExitOracle : kExitOk;
}

int cmd_sweep(const RunConfig& c, std::ostream& out) {
  if (c.patch.empty()) throw InvalidArgument("sweep needs --patch");
  const PatchDocument doc = read_patch_json(c.patch);
  const fs::path dir = prepare_out(c);
  const Corpus corpus = make_corpus(c);
  const ImagePair pair = optimization_pair(corpus, c.selection());

  SweepSpec spec;
  spec.center_bands = c.bands;
  auto oracle = make_oracle_factory(c)();
  const auto rows = geometry_sweep(doc.patch, pair, doc.placement, *oracle, spec);
  write_text(dir / "sweep.csv", sweep_csv(rows), out);
  return kExitOk;
}

int cmd_curve(const RunConfig& c, std::ostream& out) {
  const fs::path dir = prepare_out(c);
  const Corpus corpus = make_corpus(c);
  const OracleFactory factory = make_oracle_factory(c);
  auto calib_oracle = factory();
  const VerificationThreshold thr = calibrate(c, corpus, *calib_oracle);
  const EvalSetup setup{c.optimizer(), c.placement(), c.selection(), thr.threshold};
  const CurveTable table = queries_vs_asr(setup, corpus, factory, c.runs, c.checkpoints);

  write_text(dir / "curve.csv", curve_csv(table), out);
  nlohmann::json j = table.to_json();
  j["schema_version"] = kReportSchemaVersion;
  j["command"] = "curve";
  j["config"] = to_json(c);
  j["calibration"] = to_json(thr);
  write_json(dir / "curve.json", j, out);
  return kExitOk;
}

int cmd_export_png(const RunConfig& c, std::ostream& out) {
  if (c.patch.empty()) throw InvalidArgument("export-png needs --patch");
  const PatchDocument doc = read_patch_json(c.patch);
  const fs::path dir = prepare_out(c);
  const fs::path path = dir / (fs::path(c.patch).stem().string() + ".png");
  write_png(path, patch_to_image(doc.patch));
  emit(out, path);
  return kExitOk;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Greedy Gaussian-blob black-box adversarial patches", "gap"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "JSON config file; flags override its keys");

  RunConfig flags;
  std::map<std::string, CLI::Option*> options;
  for_each_field([&](const char* name, auto member, const char* help) {
    CLI::Option* opt = app.add_option(std::string("--") + name, flags.*member, help);
    opt->capture_default_str();
    using T = std::remove_reference_t<decltype(flags.*member)>;
    if constexpr (!std::is_same_v<T, std::string> && !std::is_arithmetic_v<T>) {
      opt->delimiter(',');
    }
    options[name] = opt;
  });

  using Command = std::function<int(const RunConfig&, std::ostream&)>;
  const std::vector<std::tuple<const char*, const char*, Command>> commands = {
      {"gen-corpus", "write the synthetic face corpus as PNGs plus a manifest", cmd_gen_corpus},
      {"optimize", "run the greedy blob optimizer on one photo pair", cmd_optimize},
      {"eval", "calibrate a threshold and measure attack success of a patch", cmd_eval},
      {"ablate", "optimize and evaluate over symmetry/color/restart cells", cmd_ablate},
      {"sweep", "recompute the loss under top, bottom and band masks", cmd_sweep},
      {"curve", "attack success as a function of optimization queries", cmd_curve},
      {"export-png", "render a patch JSON file as a PNG", cmd_export_png},
  };
  std::vector<std::pair<CLI::App*, Command>> subs;
  for (const auto& [name, help, fn] : commands) subs.emplace_back(app.add_subcommand(name, help), fn);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitValidation;
  }

  try {
    RunConfig cfg = config_path.empty() ? RunConfig{} : load_config_file(config_path);
    for_each_field([&](const char* name, auto member, const char*) {
      if (options.at(name)->count() > 0) cfg.*member = flags.*member;
    });
    apply_environment(cfg);
    cfg.validate();
    for (const auto& [sub, fn] : subs) {
      if (app.got_subcommand(sub)) return fn(cfg, out);
    }
    return kExitValidation;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NotFound& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const OracleError& e) {
    err << "oracle error: " << e.what() << '\n';
    return kExitOracle;
  } catch (const DegenerateEmbedding& e) {
    err << "oracle error: " << e.what() << '\n';
    return kExitOracle;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace gap::cli
