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

#include "gap/optimizer.hpp"

#include <algorithm>
#include <future>
#include <limits>
#include <sstream>

#include "gap/error.hpp"
#include "gap/io.hpp"
#include "gap/rng.hpp"

namespace gap {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Scores every candidate; candidate i's loss lands in slot i regardless of
// which worker computed it.
std::vector<double> evaluate_batch(const std::vector<Patch>& candidates,
                                   LossEvaluator& eval, int jobs) {
  std::vector<double> losses(candidates.size());
  const int n = static_cast<int>(candidates.size());
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) losses[i] = eval(candidates[i]);
    return losses;
  }
  const int workers = std::min(jobs, n);
  std::vector<std::future<void>> futures;
  futures.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&, w] {
      for (int i = w; i < n; i += workers) losses[i] = eval(candidates[i]);
    }));
  }
  // Wait for every worker before rethrowing so none outlives `losses`.
  std::exception_ptr first_error;
  for (auto& f : futures) {
    try {
      f.get();
    } catch (...) {
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return losses;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (n_iters < 0) throw InvalidArgument("n_iters must be >= 0");
  if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  if (restarts_enabled && restart_interval < 1) {
    throw InvalidArgument("restart_interval must be >= 1 when restarts are enabled");
  }
  if (channels != 1 && channels != 3) throw InvalidArgument("channels must be 1 or 3");
  if (jobs < 1) throw InvalidArgument("jobs must be >= 1");
  sampler.validate();
}

nlohmann::json to_json(const OptimizerConfig& c) {
  return {{"n_iters", c.n_iters},
          {"batch_size", c.batch_size},
          {"restart_interval", c.restart_interval},
          {"restarts_enabled", c.restarts_enabled},
          {"symmetric", c.symmetric},
          {"channels", c.channels},
          {"seed", c.seed},
          {"cache_clean_embeddings", c.cache_clean_embeddings},
          {"monotone_accept", c.monotone_accept},
          {"sampler",
           {{"amplitude_max", c.sampler.amplitude_max},
            {"sigma_lo", c.sampler.sigma_lo},
            {"sigma_hi", c.sampler.sigma_hi},
            {"sigma_min", c.sampler.sigma_min}}}};
}

LossEvaluator::LossEvaluator(std::span<const ImagePair> pairs, const Placement& placement,
                             SimilarityOracle& oracle, bool cache_clean_embeddings)
    : pairs_(pairs), placement_(placement), oracle_(oracle), cache_(cache_clean_embeddings) {
  if (pairs_.empty()) throw InvalidArgument("loss needs at least one image pair");
  if (cache_ && !oracle_.supports_embeddings()) {
    throw InvalidArgument("clean-embedding caching needs an oracle that exposes embeddings (" +
                          oracle_.backend_name() + " does not)");
  }
}

int LossEvaluator::queries_per_candidate() const {
  return static_cast<int>(pairs_.size()) * (cache_ ? 2 : 4);
}

void LossEvaluator::ensure_clean_embeddings() {
  std::call_once(clean_once_, [this] {
    std::vector<Embedding> clean;
    for (const auto& p : pairs_) {
      clean.push_back(oracle_.embed(p.image_a));
      clean.push_back(oracle_.embed(p.image_b));
    }
    clean_ = std::move(clean);
  });
}

double LossEvaluator::operator()(const Patch& patch) {
  if (cache_) ensure_clean_embeddings();
  double total = 0.0;
  for (std::size_t k = 0; k < pairs_.size(); ++k) {
    const ImagePair& pr = pairs_[k];
    const Image armed_a = apply_patch(pr.image_a, patch, placement_);
    const Image armed_b = apply_patch(pr.image_b, patch, placement_);
    if (cache_) {
      const Embedding ea = oracle_.embed(armed_a);
      const Embedding eb = oracle_.embed(armed_b);
      total += cosine(ea, clean_[2 * k]);
      total += cosine(ea, clean_[2 * k + 1]);
      total += cosine(eb, clean_[2 * k]);
      total += cosine(eb, clean_[2 * k + 1]);
      oracle_.record_local_terms(4);
    } else {
      const ImagePairRef terms[4] = {{&armed_a, &pr.image_a},
                                     {&armed_a, &pr.image_b},
                                     {&armed_b, &pr.image_a},
                                     {&armed_b, &pr.image_b}};
      const std::vector<double> s = oracle_.similarity_batch(terms);
      total += s[0];
      total += s[1];
      total += s[2];
      total += s[3];
    }
  }
  return total;
}

double loss(const Patch& patch, const ImagePair& pair, const Placement& placement,
            SimilarityOracle& oracle) {
  LossEvaluator eval(std::span(&pair, 1), placement, oracle, false);
  return eval(patch);
}

int tie_break(std::span<const double> losses) {
  if (losses.empty()) throw InvalidArgument("tie_break: empty batch");
  int best = 0;
  for (int i = 1; i < static_cast<int>(losses.size()); ++i) {
    if (losses[i] < losses[best]) best = i;
  }
  return best;
}

OptResult run_greedy(const OptimizerConfig& config, const ImagePair& pair,
                     const Placement& placement, SimilarityOracle& oracle,
                     const IterationObserver& observer) {
  return run_greedy(config, std::span(&pair, 1), placement, oracle, observer);
}

OptResult run_greedy(const OptimizerConfig& config, std::span<const ImagePair> pairs,
                     const Placement& placement, SimilarityOracle& oracle,
                     const IterationObserver& observer) {
  config.validate();
  if (pairs.empty()) throw InvalidArgument("run_greedy needs at least one image pair");
  for (const auto& p : pairs) {
    if (!placement.fits(p.image_a.width(), p.image_a.height()) ||
        !placement.fits(p.image_b.width(), p.image_b.height())) {
      throw InvalidArgument("placement does not fit the source images");
    }
  }
  if (config.symmetric && placement.width % 2 != 0) {
    throw InvalidArgument("symmetric patches need an even placement width");
  }

  PhaseScope phase(oracle, Phase::kOptimization);
  const std::int64_t start_queries = oracle.ledger().queries(Phase::kOptimization);
  LossEvaluator eval(pairs, placement, oracle, config.cache_clean_embeddings);

  const Patch blank(placement.width, placement.height, config.channels, config.symmetric);
  OptState state{blank, blank, kInf, 0};
  double current_loss = kInf;
  OptResult result;
  Rng rng(derive_seed(config.seed, "optimizer.blobs"));

  for (int t = 1; t <= config.n_iters; ++t) {
    std::vector<Patch> candidates;
    candidates.reserve(static_cast<std::size_t>(config.batch_size));
    for (int i = 0; i < config.batch_size; ++i) {
      const GaussianBlob blob = sample_blob(rng, config.sampler, placement.width,
                                            placement.height, config.symmetric,
                                            config.channels);
      candidates.push_back(add_blob(state.current_patch, blob, config.sampler.sigma_min));
    }

    std::vector<double> losses;
    try {
      losses = evaluate_batch(candidates, eval, config.jobs);
    } catch (const OracleError& e) {
      result.trace.aborted = true;
      result.trace.abort_reason = e.what();
      break;
    }

    const int sel = tie_break(losses);
    const double batch_best = losses[static_cast<std::size_t>(sel)];
    if (!config.monotone_accept || batch_best < current_loss) {
      state.current_patch = candidates[static_cast<std::size_t>(sel)];
      current_loss = batch_best;
    }
    if (batch_best < state.best_loss) {
      state.best_loss = batch_best;
      state.best_patch = candidates[static_cast<std::size_t>(sel)];
    }

    const bool restart =
        config.restarts_enabled && t % config.restart_interval == 0 && t < config.n_iters;
    if (restart) {
      state.current_patch = blank;
      current_loss = kInf;
    }
    state.iteration = t;

    TraceRecord rec;
    rec.iteration = t;
    rec.batch_best_loss = batch_best;
    rec.global_best_loss = state.best_loss;
    rec.queries = oracle.ledger().queries(Phase::kOptimization) - start_queries;
    rec.restarted = restart;
    rec.selected = sel;
    rec.candidate_losses = std::move(losses);
    result.trace.records.push_back(std::move(rec));
    if (observer) observer(state, result.trace.records.back());
  }

  result.best_patch = state.best_patch;
  result.best_loss = state.best_loss;
  result.queries = oracle.ledger().queries(Phase::kOptimization) - start_queries;
  return result;
}

std::string trace_csv(const OptTrace& trace) {
  std::ostringstream out;
  out << "iteration,batch_best_loss,global_best_loss,queries,restarted\n";
  for (const auto& r : trace.records) {
    out << r.iteration << ',' << format_double(r.batch_best_loss) << ','
        << format_double(r.global_best_loss) << ',' << r.queries << ','
        << (r.restarted ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace gap
