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

#ifndef GAP_OPTIMIZER_HPP
#define GAP_OPTIMIZER_HPP

#include <cstdint>
#include <functional>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gap/image.hpp"
#include "gap/oracle.hpp"
#include "gap/patch.hpp"

namespace gap {

struct OptimizerConfig {
  int n_iters = 625;
  int batch_size = 8;
  int restart_interval = 50;
  bool restarts_enabled = true;
  SamplerConfig sampler;
  bool symmetric = true;
  int channels = 1;
  std::uint64_t seed = 0;
  // Embed the unpatched images once and score candidates locally. Needs an
  // oracle that exposes embeddings.
  bool cache_clean_embeddings = false;
  // Only move the working patch when the batch best improves on it. Off by
  // default: the working patch always moves to the batch best.
  bool monotone_accept = false;
  // Concurrent candidate evaluations. Results do not depend on this.
  int jobs = 1;

  void validate() const;
};

nlohmann::json to_json(const OptimizerConfig& c);

/// Two photos of one identity.
struct ImagePair {
  Image image_a;
  Image image_b;
};

struct TraceRecord {
  int iteration = 0;  // 1-based
  double batch_best_loss = 0.0;
  double global_best_loss = 0.0;
  std::int64_t queries = 0;  // optimization queries spent so far in this run
  bool restarted = false;
  int selected = 0;  // tie-broken argmin of candidate_losses
  std::vector<double> candidate_losses;
};

struct OptTrace {
  std::vector<TraceRecord> records;
  bool aborted = false;
  std::string abort_reason;
};

struct OptState {
  Patch current_patch;
  Patch best_patch;
  double best_loss = 0.0;
  int iteration = 0;
};

struct OptResult {
  Patch best_patch;
  double best_loss = 0.0;  // +inf when no iteration completed
  OptTrace trace;
  std::int64_t queries = 0;
};

// Called after every completed iteration, after any restart took effect.
using IterationObserver = std::function<void(const OptState&, const TraceRecord&)>;

/// Sum over x, y in {A, B} of sim(Apply(I_x, P), I_y), summed across all
/// configured pairs.
///
/// Uncached, each pair costs four similarity queries. Cached, the clean
/// images are embedded once (lazily, on first use) and each pair then costs
/// two embedding queries, the four terms being scored locally.
class LossEvaluator {
 public:
  LossEvaluator(std::span<const ImagePair> pairs, const Placement& placement,
                SimilarityOracle& oracle, bool cache_clean_embeddings = false);

  // Safe to call concurrently.
  double operator()(const Patch& patch);

  int queries_per_candidate() const;

 private:
  void ensure_clean_embeddings();

  std::span<const ImagePair> pairs_;
  Placement placement_;
  SimilarityOracle& oracle_;
  bool cache_;
  std::once_flag clean_once_;
  std::vector<Embedding> clean_;  // [2 * pair + {0: A, 1: B}]
};

double loss(const Patch& patch, const ImagePair& pair, const Placement& placement,
            SimilarityOracle& oracle);

// Lowest index among the minimal losses. Throws InvalidArgument when empty.
int tie_break(std::span<const double> losses);

OptResult run_greedy(const OptimizerConfig& config, const ImagePair& pair,
                     const Placement& placement, SimilarityOracle& oracle,
                     const IterationObserver& observer = {});

// Multi-identity variant: the loss sums over every pair.
OptResult run_greedy(const OptimizerConfig& config, std::span<const ImagePair> pairs,
                     const Placement& placement, SimilarityOracle& oracle,
                     const IterationObserver& observer = {});

// iteration,batch_best_loss,global_best_loss,queries,restarted
std::string trace_csv(const OptTrace& trace);

}  // namespace gap

#endif  // GAP_OPTIMIZER_HPP
