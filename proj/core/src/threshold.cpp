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

#include "gap/threshold.hpp"

#include <algorithm>
#include <cmath>

#include "gap/error.hpp"
#include "gap/rng.hpp"

namespace gap {

nlohmann::json to_json(const VerificationThreshold& t) {
  return {{"threshold", t.threshold},
          {"target_far", t.target_far},
          {"n_impostor_pairs", t.n_impostor_pairs},
          {"seed", t.seed},
          {"backend", t.backend}};
}

std::vector<ImpostorPair> sample_impostor_pairs(const Corpus& corpus, int n,
                                                std::uint64_t seed) {
  const int ids = corpus.identity_count();
  if (ids < 2) throw InvalidArgument("impostor sampling needs >= 2 identities");
  const int photos = corpus.photos_per_identity;
  Rng rng(derive_seed(seed, "threshold.impostors"));
  std::vector<ImpostorPair> out;
  out.reserve(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) {
    ImpostorPair p{};
    p.identity_a = rng.uniform_int(0, ids - 1);
    // Second identity drawn from the remaining ids - 1, skipping the first.
    p.identity_b = rng.uniform_int(0, ids - 2);
    if (p.identity_b >= p.identity_a) ++p.identity_b;
    p.photo_a = rng.uniform_int(0, photos - 1);
    p.photo_b = rng.uniform_int(0, photos - 1);
    out.push_back(p);
  }
  return out;
}

double impostor_quantile(std::vector<double> sims, double target_far) {
  if (sims.empty()) throw InvalidArgument("impostor_quantile: empty sample");
  if (!(target_far >= 0.0 && target_far < 1.0)) {
    throw InvalidArgument("target_far must lie in [0, 1)");
  }
  const auto n = static_cast<long long>(sims.size());
  // Small slack so that e.g. 1e-3 * 10000 is not floored to 9.
  const auto above = static_cast<long long>(std::floor(target_far * n + 1e-9));
  const long long idx = std::clamp(n - 1 - above, 0LL, n - 1);
  std::nth_element(sims.begin(), sims.begin() + idx, sims.end());
  return sims[static_cast<std::size_t>(idx)];
}

std::vector<double> impostor_similarities(const Corpus& corpus,
                                          SimilarityOracle& oracle, int n,
                                          std::uint64_t seed) {
  const auto photos = render_all(corpus);
  const auto pairs = sample_impostor_pairs(corpus, n, seed);
  PhaseScope scope(oracle, Phase::kEvaluation);
  std::vector<double> sims;
  sims.reserve(pairs.size());
  for (const auto& p : pairs) {
    sims.push_back(oracle.similarity(photos[p.identity_a][p.photo_a],
                                     photos[p.identity_b][p.photo_b]));
  }
  return sims;
}

VerificationThreshold calibrate_threshold(const Corpus& corpus,
                                          SimilarityOracle& oracle,
                                          double target_far, int n_impostor_pairs,
                                          std::uint64_t seed) {
  if (corpus.identity_count() < 2) {
    throw InvalidArgument("calibration needs a corpus with >= 2 identities");
  }
  if (n_impostor_pairs < 100) {
    throw InvalidArgument("calibration needs >= 100 impostor pairs");
  }
  if (!(target_far >= 0.0 && target_far < 1.0)) {
    throw InvalidArgument("target_far must lie in [0, 1)");
  }
  VerificationThreshold t;
  t.threshold = impostor_quantile(
      impostor_similarities(corpus, oracle, n_impostor_pairs, seed), target_far);
  t.target_far = target_far;
  t.n_impostor_pairs = n_impostor_pairs;
  t.seed = seed;
  t.backend = oracle.backend_name();
  return t;
}

double measure_far(const Corpus& corpus, SimilarityOracle& oracle, double threshold,
                   int n_pairs, std::uint64_t seed) {
  if (n_pairs <= 0) throw InvalidArgument("measure_far: n_pairs must be positive");
  const auto sims = impostor_similarities(corpus, oracle, n_pairs, seed);
  const auto accepted = std::count_if(sims.begin(), sims.end(),
                                      [&](double s) { return s > threshold; });
  return static_cast<double>(accepted) / static_cast<double>(sims.size());
}

}  // namespace gap
