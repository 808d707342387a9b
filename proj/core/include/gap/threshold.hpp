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

#ifndef GAP_THRESHOLD_HPP
#define GAP_THRESHOLD_HPP

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "gap/oracle.hpp"
#include "gap/synth_faces.hpp"

namespace gap {

struct VerificationThreshold {
  double threshold = 0.0;
  double target_far = 1e-3;
  int n_impostor_pairs = 0;
  std::uint64_t seed = 0;
  std::string backend;
};

nlohmann::json to_json(const VerificationThreshold& t);

struct ImpostorPair {
  int identity_a;
  int photo_a;
  int identity_b;
  int photo_b;
};

// Uniform draws (with replacement) over photo pairs of distinct identities.
std::vector<ImpostorPair> sample_impostor_pairs(const Corpus& corpus, int n,
                                                std::uint64_t seed);

// (1 - far)-quantile: with sims sorted ascending, the element at index
// ceil((1 - far) * n) - 1, clamped to [0, n - 1]. At far = 0 this is the max.
// Consequently at most a `far` fraction of the sample lies strictly above it.
double impostor_quantile(std::vector<double> sims, double target_far);

// Scores the sampled impostor pairs in the evaluation phase.
std::vector<double> impostor_similarities(const Corpus& corpus,
                                          SimilarityOracle& oracle, int n,
                                          std::uint64_t seed);

// Requires >= 2 identities, n_impostor_pairs >= 100, target_far in [0, 1).
VerificationThreshold calibrate_threshold(const Corpus& corpus,
                                          SimilarityOracle& oracle,
                                          double target_far, int n_impostor_pairs,
                                          std::uint64_t seed);

// Fraction of sampled impostor pairs whose similarity exceeds the threshold.
double measure_far(const Corpus& corpus, SimilarityOracle& oracle, double threshold,
                   int n_pairs, std::uint64_t seed);

}  // namespace gap

#endif  // GAP_THRESHOLD_HPP
