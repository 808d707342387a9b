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

#include "gap/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "gap/error.hpp"

namespace gap {

namespace {

double checked_score(double s) {
  if (!(s >= -1.0 && s <= 1.0)) {
    throw ProtocolError("similarity score outside [-1, 1]: " + std::to_string(s));
  }
  return s;
}

}  // namespace

const char* phase_name(Phase phase) {
  return phase == Phase::kOptimization ? "optimization" : "evaluation";
}

double cosine(const Embedding& a, const Embedding& b) {
  if (a.values.size() != b.values.size()) {
    throw InvalidArgument("cosine: embedding dimensions differ");
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) dot += a.values[i] * b.values[i];
  return std::clamp(dot, -1.0, 1.0);
}

double SimilarityOracle::similarity(const Image& a, const Image& b) {
  const double s = checked_score(do_similarity(a, b));
  const Phase p = phase();
  ledger_.record_queries(p, 1);
  ledger_.record_terms(p, 1);
  return s;
}

std::vector<double> SimilarityOracle::similarity_batch(std::span<const ImagePairRef> pairs) {
  if (pairs.empty()) return {};
  std::vector<double> scores = do_similarity_batch(pairs);
  if (scores.size() != pairs.size()) {
    throw ProtocolError("batch returned " + std::to_string(scores.size()) +
                        " scores for " + std::to_string(pairs.size()) + " pairs");
  }
  for (double s : scores) checked_score(s);
  const Phase p = phase();
  const auto n = static_cast<std::int64_t>(scores.size());
  ledger_.record_queries(p, n);
  ledger_.record_terms(p, n);
  return scores;
}

Embedding SimilarityOracle::embed(const Image& image) {
  Embedding e = do_embed(image);
  ledger_.record_queries(phase(), 1);
  return e;
}

std::vector<double> SimilarityOracle::do_similarity_batch(
    std::span<const ImagePairRef> pairs) {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& pr : pairs) out.push_back(do_similarity(*pr.first, *pr.second));
  return out;
}

Embedding SimilarityOracle::do_embed(const Image&) {
  throw ProtocolError(backend_name() + " oracle does not expose embeddings");
}

}  // namespace gap
