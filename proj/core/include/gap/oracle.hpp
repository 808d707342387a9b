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

#ifndef GAP_ORACLE_HPP
#define GAP_ORACLE_HPP

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "gap/image.hpp"

namespace gap {

enum class Phase { kOptimization = 0, kEvaluation = 1 };

const char* phase_name(Phase phase);

/// Monotone count of what the attacker has spent.
///
/// `queries` is what the oracle was actually asked (one per similarity score
/// or per embedding request). `terms` is the number of similarity values the
/// caller consumed; it differs from `queries` only when clean-image
/// embeddings are cached.
class QueryLedger {
 public:
  void record_queries(Phase phase, std::int64_t n) {
    queries_[static_cast<int>(phase)].fetch_add(n, std::memory_order_relaxed);
  }
  void record_terms(Phase phase, std::int64_t n) {
    terms_[static_cast<int>(phase)].fetch_add(n, std::memory_order_relaxed);
  }

  std::int64_t queries(Phase phase) const {
    return queries_[static_cast<int>(phase)].load(std::memory_order_relaxed);
  }
  std::int64_t terms(Phase phase) const {
    return terms_[static_cast<int>(phase)].load(std::memory_order_relaxed);
  }
  std::int64_t total_queries() const {
    return queries(Phase::kOptimization) + queries(Phase::kEvaluation);
  }

 private:
  std::atomic<std::int64_t> queries_[2] = {0, 0};
  std::atomic<std::int64_t> terms_[2] = {0, 0};
};

/// Unit-norm feature vector.
struct Embedding {
  std::vector<double> values;
};

// Dot product of two unit-norm embeddings, clamped to [-1, 1] to absorb
// rounding. Throws InvalidArgument on dimension mismatch.
double cosine(const Embedding& a, const Embedding& b);

struct ImagePairRef {
  const Image* first;
  const Image* second;
};

/// Black-box similarity contract: two images in, one cosine score out.
///
/// Every returned score is counted in the ledger under the current phase.
/// Implementations must be safe for concurrent calls.
class SimilarityOracle {
 public:
  virtual ~SimilarityOracle() = default;

  double similarity(const Image& a, const Image& b);
  std::vector<double> similarity_batch(std::span<const ImagePairRef> pairs);

  const QueryLedger& ledger() const { return ledger_; }
  std::int64_t queries_used() const { return ledger_.total_queries(); }

  Phase phase() const { return phase_.load(std::memory_order_relaxed); }
  void set_phase(Phase phase) { phase_.store(phase, std::memory_order_relaxed); }

  virtual std::string backend_name() const = 0;

  // Oracles that can hand out embeddings allow clean-image caching.
  virtual bool supports_embeddings() const { return false; }
  // Counted as one query. Throws ProtocolError when unsupported.
  Embedding embed(const Image& image);
  // Similarity terms the caller scored locally from cached embeddings.
  void record_local_terms(std::int64_t n) { ledger_.record_terms(phase(), n); }

 protected:
  virtual double do_similarity(const Image& a, const Image& b) = 0;
  virtual std::vector<double> do_similarity_batch(std::span<const ImagePairRef> pairs);
  virtual Embedding do_embed(const Image& image);

  QueryLedger& mutable_ledger() { return ledger_; }

 private:
  QueryLedger ledger_;
  std::atomic<Phase> phase_{Phase::kOptimization};
};

/// Switches an oracle's phase for a scope and restores it afterwards.
class PhaseScope {
 public:
  PhaseScope(SimilarityOracle& oracle, Phase phase)
      : oracle_(oracle), saved_(oracle.phase()) {
    oracle_.set_phase(phase);
  }
  ~PhaseScope() { oracle_.set_phase(saved_); }
  PhaseScope(const PhaseScope&) = delete;
  PhaseScope& operator=(const PhaseScope&) = delete;

 private:
  SimilarityOracle& oracle_;
  Phase saved_;
};

// Builds a fresh oracle (fresh ledger) per independent run.
using OracleFactory = std::function<std::unique_ptr<SimilarityOracle>()>;

}  // namespace gap

#endif  // GAP_ORACLE_HPP
