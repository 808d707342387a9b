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

#ifndef GAP_RNG_HPP
#define GAP_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>

namespace gap {

/// One step of the splitmix64 generator. Advances `state` in place.
std::uint64_t splitmix64(std::uint64_t& state);

/// Derives an independent stream seed from a root seed and a label.
///
/// Subsystems never share a stream: each one asks for
/// `derive_seed(root, "subsystem.name", index...)`, so adding a new consumer
/// never shifts the numbers an existing consumer sees.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label,
                          std::uint64_t a = 0, std::uint64_t b = 0);

/// Seeded random source.
///
/// std::mt19937_64 output is fixed by the standard; the distributions below
/// are written out by hand because the std:: distribution algorithms are
/// implementation-defined, which would break cross-platform reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Integer in [lo, hi], both inclusive. Slight modulo bias is irrelevant at
  // the ranges used here (spans far below 2^32).
  int uniform_int(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }

  // Standard normal via Box-Muller (one value per call, no caching so the
  // stream position stays a simple function of the call count).
  double normal();

  double log_uniform(double lo, double hi);

 private:
  std::mt19937_64 engine_;
};

}  // namespace gap

#endif  // GAP_RNG_HPP
