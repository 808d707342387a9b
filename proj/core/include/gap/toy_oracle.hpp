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

#ifndef GAP_TOY_ORACLE_HPP
#define GAP_TOY_ORACLE_HPP

#include <array>
#include <cstdint>
#include <string>

#include "gap/oracle.hpp"

namespace gap {

/// Desk-scale stand-in for a face-recognition embedder.
///
/// Pipeline: channel-mean grayscale, 7x7 average pooling down to 16x16,
/// flatten (row-major, 256 features), multiply by a fixed 64x256 projection,
/// L2-normalize.
///
/// The projection is reproducible in any language: with a splitmix64 state
/// initialized to kToyProjectionSeed, row-major entry (i, j) takes the next
/// output z and becomes 2 * ((z >> 11) * 2^-53) - 1; afterwards each row has
/// its arithmetic mean (left-to-right sum / 256) subtracted. Zero-sum rows
/// make the embedding invariant to a global brightness offset.
inline constexpr std::uint64_t kToyProjectionSeed = 0x6A7C0FFEE5EEDULL;
inline constexpr int kToyPoolGrid = 16;
inline constexpr int kToyPoolCell = kFaceSize / kToyPoolGrid;  // 7
inline constexpr int kToyFeatureDim = kToyPoolGrid * kToyPoolGrid;  // 256
inline constexpr int kToyEmbeddingDim = 64;

using ToyProjection = std::array<std::array<double, kToyFeatureDim>, kToyEmbeddingDim>;

const ToyProjection& toy_projection();

// Throws InvalidArgument for non-112x112 input and DegenerateEmbedding when
// the projected vector has (numerically) zero norm.
Embedding toy_embed(const Image& image);

class ToyOracle final : public SimilarityOracle {
 public:
  std::string backend_name() const override { return "toy"; }
  bool supports_embeddings() const override { return true; }

 protected:
  double do_similarity(const Image& a, const Image& b) override;
  Embedding do_embed(const Image& image) override { return toy_embed(image); }
};

}  // namespace gap

#endif  // GAP_TOY_ORACLE_HPP
