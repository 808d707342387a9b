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

#include "gap/toy_oracle.hpp"

#include <cmath>

#include "gap/error.hpp"
#include "gap/rng.hpp"

namespace gap {

namespace {

// Below this norm the projected vector carries no usable direction.
constexpr double kDegenerateNorm = 1e-10;

ToyProjection build_projection() {
  ToyProjection m{};
  std::uint64_t state = kToyProjectionSeed;
  for (auto& row : m) {
    for (double& v : row) {
      const double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
      v = 2.0 * u - 1.0;
    }
    double sum = 0.0;
    for (double v : row) sum += v;
    const double mean = sum / kToyFeatureDim;
    for (double& v : row) v -= mean;
  }
  return m;
}

}  // namespace

const ToyProjection& toy_projection() {
  static const ToyProjection m = build_projection();
  return m;
}

Embedding toy_embed(const Image& image) {
  if (image.width() != kFaceSize || image.height() != kFaceSize) {
    throw InvalidArgument("toy_embed expects a 112x112 image");
  }
  const int chs = image.channels();
  const auto px = image.pixels();

  std::array<double, kToyFeatureDim> pooled{};
  for (int r = 0; r < kFaceSize; ++r) {
    const int pr = r / kToyPoolCell;
    for (int c = 0; c < kFaceSize; ++c) {
      const std::size_t base = (static_cast<std::size_t>(r) * kFaceSize + c) * chs;
      double g = px[base];
      if (chs == 3) g = (px[base] + px[base + 1] + px[base + 2]) / 3.0;
      pooled[static_cast<std::size_t>(pr * kToyPoolGrid + c / kToyPoolCell)] += g;
    }
  }
  for (double& v : pooled) v /= kToyPoolCell * kToyPoolCell;

  const ToyProjection& proj = toy_projection();
  Embedding e;
  e.values.resize(kToyEmbeddingDim);
  double norm2 = 0.0;
  for (int i = 0; i < kToyEmbeddingDim; ++i) {
    double acc = 0.0;
    for (int j = 0; j < kToyFeatureDim; ++j) acc += proj[i][j] * pooled[j];
    e.values[i] = acc;
    norm2 += acc * acc;
  }
  const double norm = std::sqrt(norm2);
  if (!(norm > kDegenerateNorm)) {
    throw DegenerateEmbedding("projected feature vector is all-zero");
  }
  for (double& v : e.values) v /= norm;
  return e;
}

double ToyOracle::do_similarity(const Image& a, const Image& b) {
  return cosine(toy_embed(a), toy_embed(b));
}

}  // namespace gap
