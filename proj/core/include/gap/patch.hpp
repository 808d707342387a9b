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

#ifndef GAP_PATCH_HPP
#define GAP_PATCH_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "gap/image.hpp"
#include "gap/rng.hpp"

namespace gap {

/// Patch intensity field in [-1, 1], interleaved (row, column, channel).
///
/// A patch is immutable once built: every operation below returns a new
/// value. The two invariants (range and, when `symmetric()`, exact left/right
/// mirror) are checked by every public constructor.
class Patch {
 public:
  Patch() = default;
  // All-zero patch.
  Patch(int width, int height, int channels = 1, bool symmetric = false);

  static Patch from_values(int width, int height, int channels, bool symmetric,
                           std::vector<double> values);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool symmetric() const { return symmetric_; }
  bool empty() const { return values_.empty(); }

  double at(int row, int col, int ch = 0) const {
    return values_[(static_cast<std::size_t>(row) * width_ + col) * channels_ + ch];
  }
  std::span<const double> values() const { return values_; }

  bool operator==(const Patch&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  bool symmetric_ = false;
  std::vector<double> values_;
};

/// Rotated anisotropic Gaussian perturbation in patch-local pixel coordinates.
///
/// Grayscale blobs use `amplitude[0]` only; color blobs (channels == 3) carry
/// one amplitude per channel and share the geometry.
struct GaussianBlob {
  std::array<double, 3> amplitude{};
  int channels = 1;
  double center_x = 0.0;
  double center_y = 0.0;
  double sigma_x = 1.0;
  double sigma_y = 1.0;
  double theta = 0.0;  // radians, [0, pi)

  bool operator==(const GaussianBlob&) const = default;
};

struct SamplerConfig {
  double amplitude_max = 1.0;
  double sigma_lo = 1.5;
  double sigma_hi = 12.0;
  double sigma_min = 1.0;

  // Throws InvalidArgument on inconsistent ranges.
  void validate() const;
  bool operator==(const SamplerConfig&) const = default;
};

/// Row-major field of per-pixel deltas produced by render_blob.
struct BlobField {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<double> values;

  double at(int row, int col, int ch = 0) const {
    return values[(static_cast<std::size_t>(row) * width + col) * channels + ch];
  }
};

/// Per-cell keep/drop flags over a patch grid. Dropped cells become 0.
class RegionMask {
 public:
  RegionMask(int width, int height, bool keep);

  static RegionMask keep_all(int width, int height) { return {width, height, true}; }
  static RegionMask drop_all(int width, int height) { return {width, height, false}; }
  // Drops the first `rows` rows (toward the hairline).
  static RegionMask trim_top(int width, int height, int rows);
  // Drops the last `rows` rows (toward the brows).
  static RegionMask trim_bottom(int width, int height, int rows);
  // Keeps only a vertically centered band of `rows` rows.
  static RegionMask center_band(int width, int height, int rows);

  int width() const { return width_; }
  int height() const { return height_; }
  bool keep(int row, int col) const {
    return keep_[static_cast<std::size_t>(row) * width_ + col] != 0;
  }
  void set(int row, int col, bool keep) {
    keep_[static_cast<std::size_t>(row) * width_ + col] = keep ? 1 : 0;
  }

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> keep_;
};

// f(x, y) = a * exp(-(u^2 / (2 sx^2) + v^2 / (2 sy^2))), (u, v) being
// (x - cx, y - cy) rotated by -theta. Pixel (row, col) sits at (x=col, y=row).
BlobField render_blob(const GaussianBlob& blob, int width, int height,
                      double sigma_min = SamplerConfig{}.sigma_min);

// clamp(patch + blob, -1, 1). In symmetric mode only the left half is
// updated and then mirrored onto the right half.
Patch add_blob(const Patch& patch, const GaussianBlob& blob,
               double sigma_min = SamplerConfig{}.sigma_min);

// Copies the left half onto the right half, column-reflected. The result is
// flagged symmetric.
Patch enforce_symmetry(const Patch& patch);

// Opaque overlay: inside the placement each pixel becomes (p + 1) / 2.
// A grayscale patch is replicated across image channels; a color patch on a
// grayscale image promotes the output to three channels.
Image apply_patch(const Image& image, const Patch& patch, const Placement& placement);

Patch mask_patch(const Patch& patch, const RegionMask& mask);

GaussianBlob sample_blob(Rng& rng, const SamplerConfig& config, int width,
                         int height, bool symmetric, int channels = 1);

// True when `blob` satisfies the geometric invariants for a width x height
// patch under `config`.
bool blob_is_valid(const GaussianBlob& blob, const SamplerConfig& config,
                   int width, int height);

}  // namespace gap

#endif  // GAP_PATCH_HPP
