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

#include "gap/patch.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gap/error.hpp"

namespace gap {

namespace {

void check_patch_dims(int width, int height, int channels, bool symmetric) {
  if (width <= 0 || height <= 0) {
    throw InvalidArgument("patch dimensions must be positive");
  }
  if (channels != 1 && channels != 3) {
    throw InvalidArgument("patch must have 1 or 3 channels");
  }
  if (symmetric && width % 2 != 0) {
    throw InvalidArgument("symmetric patch requires an even width, got " +
                          std::to_string(width));
  }
}

std::size_t cell(int row, int col, int width, int channels, int ch) {
  return (static_cast<std::size_t>(row) * width + col) * channels + ch;
}

// Writes the column reflection of the left half onto the right half.
void mirror_left_to_right(std::vector<double>& values, int width, int height,
                          int channels) {
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width / 2; ++c) {
      for (int ch = 0; ch < channels; ++ch) {
        values[cell(r, width - 1 - c, width, channels, ch)] =
            values[cell(r, c, width, channels, ch)];
      }
    }
  }
}

}  // namespace

Patch::Patch(int width, int height, int channels, bool symmetric)
    : width_(width), height_(height), channels_(channels), symmetric_(symmetric) {
  check_patch_dims(width, height, channels, symmetric);
  values_.assign(static_cast<std::size_t>(width) * height * channels, 0.0);
}

Patch Patch::from_values(int width, int height, int channels, bool symmetric,
                         std::vector<double> values) {
  check_patch_dims(width, height, channels, symmetric);
  if (values.size() != static_cast<std::size_t>(width) * height * channels) {
    throw InvalidArgument("patch value count does not match dimensions");
  }
  for (double v : values) {
    if (!(v >= -1.0 && v <= 1.0)) {
      throw InvalidArgument("patch value outside [-1, 1]");
    }
  }
  if (symmetric) {
    for (int r = 0; r < height; ++r) {
      for (int c = 0; c < width / 2; ++c) {
        for (int ch = 0; ch < channels; ++ch) {
          if (values[cell(r, c, width, channels, ch)] !=
              values[cell(r, width - 1 - c, width, channels, ch)]) {
            throw InvalidArgument("patch flagged symmetric is not mirrored");
          }
        }
      }
    }
  }
  Patch p;
  p.width_ = width;
  p.height_ = height;
  p.channels_ = channels;
  p.symmetric_ = symmetric;
  p.values_ = std::move(values);
  return p;
}

void SamplerConfig::validate() const {
  if (!(sigma_min > 0.0)) throw InvalidArgument("sigma_min must be > 0");
  if (!(sigma_lo <= sigma_hi)) throw InvalidArgument("sigma_lo must be <= sigma_hi");
  if (!(sigma_lo >= sigma_min)) throw InvalidArgument("sigma_lo must be >= sigma_min");
  if (!(amplitude_max > 0.0)) throw InvalidArgument("amplitude_max must be > 0");
}

RegionMask::RegionMask(int width, int height, bool keep)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw InvalidArgument("mask dimensions must be positive");
  }
  keep_.assign(static_cast<std::size_t>(width) * height, keep ? 1 : 0);
}

RegionMask RegionMask::trim_top(int width, int height, int rows) {
  if (rows < 0 || rows > height) throw InvalidArgument("trim rows out of range");
  RegionMask m(width, height, true);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < width; ++c) m.set(r, c, false);
  return m;
}

RegionMask RegionMask::trim_bottom(int width, int height, int rows) {
  if (rows < 0 || rows > height) throw InvalidArgument("trim rows out of range");
  RegionMask m(width, height, true);
  for (int r = height - rows; r < height; ++r)
    for (int c = 0; c < width; ++c) m.set(r, c, false);
  return m;
}

RegionMask RegionMask::center_band(int width, int height, int rows) {
  if (rows < 0 || rows > height) throw InvalidArgument("band rows out of range");
  RegionMask m(width, height, false);
  const int first = (height - rows) / 2;
  for (int r = first; r < first + rows; ++r)
    for (int c = 0; c < width; ++c) m.set(r, c, true);
  return m;
}

BlobField render_blob(const GaussianBlob& blob, int width, int height,
                      double sigma_min) {
  if (width <= 0 || height <= 0) {
    throw InvalidArgument("render_blob: dimensions must be positive");
  }
  if (!(blob.sigma_x >= sigma_min) || !(blob.sigma_y >= sigma_min) ||
      !(sigma_min > 0.0)) {
    throw InvalidArgument("render_blob: sigma below sigma_min");
  }
  if (blob.channels != 1 && blob.channels != 3) {
    throw InvalidArgument("render_blob: blob must have 1 or 3 channels");
  }

  BlobField field;
  field.width = width;
  field.height = height;
  field.channels = blob.channels;
  field.values.resize(static_cast<std::size_t>(width) * height * blob.channels);

  const double ct = std::cos(blob.theta);
  const double st = std::sin(blob.theta);
  const double inv_x = 1.0 / (2.0 * blob.sigma_x * blob.sigma_x);
  const double inv_y = 1.0 / (2.0 * blob.sigma_y * blob.sigma_y);

  std::size_t i = 0;
  for (int r = 0; r < height; ++r) {
    const double dy = r - blob.center_y;
    for (int c = 0; c < width; ++c) {
      const double dx = c - blob.center_x;
      const double u = ct * dx + st * dy;
      const double v = -st * dx + ct * dy;
      const double shape = std::exp(-(u * u * inv_x + v * v * inv_y));
      for (int ch = 0; ch < blob.channels; ++ch) {
        field.values[i++] = blob.amplitude[ch] * shape;
      }
    }
  }
  return field;
}

Patch add_blob(const Patch& patch, const GaussianBlob& blob, double sigma_min) {
  if (patch.empty()) throw InvalidArgument("add_blob: empty patch");
  if (blob.channels != patch.channels()) {
    throw InvalidArgument("add_blob: blob/patch channel mismatch");
  }
  const int w = patch.width();
  const int h = patch.height();
  const int chs = patch.channels();
  const bool sym = patch.symmetric();
  if (sym && !(blob.center_x < w / 2)) {
    throw InvalidArgument("add_blob: blob center lies in the mirrored half");
  }

  // Only the left half is rendered in symmetric mode; it is all that is kept.
  const int render_w = sym ? w / 2 : w;
  const BlobField field = render_blob(blob, render_w, h, sigma_min);

  std::vector<double> out(patch.values().begin(), patch.values().end());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < render_w; ++c) {
      for (int ch = 0; ch < chs; ++ch) {
        double& v = out[cell(r, c, w, chs, ch)];
        v = std::clamp(v + field.at(r, c, ch), -1.0, 1.0);
      }
    }
  }
  if (sym) mirror_left_to_right(out, w, h, chs);
  return Patch::from_values(w, h, chs, sym, std::move(out));
}

Patch enforce_symmetry(const Patch& patch) {
  if (patch.width() % 2 != 0) {
    throw InvalidArgument("enforce_symmetry: odd patch width");
  }
  std::vector<double> out(patch.values().begin(), patch.values().end());
  mirror_left_to_right(out, patch.width(), patch.height(), patch.channels());
  return Patch::from_values(patch.width(), patch.height(), patch.channels(), true,
                            std::move(out));
}

Image apply_patch(const Image& image, const Patch& patch, const Placement& placement) {
  if (patch.width() != placement.width || patch.height() != placement.height) {
    throw InvalidArgument("apply_patch: patch dims do not match placement");
  }
  if (!placement.fits(image.width(), image.height())) {
    throw InvalidArgument("apply_patch: placement does not fit the image");
  }
  Image out = (patch.channels() == 3) ? image.to_rgb() : image;
  const int out_ch = out.channels();
  for (int r = 0; r < placement.height; ++r) {
    for (int c = 0; c < placement.width; ++c) {
      for (int ch = 0; ch < out_ch; ++ch) {
        const double p = patch.at(r, c, patch.channels() == 3 ? ch : 0);
        out.at(placement.top + r, placement.left + c, ch) = (p + 1.0) / 2.0;
      }
    }
  }
  return out;
}

Patch mask_patch(const Patch& patch, const RegionMask& mask) {
  if (mask.width() != patch.width() || mask.height() != patch.height()) {
    throw InvalidArgument("mask_patch: mask dims do not match patch");
  }
  std::vector<double> out(patch.values().begin(), patch.values().end());
  bool still_symmetric = patch.symmetric();
  for (int r = 0; r < patch.height(); ++r) {
    for (int c = 0; c < patch.width(); ++c) {
      if (mask.keep(r, c) != mask.keep(r, patch.width() - 1 - c)) {
        still_symmetric = false;
      }
      if (mask.keep(r, c)) continue;
      for (int ch = 0; ch < patch.channels(); ++ch) {
        out[cell(r, c, patch.width(), patch.channels(), ch)] = 0.0;
      }
    }
  }
  return Patch::from_values(patch.width(), patch.height(), patch.channels(),
                            still_symmetric, std::move(out));
}

GaussianBlob sample_blob(Rng& rng, const SamplerConfig& config, int width,
                         int height, bool symmetric, int channels) {
  config.validate();
  if (width <= 0 || height <= 0) throw InvalidArgument("sample_blob: bad dims");
  if (symmetric && width % 2 != 0) {
    throw InvalidArgument("sample_blob: symmetric mode requires even width");
  }
  if (channels != 1 && channels != 3) {
    throw InvalidArgument("sample_blob: channels must be 1 or 3");
  }
  GaussianBlob b;
  b.channels = channels;
  for (int ch = 0; ch < channels; ++ch) {
    b.amplitude[ch] = rng.uniform(-config.amplitude_max, config.amplitude_max);
  }
  b.center_x = rng.uniform(0.0, symmetric ? width / 2.0 : static_cast<double>(width));
  b.center_y = rng.uniform(0.0, static_cast<double>(height));
  b.sigma_x = rng.log_uniform(config.sigma_lo, config.sigma_hi);
  b.sigma_y = rng.log_uniform(config.sigma_lo, config.sigma_hi);
  b.theta = rng.uniform(0.0, std::numbers::pi);
  // exp(log(x)) can land one ulp outside the range.
  b.sigma_x = std::clamp(b.sigma_x, config.sigma_lo, config.sigma_hi);
  b.sigma_y = std::clamp(b.sigma_y, config.sigma_lo, config.sigma_hi);
  return b;
}

bool blob_is_valid(const GaussianBlob& blob, const SamplerConfig& config,
                   int width, int height) {
  if (!(blob.sigma_x >= config.sigma_min && blob.sigma_y >= config.sigma_min)) {
    return false;
  }
  for (int ch = 0; ch < blob.channels; ++ch) {
    if (!(std::abs(blob.amplitude[ch]) <= config.amplitude_max)) return false;
  }
  if (!(blob.theta >= 0.0 && blob.theta < std::numbers::pi)) return false;
  const double margin = 2.0 * std::max(blob.sigma_x, blob.sigma_y);
  return blob.center_x >= -margin && blob.center_x <= width + margin &&
         blob.center_y >= -margin && blob.center_y <= height + margin;
}

}  // namespace gap
