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

#include "gap/image.hpp"

#include <cmath>
#include <string>

#include "gap/error.hpp"

namespace gap {

namespace {

void check_dims(int width, int height, int channels) {
  if (width <= 0 || height <= 0) {
    throw InvalidArgument("image dimensions must be positive");
  }
  if (channels != 1 && channels != 3) {
    throw InvalidArgument("image must have 1 or 3 channels, got " +
                          std::to_string(channels));
  }
}

}  // namespace

Image::Image(int width, int height, int channels, double fill)
    : width_(width), height_(height), channels_(channels) {
  check_dims(width, height, channels);
  pixels_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Image Image::from_pixels(int width, int height, int channels,
                         std::vector<double> pixels) {
  check_dims(width, height, channels);
  if (pixels.size() != static_cast<std::size_t>(width) * height * channels) {
    throw InvalidArgument("pixel buffer size does not match image dimensions");
  }
  for (double v : pixels) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidArgument("pixel value outside [0, 1]");
    }
  }
  Image img;
  img.width_ = width;
  img.height_ = height;
  img.channels_ = channels;
  img.pixels_ = std::move(pixels);
  return img;
}

Image Image::to_grayscale() const {
  if (channels_ == 1) return *this;
  Image out(width_, height_, 1);
  for (int r = 0; r < height_; ++r) {
    for (int c = 0; c < width_; ++c) {
      out.at(r, c) = (at(r, c, 0) + at(r, c, 1) + at(r, c, 2)) / 3.0;
    }
  }
  return out;
}

Image Image::to_rgb() const {
  if (channels_ == 3) return *this;
  Image out(width_, height_, 3);
  for (int r = 0; r < height_; ++r) {
    for (int c = 0; c < width_; ++c) {
      const double v = at(r, c);
      for (int ch = 0; ch < 3; ++ch) out.at(r, c, ch) = v;
    }
  }
  return out;
}

Image quantize_8bit(const Image& image) {
  Image out = image;
  for (double& v : out.pixels()) v = std::round(v * 255.0) / 255.0;
  return out;
}

}  // namespace gap
