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

#ifndef GAP_IMAGE_HPP
#define GAP_IMAGE_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace gap {

// Aligned face crops are square with this side length.
inline constexpr int kFaceSize = 112;

/// Interleaved (row, column, channel) intensity image with values in [0, 1].
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels, double fill = 0.0);

  // Validates dimensions, buffer size and the [0, 1] range.
  static Image from_pixels(int width, int height, int channels,
                           std::vector<double> pixels);

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  bool empty() const { return pixels_.empty(); }

  double at(int row, int col, int ch = 0) const {
    return pixels_[index(row, col, ch)];
  }
  double& at(int row, int col, int ch = 0) { return pixels_[index(row, col, ch)]; }

  std::span<const double> pixels() const { return pixels_; }
  std::span<double> pixels() { return pixels_; }

  // Channel-mean grayscale copy; returns *this unchanged when already 1-ch.
  Image to_grayscale() const;
  // Replicates a single channel into three; 3-channel input is returned as is.
  Image to_rgb() const;

  bool operator==(const Image&) const = default;

 private:
  std::size_t index(int row, int col, int ch) const {
    return (static_cast<std::size_t>(row) * width_ + col) * channels_ + ch;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<double> pixels_;
};

// Rounds every pixel to the nearest 8-bit level, matching what a PNG round
// trip preserves.
Image quantize_8bit(const Image& image);

/// Fixed overlay rectangle in image coordinates.
struct Placement {
  int top = 8;
  int left = 20;
  int width = 72;
  int height = 28;

  bool fits(int image_width, int image_height) const {
    return top >= 0 && left >= 0 && width > 0 && height > 0 &&
           top + height <= image_height && left + width <= image_width;
  }
  bool operator==(const Placement&) const = default;
};

}  // namespace gap

#endif  // GAP_IMAGE_HPP
