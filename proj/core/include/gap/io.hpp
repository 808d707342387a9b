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

#ifndef GAP_IO_HPP
#define GAP_IO_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gap/image.hpp"
#include "gap/patch.hpp"

namespace gap {

inline constexpr int kPatchFormatVersion = 1;

// 8-bit PNG, 1 or 3 channels; pixel v maps to round(255 v).
std::vector<std::uint8_t> encode_png(const Image& image);
// Throws InvalidArgument when the bytes are not a decodable PNG.
Image decode_png(std::span<const std::uint8_t> bytes);

void write_png(const std::filesystem::path& path, const Image& image);
Image read_png(const std::filesystem::path& path);

std::string base64_encode(std::span<const std::uint8_t> bytes);
// Throws InvalidArgument on malformed input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

// Viewing/printing form of a patch: p maps to (p + 1) / 2.
Image patch_to_image(const Patch& patch);

/// Canonical on-disk patch: the values plus the placement they were
/// optimized for.
struct PatchDocument {
  Patch patch;
  Placement placement;
};

nlohmann::json patch_to_json(const PatchDocument& doc);
PatchDocument patch_from_json(const nlohmann::json& j);

void write_patch_json(const std::filesystem::path& path, const PatchDocument& doc);
// Throws NotFound when the file is missing, InvalidArgument on bad content.
PatchDocument read_patch_json(const std::filesystem::path& path);

// Writes text atomically enough for our purposes (truncate + write); throws
// IoError on failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

// Shortest decimal form that round-trips the double exactly.
std::string format_double(double v);

}  // namespace gap

#endif  // GAP_IO_HPP
