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

#include "gap/io.hpp"

#include <openssl/evp.h>
#include <png.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gap/error.hpp"

namespace gap {

std::vector<std::uint8_t> encode_png(const Image& image) {
  if (image.empty()) throw InvalidArgument("encode_png: empty image");
  std::vector<std::uint8_t> raw(image.pixels().size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    raw[i] = static_cast<std::uint8_t>(
        std::lround(std::clamp(image.pixels()[i], 0.0, 1.0) * 255.0));
  }

  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width());
  png.height = static_cast<png_uint_32>(image.height());
  png.format = image.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&png, nullptr, &size, 0, raw.data(), 0, nullptr)) {
    throw IoError(std::string("png encode failed: ") + png.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&png, out.data(), &size, 0, raw.data(), 0, nullptr)) {
    throw IoError(std::string("png encode failed: ") + png.message);
  }
  out.resize(size);
  return out;
}

Image decode_png(std::span<const std::uint8_t> bytes) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
    throw InvalidArgument(std::string("undecodable png: ") + png.message);
  }
  const bool color = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
  png.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int channels = color ? 3 : 1;
  std::vector<std::uint8_t> raw(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, raw.data(), 0, nullptr)) {
    png_image_free(&png);
    throw InvalidArgument(std::string("undecodable png: ") + png.message);
  }
  std::vector<double> px(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) px[i] = raw[i] / 255.0;
  return Image::from_pixels(static_cast<int>(png.width), static_cast<int>(png.height),
                            channels, std::move(px));
}

void write_png(const std::filesystem::path& path, const Image& image) {
  const auto bytes = encode_png(image);
  write_text_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                         bytes.size()));
}

Image read_png(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  return decode_png(std::span(reinterpret_cast<const std::uint8_t*>(text.data()),
                              text.size()));
}

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                bytes.data(), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw InvalidArgument("base64: length not a multiple of 4");
  std::vector<std::uint8_t> out(3 * text.size() / 4);
  const int n = EVP_DecodeBlock(out.data(),
                                reinterpret_cast<const unsigned char*>(text.data()),
                                static_cast<int>(text.size()));
  if (n < 0) throw InvalidArgument("base64: malformed input");
  // EVP_DecodeBlock keeps the padding bytes as zeros.
  std::size_t len = static_cast<std::size_t>(n);
  if (!text.empty() && text.back() == '=') --len;
  if (text.size() >= 2 && text[text.size() - 2] == '=') --len;
  out.resize(len);
  return out;
}

Image patch_to_image(const Patch& patch) {
  std::vector<double> px(patch.values().size());
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = (patch.values()[i] + 1.0) / 2.0;
  return Image::from_pixels(patch.width(), patch.height(), patch.channels(), std::move(px));
}

nlohmann::json patch_to_json(const PatchDocument& doc) {
  const Patch& p = doc.patch;
  return {
      {"format_version", kPatchFormatVersion},
      {"width", p.width()},
      {"height", p.height()},
      {"channels", p.channels()},
      {"symmetric", p.symmetric()},
      {"placement", {{"top", doc.placement.top}, {"left", doc.placement.left}}},
      {"values", std::vector<double>(p.values().begin(), p.values().end())},
  };
}

PatchDocument patch_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format_version").get<int>() != kPatchFormatVersion) {
      throw InvalidArgument("unsupported patch format_version");
    }
    const int w = j.at("width").get<int>();
    const int h = j.at("height").get<int>();
    PatchDocument doc;
    doc.patch = Patch::from_values(w, h, j.at("channels").get<int>(),
                                   j.at("symmetric").get<bool>(),
                                   j.at("values").get<std::vector<double>>());
    doc.placement.top = j.at("placement").at("top").get<int>();
    doc.placement.left = j.at("placement").at("left").get<int>();
    doc.placement.width = w;
    doc.placement.height = h;
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed patch document: ") + e.what());
  }
}

void write_patch_json(const std::filesystem::path& path, const PatchDocument& doc) {
  write_text_file(path, patch_to_json(doc).dump(1) + "\n");
}

PatchDocument read_patch_json(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("patch file " + path.string() + " is not valid JSON: " + e.what());
  }
  return patch_from_json(j);
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) throw NotFound("no such file: " + path.string());
    throw IoError("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace gap
