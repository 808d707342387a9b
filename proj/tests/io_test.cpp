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

#include <gtest/gtest.h>

#include <filesystem>

#include "gap/error.hpp"
#include "gap/io.hpp"
#include "gap/patch.hpp"

namespace gap {
namespace {

std::filesystem::path scratch(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("gap_io_test_" + name);
}

TEST(PatchJson, RoundTripIsExactForRandomPatches) {
  Rng rng(31);
  for (int i = 0; i < 50; ++i) {
    const int channels = i % 3 == 0 ? 3 : 1;
    const bool sym = i % 2 == 0;
    Patch p(72, 28, channels, sym);
    for (int k = 0; k < 20; ++k) p = add_blob(p, sample_blob(rng, {}, 72, 28, sym, channels));
    const PatchDocument doc{p, Placement{rng.uniform_int(0, 40), rng.uniform_int(0, 40), 72, 28}};
    const nlohmann::json j = nlohmann::json::parse(patch_to_json(doc).dump());
    const PatchDocument back = patch_from_json(j);
    EXPECT_EQ(back.patch, p);
    EXPECT_EQ(back.placement, doc.placement);
  }
}

TEST(PatchJson, FileRoundTrip) {
  Rng rng(2);
  const Patch p = add_blob(Patch(72, 28, 1, true), sample_blob(rng, {}, 72, 28, true));
  const auto path = scratch("patch.json");
  write_patch_json(path, {p, Placement{}});
  EXPECT_EQ(read_patch_json(path).patch, p);
  std::filesystem::remove(path);
}

TEST(PatchJson, RejectsMalformedDocuments) {
  nlohmann::json j = patch_to_json({Patch(4, 2), Placement{0, 0, 4, 2}});
  nlohmann::json bad = j;
  bad["format_version"] = 2;
  EXPECT_THROW(patch_from_json(bad), InvalidArgument);
  bad = j;
  bad.erase("values");
  EXPECT_THROW(patch_from_json(bad), InvalidArgument);
  bad = j;
  bad["values"][0] = 1.5;
  EXPECT_THROW(patch_from_json(bad), InvalidArgument);
  bad = j;
  bad["values"][0] = 0.5;
  bad["symmetric"] = true;
  EXPECT_THROW(patch_from_json(bad), InvalidArgument);
}

TEST(PatchJson, MissingFileIsNotFound) {
  EXPECT_THROW(read_patch_json(scratch("does_not_exist.json")), NotFound);
  const auto path = scratch("garbage.json");
  write_text_file(path, "{not json");
  EXPECT_THROW(read_patch_json(path), InvalidArgument);
  std::filesystem::remove(path);
}

TEST(Png, RoundTripOfQuantizedImage) {
  Rng rng(4);
  for (int channels : {1, 3}) {
    Image img(37, 11, channels);
    for (double& v : img.pixels()) v = rng.uniform();
    const Image q = quantize_8bit(img);
    EXPECT_EQ(decode_png(encode_png(img)), q);
    EXPECT_EQ(decode_png(encode_png(q)), q);
  }
}

TEST(Png, RejectsGarbage) {
  const std::vector<std::uint8_t> junk{1, 2, 3, 4, 5};
  EXPECT_THROW(decode_png(junk), InvalidArgument);
}

TEST(Png, PatchImageMapsRangeToUnit) {
  const Patch p = Patch::from_values(2, 1, 1, false, {-1.0, 1.0});
  const Image img = patch_to_image(p);
  EXPECT_EQ(img.at(0, 0), 0.0);
  EXPECT_EQ(img.at(0, 1), 1.0);
}

TEST(Base64, KnownVectors) {
  auto enc = [](std::string_view s) {
    return base64_encode(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
  };
  EXPECT_EQ(enc(""), "");
  EXPECT_EQ(enc("f"), "Zg==");
  EXPECT_EQ(enc("fo"), "Zm8=");
  EXPECT_EQ(enc("foo"), "Zm9v");
  EXPECT_EQ(enc("foobar"), "Zm9vYmFy");
}

TEST(Base64, RoundTripAllLengths) {
  Rng rng(6);
  for (std::size_t n = 0; n < 70; ++n) {
    std::vector<std::uint8_t> bytes(n);
    for (auto& b : bytes) b = static_cast<std::uint8_t>(rng.next_u64());
    EXPECT_EQ(base64_decode(base64_encode(bytes)), bytes);
  }
  EXPECT_THROW(base64_decode("abc"), InvalidArgument);
  EXPECT_THROW(base64_decode("@@@@"), InvalidArgument);
}

TEST(FormatDouble, ShortestRoundTrip) {
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

}  // namespace
}  // namespace gap
