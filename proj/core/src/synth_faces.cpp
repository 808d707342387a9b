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

#include "gap/synth_faces.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "gap/error.hpp"
#include "gap/io.hpp"

namespace gap {

namespace {

constexpr int kBlobsPerIdentity = 12;
constexpr double kBlobAmplitude = 0.15;
constexpr double kBlobSigmaLo = 6.0;
constexpr double kBlobSigmaHi = 20.0;
constexpr int kCoarseGrid = 8;
constexpr double kCoarseStd = 0.05;
// Identity structure lives below the brow line; the forehead band above it
// is plain skin. Blob centers are drawn inside [kFeatureTop, kFeatureBottom].
constexpr double kFeatureTop = 44.0;
constexpr double kFeatureBottom = 108.0;
constexpr double kFeatureLeft = 8.0;
constexpr double kFeatureRight = 104.0;
// Coarse noise fades in over [kSkinFadeStart, kSkinFadeEnd] rows.
constexpr double kSkinFadeStart = 36.0;
constexpr double kSkinFadeEnd = 52.0;

void check_ids(const Corpus& corpus, int identity_id, int photo_index) {
  if (identity_id < 0 || identity_id >= corpus.identity_count()) {
    throw NotFound("identity " + std::to_string(identity_id) + " not in corpus");
  }
  if (photo_index < 0 || photo_index >= corpus.photos_per_identity) {
    throw NotFound("photo " + std::to_string(photo_index) + " not in corpus");
  }
}

}  // namespace

Image generate_identity_field(std::uint64_t corpus_seed, int identity_id) {
  Rng rng(derive_seed(corpus_seed, "synth.identity", static_cast<std::uint64_t>(identity_id)));
  std::vector<double> field(static_cast<std::size_t>(kFaceSize) * kFaceSize, 0.5);

  for (int k = 0; k < kBlobsPerIdentity; ++k) {
    const double amp = rng.uniform(-kBlobAmplitude, kBlobAmplitude);
    const double cx = rng.uniform(kFeatureLeft, kFeatureRight);
    const double cy = rng.uniform(kFeatureTop, kFeatureBottom);
    const double sigma = rng.uniform(kBlobSigmaLo, kBlobSigmaHi);
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (int r = 0; r < kFaceSize; ++r) {
      for (int c = 0; c < kFaceSize; ++c) {
        const double dx = c - cx;
        const double dy = r - cy;
        field[static_cast<std::size_t>(r) * kFaceSize + c] +=
            amp * std::exp(-(dx * dx + dy * dy) * inv);
      }
    }
  }

  // Coarse (kCoarseGrid + 1)^2 lattice spanning the image, bilinear in between.
  std::array<std::array<double, kCoarseGrid + 1>, kCoarseGrid + 1> grid{};
  for (auto& row : grid)
    for (double& v : row) v = kCoarseStd * rng.normal();
  const double step = static_cast<double>(kFaceSize - 1) / kCoarseGrid;
  for (int r = 0; r < kFaceSize; ++r) {
    const double gy = r / step;
    const int y0 = std::min(static_cast<int>(gy), kCoarseGrid - 1);
    const double fy = gy - y0;
    const double fade =
        std::clamp((r - kSkinFadeStart) / (kSkinFadeEnd - kSkinFadeStart), 0.0, 1.0);
    for (int c = 0; c < kFaceSize; ++c) {
      const double gx = c / step;
      const int x0 = std::min(static_cast<int>(gx), kCoarseGrid - 1);
      const double fx = gx - x0;
      const double top = grid[y0][x0] * (1 - fx) + grid[y0][x0 + 1] * fx;
      const double bot = grid[y0 + 1][x0] * (1 - fx) + grid[y0 + 1][x0 + 1] * fx;
      field[static_cast<std::size_t>(r) * kFaceSize + c] += fade * (top * (1 - fy) + bot * fy);
    }
  }

  for (double& v : field) v = std::clamp(v, 0.0, 1.0);
  return Image::from_pixels(kFaceSize, kFaceSize, 1, std::move(field));
}

Corpus build_corpus(std::uint64_t corpus_seed, int n_identities,
                    int photos_per_identity, const PhotoJitter& jitter) {
  if (n_identities < 2) throw InvalidArgument("corpus needs at least 2 identities");
  if (photos_per_identity < 2) {
    throw InvalidArgument("corpus needs at least 2 photos per identity");
  }
  if (jitter.brightness < 0 || jitter.noise < 0 || jitter.max_shift < 0) {
    throw InvalidArgument("jitter bounds must be non-negative");
  }
  Corpus corpus;
  corpus.corpus_seed = corpus_seed;
  corpus.photos_per_identity = photos_per_identity;
  corpus.jitter = jitter;
  corpus.identities.reserve(static_cast<std::size_t>(n_identities));
  for (int id = 0; id < n_identities; ++id) {
    corpus.identities.push_back({id, generate_identity_field(corpus_seed, id)});
  }
  return corpus;
}

JitterDraw draw_jitter(const Corpus& corpus, int identity_id, int photo_index) {
  check_ids(corpus, identity_id, photo_index);
  Rng rng(derive_seed(corpus.corpus_seed, "synth.photo",
                      static_cast<std::uint64_t>(identity_id),
                      static_cast<std::uint64_t>(photo_index)));
  const PhotoJitter& j = corpus.jitter;
  JitterDraw d;
  d.shift_x = rng.uniform_int(-j.max_shift, j.max_shift);
  d.shift_y = rng.uniform_int(-j.max_shift, j.max_shift);
  d.brightness = rng.uniform(-j.brightness, j.brightness);
  d.noise = j.noise;
  d.noise_seed = rng.next_u64();
  return d;
}

Image apply_jitter(const Image& base, const JitterDraw& draw) {
  const int w = base.width();
  const int h = base.height();
  const int chs = base.channels();
  Image out(w, h, chs);
  Rng noise_rng(draw.noise_seed);
  for (int r = 0; r < h; ++r) {
    const int sr = std::clamp(r - draw.shift_y, 0, h - 1);
    for (int c = 0; c < w; ++c) {
      const int sc = std::clamp(c - draw.shift_x, 0, w - 1);
      for (int ch = 0; ch < chs; ++ch) {
        double v = base.at(sr, sc, ch) + draw.brightness;
        if (draw.noise > 0.0) v += draw.noise * noise_rng.normal();
        out.at(r, c, ch) = std::clamp(v, 0.0, 1.0);
      }
    }
  }
  return out;
}

Image render_photo(const Corpus& corpus, int identity_id, int photo_index) {
  const JitterDraw draw = draw_jitter(corpus, identity_id, photo_index);
  return apply_jitter(corpus.identities[static_cast<std::size_t>(identity_id)].base_field,
                      draw);
}

std::vector<std::vector<Image>> render_all(const Corpus& corpus) {
  std::vector<std::vector<Image>> out(static_cast<std::size_t>(corpus.identity_count()));
  for (int id = 0; id < corpus.identity_count(); ++id) {
    for (int p = 0; p < corpus.photos_per_identity; ++p) {
      out[static_cast<std::size_t>(id)].push_back(render_photo(corpus, id, p));
    }
  }
  return out;
}

Patch gray_rectangle_patch(int width, int height, bool symmetric) {
  return Patch(width, height, 1, symmetric);
}

Patch noise_patch(Rng& rng, int width, int height) {
  if (width <= 0 || height <= 0) throw InvalidArgument("noise_patch: bad dims");
  std::vector<double> v(static_cast<std::size_t>(width) * height);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return Patch::from_values(width, height, 1, false, std::move(v));
}

Patch forehead_graft_patch(const Image& donor, const Placement& placement) {
  if (!placement.fits(donor.width(), donor.height())) {
    throw InvalidArgument("forehead_graft_patch: placement does not fit donor");
  }
  const Image gray = donor.to_grayscale();
  std::vector<double> v(static_cast<std::size_t>(placement.width) * placement.height);
  std::size_t i = 0;
  for (int r = 0; r < placement.height; ++r) {
    for (int c = 0; c < placement.width; ++c) {
      v[i++] = std::clamp(2.0 * gray.at(placement.top + r, placement.left + c) - 1.0,
                          -1.0, 1.0);
    }
  }
  return Patch::from_values(placement.width, placement.height, 1, false, std::move(v));
}

nlohmann::json corpus_manifest(const Corpus& corpus) {
  return {
      {"schema_version", 1},
      {"corpus_seed", corpus.corpus_seed},
      {"n_identities", corpus.identity_count()},
      {"photos_per_identity", corpus.photos_per_identity},
      {"image_size", kFaceSize},
      {"channels", 1},
      {"jitter",
       {{"brightness", corpus.jitter.brightness},
        {"noise", corpus.jitter.noise},
        {"max_shift", corpus.jitter.max_shift}}},
      {"file_pattern", "id{I}_photo{J}.png"},
  };
}

std::vector<std::filesystem::path> export_corpus(const Corpus& corpus,
                                                 const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  for (int id = 0; id < corpus.identity_count(); ++id) {
    for (int p = 0; p < corpus.photos_per_identity; ++p) {
      auto path = dir / ("id" + std::to_string(id) + "_photo" + std::to_string(p) + ".png");
      write_png(path, render_photo(corpus, id, p));
      written.push_back(std::move(path));
    }
  }
  auto manifest = dir / "manifest.json";
  write_text_file(manifest, corpus_manifest(corpus).dump(2) + "\n");
  written.push_back(std::move(manifest));
  return written;
}

}  // namespace gap
