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

#ifndef GAP_SYNTH_FACES_HPP
#define GAP_SYNTH_FACES_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "gap/image.hpp"
#include "gap/patch.hpp"
#include "gap/rng.hpp"

namespace gap {

// Upper bounds of the per-photo perturbations. Each photo draws its own
// values uniformly inside these bounds.
struct PhotoJitter {
  double brightness = 0.05;  // max |global intensity offset|
  double noise = 0.02;       // std-dev of additive per-pixel Gaussian noise
  int max_shift = 2;         // max |integer translation| per axis, pixels

  bool operator==(const PhotoJitter&) const = default;
};

// One concrete draw from PhotoJitter.
struct JitterDraw {
  int shift_x = 0;
  int shift_y = 0;
  double brightness = 0.0;
  double noise = 0.0;
  std::uint64_t noise_seed = 0;
};

struct IdentityTemplate {
  int identity_id = 0;
  Image base_field;
};

struct Corpus {
  std::uint64_t corpus_seed = 1;
  int photos_per_identity = 4;
  PhotoJitter jitter;
  std::vector<IdentityTemplate> identities;

  int identity_count() const { return static_cast<int>(identities.size()); }
};

// Smooth 112x112 field: mid-gray plus seeded broad Gaussians and a bilinearly
// upsampled coarse noise grid, clamped to [0, 1].
Image generate_identity_field(std::uint64_t corpus_seed, int identity_id);

Corpus build_corpus(std::uint64_t corpus_seed, int n_identities,
                    int photos_per_identity, const PhotoJitter& jitter = {});

JitterDraw draw_jitter(const Corpus& corpus, int identity_id, int photo_index);
// Shift (edge-replicated), then brightness, then noise; clamped to [0, 1].
Image apply_jitter(const Image& base, const JitterDraw& draw);

// Throws NotFound for ids out of range.
Image render_photo(const Corpus& corpus, int identity_id, int photo_index);

// Every photo, indexed [identity][photo].
std::vector<std::vector<Image>> render_all(const Corpus& corpus);

Patch gray_rectangle_patch(int width, int height, bool symmetric = false);
// i.i.d. uniform values in [-1, 1]; never flagged symmetric.
Patch noise_patch(Rng& rng, int width, int height);
// Values 2 x (donor region) - 1, channel-mean grayscaled.
Patch forehead_graft_patch(const Image& donor, const Placement& placement);

nlohmann::json corpus_manifest(const Corpus& corpus);
// Writes id{I}_photo{J}.png for every photo plus manifest.json. Returns the
// paths written, manifest last.
std::vector<std::filesystem::path> export_corpus(const Corpus& corpus,
                                                 const std::filesystem::path& dir);

}  // namespace gap

#endif  // GAP_SYNTH_FACES_HPP
