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

#include "run_config.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>

#include "gap/error.hpp"
#include "gap/io.hpp"
#include "gap/toy_oracle.hpp"

namespace gap::cli {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw InvalidArgument(msg);
}

}  // namespace

void RunConfig::validate() const {
  require(!out.empty(), "out must not be empty");
  require(jobs >= 1, "jobs must be >= 1");
  require(identities >= 2, "identities must be >= 2");
  require(photos >= 2, "photos must be >= 2");
  require(jitter_brightness >= 0 && jitter_noise >= 0 && jitter_shift >= 0,
          "jitter bounds must be non-negative");

  optimizer().validate();
  require(!symmetric || width % 2 == 0, "symmetric patches need an even width");
  require(placement().fits(kFaceSize, kFaceSize), "patch placement does not fit a 112x112 face");

  require(opt_identity >= 0 && opt_identity < identities, "opt-identity out of range");
  require(photo_a >= 0 && photo_a < photos && photo_b >= 0 && photo_b < photos,
          "photo-a/photo-b out of range");
  require(photo_a != photo_b, "photo-a and photo-b must differ");

  require(oracle == "toy" || oracle == "remote", "oracle must be toy or remote");
  if (oracle == "remote") {
    require(!oracle_url.empty(), "remote oracle needs oracle-url or GAP_ORACLE_URL");
    require(!cache_embeddings, "cache-embeddings needs the toy oracle");
  }
  require(timeout_ms > 0, "timeout-ms must be positive");
  throttle().validate();

  require(target_far >= 0.0 && target_far < 1.0, "target-far must lie in [0, 1)");
  require(impostor_pairs >= 100, "impostor-pairs must be >= 100");

  require(baseline.empty() || baseline == "gray" || baseline == "noise" || baseline == "graft",
          "baseline must be gray, noise or graft");
  require(graft_donor >= 0 && graft_donor < identities, "graft-donor out of range");
  for (int b : bands) require(b >= 0 && b <= height, "band taller than the patch");

  require(grid == "single" || grid == "full", "grid must be single or full");
  require(ablate_seeds >= 3, "ablate-seeds must be >= 3");

  require(runs >= 1, "runs must be >= 1");
  require(std::is_sorted(checkpoints.begin(), checkpoints.end()),
          "checkpoints must be ascending");
  require(checkpoints.empty() || checkpoints.front() >= 0, "checkpoints must be >= 0");
}

OptimizerConfig RunConfig::optimizer() const {
  OptimizerConfig o;
  o.n_iters = iters;
  o.batch_size = batch;
  o.restart_interval = restart_interval;
  o.restarts_enabled = restarts;
  o.symmetric = symmetric;
  o.channels = channels;
  o.sampler.amplitude_max = amplitude_max;
  o.sampler.sigma_lo = sigma_lo;
  o.sampler.sigma_hi = sigma_hi;
  o.sampler.sigma_min = sigma_min;
  o.seed = seed;
  o.cache_clean_embeddings = cache_embeddings;
  o.monotone_accept = monotone_accept;
  o.jobs = jobs;
  return o;
}

Placement RunConfig::placement() const { return {top, left, width, height}; }

PairSelection RunConfig::selection() const {
  return {opt_identity, photo_a, photo_b, !include_opt_pair};
}

PhotoJitter RunConfig::jitter() const {
  return {jitter_brightness, jitter_noise, jitter_shift};
}

ThrottleConfig RunConfig::throttle() const {
  ThrottleConfig t;
  t.max_qps = max_qps;
  t.max_in_flight = max_in_flight;
  t.transport_retries = transport_retries;
  t.rate_limit_retries = rate_limit_retries;
  t.timeout = std::chrono::milliseconds(timeout_ms);
  return t;
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j = nlohmann::json::object();
  for_each_field([&](const char* name, auto member, const char*) { j[name] = c.*member; });
  return j;
}

void apply_json(RunConfig& base, const nlohmann::json& doc) {
  require(doc.is_object(), "config file must hold a JSON object");
  std::set<std::string> known;
  for_each_field([&](const char* name, auto member, const char*) {
    known.insert(name);
    const auto it = doc.find(name);
    if (it == doc.end()) return;
    using T = std::remove_reference_t<decltype(base.*member)>;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        require(it->is_boolean(), std::string("config key ") + name + " must be a boolean");
      } else if constexpr (std::is_arithmetic_v<T>) {
        require(it->is_number(), std::string("config key ") + name + " must be a number");
        if constexpr (std::is_integral_v<T>) {
          require(it->is_number_integer(),
                  std::string("config key ") + name + " must be an integer");
        }
      }
      base.*member = it->template get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument(std::string("config key ") + name + ": " + e.what());
    }
  });
  for (const auto& item : doc.items()) {
    require(known.count(item.key()) != 0, "unknown config key: " + item.key());
  }
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
  const std::string text = read_text_file(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidArgument("config " + path.string() + " is not valid JSON: " + e.what());
  }
  apply_json(base, doc);
  return base;
}

void apply_environment(RunConfig& c) {
  const char* url = std::getenv(kOracleUrlEnv);
  if (url != nullptr && *url != '\0') c.oracle_url = url;
}

Corpus make_corpus(const RunConfig& c) {
  return build_corpus(c.corpus_seed, c.identities, c.photos, c.jitter());
}

OracleFactory make_oracle_factory(const RunConfig& c) {
  if (c.oracle == "remote") {
    const std::string url = c.oracle_url;
    const ThrottleConfig throttle = c.throttle();
    return [url, throttle] { return remote_similarity_client(url, throttle); };
  }
  return [] { return std::make_unique<ToyOracle>(); };
}

}  // namespace gap::cli
