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

#include "gap/remote_oracle.hpp"

#include <httplib.h>

#include <thread>

#include "gap/error.hpp"
#include "gap/io.hpp"

namespace gap {

namespace {

std::string encode_image(const Image& img) { return base64_encode(encode_png(img)); }

double parse_score(const nlohmann::json& v) {
  if (!v.is_number()) throw ProtocolError("similarity is not a number");
  const double s = v.get<double>();
  if (!(s >= -1.0 && s <= 1.0)) {
    throw ProtocolError("similarity out of range: " + v.dump());
  }
  return s;
}

// RAII release for the in-flight semaphore.
struct SlotGuard {
  std::counting_semaphore<1024>& sem;
  explicit SlotGuard(std::counting_semaphore<1024>& s) : sem(s) { sem.acquire(); }
  ~SlotGuard() { sem.release(); }
};

}  // namespace

void ThrottleConfig::validate() const {
  if (!(max_qps >= 0.0)) throw InvalidArgument("max_qps must be >= 0");
  if (max_in_flight < 1 || max_in_flight > 1024) {
    throw InvalidArgument("max_in_flight must be in [1, 1024]");
  }
  if (transport_retries < 0 || rate_limit_retries < 0) {
    throw InvalidArgument("retry counts must be >= 0");
  }
  if (backoff_initial.count() < 0) throw InvalidArgument("backoff must be >= 0");
}

nlohmann::json similarity_request_body(const Image& a, const Image& b) {
  return {{"image_a", encode_image(a)}, {"image_b", encode_image(b)}};
}

RemoteOracle::RemoteOracle(std::string endpoint_url, ThrottleConfig throttle)
    : throttle_(throttle), in_flight_(std::max(1, throttle.max_in_flight)) {
  throttle_.validate();
  const auto scheme = endpoint_url.find("://");
  if (scheme == std::string::npos) {
    throw InvalidArgument("endpoint url must look like http://host:port");
  }
  const auto path = endpoint_url.find('/', scheme + 3);
  host_ = endpoint_url.substr(0, path);
  if (path != std::string::npos) {
    prefix_ = endpoint_url.substr(path);
    while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  }

  const nlohmann::json health = request("GET", "/v1/health", "");
  if (!health.is_object() || health.value("status", "") != "ok") {
    throw ProtocolError("health check did not report status ok");
  }
  backend_ = health.value("backend", "remote");
}

RemoteOracle::~RemoteOracle() = default;

void RemoteOracle::wait_for_slot() {
  // Caller holds throttle_mu_.
  const auto interval = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
      std::chrono::duration<double>(1.0 / throttle_.max_qps));
  const auto now = std::chrono::steady_clock::now();
  if (next_slot_ > now) std::this_thread::sleep_until(next_slot_);
  next_slot_ = std::max(now, next_slot_) + interval;
}

nlohmann::json RemoteOracle::request(const std::string& method, const std::string& path,
                                     const std::string& body) {
  std::unique_lock<std::mutex> serial(throttle_mu_, std::defer_lock);
  if (throttle_.max_qps > 0.0) serial.lock();
  SlotGuard slot(in_flight_);

  int transport_failures = 0;
  int rate_limited = 0;
  auto backoff = throttle_.backoff_initial;

  for (;;) {
    if (throttle_.max_qps > 0.0) wait_for_slot();

    httplib::Client client(host_);
    client.set_connection_timeout(throttle_.timeout);
    client.set_read_timeout(throttle_.timeout);
    client.set_write_timeout(throttle_.timeout);

    const std::string full = prefix_ + path;
    httplib::Result res = method == "GET"
                              ? client.Get(full)
                              : client.Post(full, body, "application/json");

    if (!res) {
      if (transport_failures++ < throttle_.transport_retries) {
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
        continue;
      }
      throw TransportError("request to " + host_ + full + " failed: " +
                           httplib::to_string(res.error()));
    }
    const int status = res->status;
    if (status == 429) {
      if (rate_limited++ < throttle_.rate_limit_retries) {
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
        continue;
      }
      throw BudgetExceeded("oracle kept answering 429 after " +
                           std::to_string(throttle_.rate_limit_retries) + " retries");
    }
    if (status == 500) throw OracleError("oracle backend failure (500): " + res->body);
    if (status != 200) {
      throw ProtocolError("oracle answered HTTP " + std::to_string(status) + ": " +
                          res->body);
    }
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::parse_error&) {
      throw ProtocolError("oracle response is not JSON");
    }
  }
}

double RemoteOracle::do_similarity(const Image& a, const Image& b) {
  const nlohmann::json resp =
      request("POST", "/v1/similarity", similarity_request_body(a, b).dump());
  if (!resp.is_object() || !resp.contains("similarity")) {
    throw ProtocolError("response lacks \"similarity\"");
  }
  return parse_score(resp["similarity"]);
}

std::vector<double> RemoteOracle::do_similarity_batch(std::span<const ImagePairRef> pairs) {
  nlohmann::json body;
  body["pairs"] = nlohmann::json::array();
  for (const auto& p : pairs) {
    body["pairs"].push_back(similarity_request_body(*p.first, *p.second));
  }
  const nlohmann::json resp = request("POST", "/v1/similarity_batch", body.dump());
  if (!resp.is_object() || !resp.contains("similarities") ||
      !resp["similarities"].is_array()) {
    throw ProtocolError("response lacks \"similarities\" array");
  }
  const auto& arr = resp["similarities"];
  if (arr.size() != pairs.size()) {
    throw ProtocolError("batch response length does not match request");
  }
  std::vector<double> out;
  out.reserve(arr.size());
  for (const auto& v : arr) out.push_back(parse_score(v));
  return out;
}

std::unique_ptr<SimilarityOracle> remote_similarity_client(std::string endpoint_url,
                                                           ThrottleConfig throttle) {
  return std::make_unique<RemoteOracle>(std::move(endpoint_url), throttle);
}

}  // namespace gap
