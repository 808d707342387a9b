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

#ifndef GAP_REMOTE_ORACLE_HPP
#define GAP_REMOTE_ORACLE_HPP

#include <chrono>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>

#include <nlohmann/json.hpp>

#include "gap/oracle.hpp"

namespace gap {

struct ThrottleConfig {
  // Requests per second ceiling; 0 disables throttling. When set, requests
  // are serialized and spaced at least 1 / max_qps seconds apart.
  double max_qps = 0.0;
  // Concurrent requests allowed when unthrottled.
  int max_in_flight = 4;
  // Retries after a transport failure (no HTTP response).
  int transport_retries = 3;
  // Retries after HTTP 429 before giving up with BudgetExceeded.
  int rate_limit_retries = 3;
  // First backoff delay; doubles on every retry.
  std::chrono::milliseconds backoff_initial{200};
  std::chrono::milliseconds timeout{30000};

  void validate() const;
};

/// Client for the JSON-over-HTTP similarity protocol:
///   GET  /v1/health
///   POST /v1/similarity        {"image_a", "image_b"}  -> {"similarity"}
///   POST /v1/similarity_batch  {"pairs": [...]}        -> {"similarities"}
/// Images travel as base64-encoded 8-bit PNG.
class RemoteOracle final : public SimilarityOracle {
 public:
  // Runs the health check; throws TransportError when the endpoint is down
  // and ProtocolError when it answers with something unexpected.
  RemoteOracle(std::string endpoint_url, ThrottleConfig throttle);
  ~RemoteOracle() override;

  std::string backend_name() const override { return backend_; }

 protected:
  double do_similarity(const Image& a, const Image& b) override;
  std::vector<double> do_similarity_batch(std::span<const ImagePairRef> pairs) override;

 private:
  nlohmann::json request(const std::string& method, const std::string& path,
                         const std::string& body);
  void wait_for_slot();

  std::string host_;      // scheme://host:port
  std::string prefix_;    // optional path prefix, no trailing slash
  ThrottleConfig throttle_;
  std::string backend_;

  std::mutex throttle_mu_;
  std::chrono::steady_clock::time_point next_slot_{};
  std::counting_semaphore<1024> in_flight_;
};

std::unique_ptr<SimilarityOracle> remote_similarity_client(std::string endpoint_url,
                                                           ThrottleConfig throttle = {});

// Body of a /v1/similarity request for two images.
nlohmann::json similarity_request_body(const Image& a, const Image& b);

}  // namespace gap

#endif  // GAP_REMOTE_ORACLE_HPP
