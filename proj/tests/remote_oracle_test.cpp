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
#include <httplib.h>

#include <atomic>
#include <chrono>
#include <thread>

#include "gap/error.hpp"
#include "gap/io.hpp"
#include "gap/remote_oracle.hpp"
#include "gap/synth_faces.hpp"
#include "gap/toy_oracle.hpp"
#include "mock_server.hpp"

namespace gap {
namespace {

using test_support::decode_field;
using test_support::MockServer;

ThrottleConfig fast_retries() {
  ThrottleConfig t;
  t.backoff_initial = std::chrono::milliseconds(1);
  return t;
}

TEST(RemoteOracle, HealthCheckSetsBackendName) {
  MockServer server;
  RemoteOracle o(server.url(), fast_retries());
  EXPECT_EQ(o.backend_name(), "mock-toy");
  EXPECT_EQ(o.queries_used(), 0);
}

TEST(RemoteOracle, UnhealthyEndpointIsProtocolError) {
  MockServer server;
  server.set_mode(MockServer::Mode::kBadHealth);
  EXPECT_THROW(RemoteOracle(server.url(), fast_retries()), ProtocolError);
}

TEST(RemoteOracle, UnreachableEndpointIsTransportError) {
  int port;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  ThrottleConfig t = fast_retries();
  t.timeout = std::chrono::milliseconds(200);
  EXPECT_THROW(RemoteOracle("http://127.0.0.1:" + std::to_string(port), t), TransportError);
}

TEST(RemoteOracle, RejectsUrlWithoutScheme) {
  EXPECT_THROW(RemoteOracle("localhost:1234", fast_retries()), InvalidArgument);
}

TEST(RemoteOracle, AgreesWithInProcessToyOnQuantizedImages) {
  MockServer server;
  RemoteOracle remote(server.url(), fast_retries());
  ToyOracle local;
  const Corpus c = build_corpus(1, 10, 4);
  const auto photos = render_all(c);
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    const Image& a = photos[rng.uniform_int(0, 9)][rng.uniform_int(0, 3)];
    const Image& b = photos[rng.uniform_int(0, 9)][rng.uniform_int(0, 3)];
    EXPECT_NEAR(remote.similarity(a, b),
                local.similarity(quantize_8bit(a), quantize_8bit(b)), 1e-6);
  }
  EXPECT_EQ(remote.queries_used(), 50);
}

TEST(RemoteOracle, BatchPreservesOrder) {
  MockServer server;
  RemoteOracle remote(server.url(), fast_retries());
  ToyOracle local;
  const Corpus c = build_corpus(2, 4, 2);
  const auto photos = render_all(c);
  std::vector<Image> q;
  for (const auto& ps : photos)
    for (const Image& img : ps) q.push_back(quantize_8bit(img));
  std::vector<ImagePairRef> pairs;
  for (std::size_t i = 0; i < q.size(); ++i) pairs.push_back({&q[0], &q[i]});
  const auto got = remote.similarity_batch(pairs);
  ASSERT_EQ(got.size(), q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    EXPECT_NEAR(got[i], local.similarity(q[0], q[i]), 1e-6);
  }
  EXPECT_NEAR(got[0], 1.0, 1e-9);
  EXPECT_EQ(remote.queries_used(), static_cast<std::int64_t>(q.size()));
  EXPECT_EQ(server.hits(), 1);
}

TEST(RemoteOracle, OutOfRangeScoreIsProtocolError) {
  MockServer server;
  RemoteOracle remote(server.url(), fast_retries());
  server.set_mode(MockServer::Mode::kOutOfRange);
  const Image img = render_photo(build_corpus(1, 2, 2), 0, 0);
  EXPECT_THROW(remote.similarity(img, img), ProtocolError);
  EXPECT_EQ(remote.queries_used(), 0);
}

TEST(RemoteOracle, PersistentRateLimitIsBudgetExceeded) {
  MockServer server;
  ThrottleConfig t = fast_retries();
  t.rate_limit_retries = 2;
  RemoteOracle remote(server.url(), t);
  server.set_mode(MockServer::Mode::kAlways429);
  const Image img = render_photo(build_corpus(1, 2, 2), 0, 0);
  EXPECT_THROW(remote.similarity(img, img), BudgetExceeded);
  EXPECT_EQ(server.hits(), 3);
}

TEST(RemoteOracle, ServerFailureAndUnexpectedStatus) {
  MockServer server;
  RemoteOracle remote(server.url(), fast_retries());
  const Image img = render_photo(build_corpus(1, 2, 2), 0, 0);
  server.set_mode(MockServer::Mode::kAlways500);
  try {
    remote.similarity(img, img);
    FAIL() << "expected OracleError";
  } catch (const ProtocolError&) {
    FAIL() << "500 should not be a protocol error";
  } catch (const OracleError&) {
  }
  server.set_mode(MockServer::Mode::kBadStatus);
  EXPECT_THROW(remote.similarity(img, img), ProtocolError);
}

TEST(RemoteOracle, ThrottleSpacesRequests) {
  MockServer server;
  ThrottleConfig t = fast_retries();
  t.max_qps = 5.0;
  RemoteOracle remote(server.url(), t);
  const Image img = render_photo(build_corpus(1, 2, 2), 0, 0);
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < 20; ++i) remote.similarity(img, img);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
  EXPECT_GE(elapsed.count(), 3.8);
}

TEST(RemoteOracle, ConcurrentCallersAreCountedOnce) {
  MockServer server;
  ThrottleConfig t = fast_retries();
  t.max_in_flight = 2;
  RemoteOracle remote(server.url(), t);
  const Image img = render_photo(build_corpus(1, 2, 2), 0, 0);
  std::vector<std::thread> threads;
  for (int k = 0; k < 4; ++k) {
    threads.emplace_back([&] {
      for (int i = 0; i < 5; ++i) remote.similarity(img, img);
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(remote.queries_used(), 20);
  EXPECT_EQ(server.hits(), 20);
}

TEST(ThrottleConfig, Validation) {
  ThrottleConfig t;
  t.max_qps = -1;
  EXPECT_THROW(t.validate(), InvalidArgument);
  t = ThrottleConfig{};
  t.max_in_flight = 0;
  EXPECT_THROW(t.validate(), InvalidArgument);
  t = ThrottleConfig{};
  t.rate_limit_retries = -1;
  EXPECT_THROW(t.validate(), InvalidArgument);
}

TEST(RequestBody, CarriesBase64Png) {
  const Image img = render_photo(build_corpus(1, 2, 2), 1, 1);
  const nlohmann::json body = similarity_request_body(img, img);
  EXPECT_EQ(decode_field(body["image_a"]), quantize_8bit(img));
  EXPECT_EQ(body["image_a"], body["image_b"]);
}

}  // namespace
}  // namespace gap
