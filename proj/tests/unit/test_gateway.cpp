// Copyright 2026 The mind Authors. All rights reserved.
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

#include <doctest.h>

#include <atomic>
#include <deque>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "mind/error.hpp"
#include "mind/gateway.hpp"
#include "mind/text.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace mind;
using mind::testing::code_of;

namespace {

PromptBundle wire_bundle() {
  PromptBundle b;
  b.stage = Stage::kFeatureExtraction;
  b.text = "Describe the product.\nKeep it short.";
  b.images = {"https://img.example/p1.jpg", "data:image/png;base64,iVBORw0KGgo="};
  b.gen_params = GenParams{64, 0.2, 7};
  b.relation = Relation::kUsedFor;  // routing only, never sent
  b.relation_template = "they both are used for";
  return b;
}

std::string completion_body(const std::string& text) {
  nlohmann::json j;
  j["choices"] = nlohmann::json::array({{{"message", {{"role", "assistant"}, {"content", text}}}}});
  return j.dump();
}

// Local chat endpoint replaying a script of statuses; 200 answers "ok".
struct ScriptedServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::mutex mu;
  std::deque<int> script;
  std::vector<std::string> auth_headers;
  std::vector<std::string> bodies;

  explicit ScriptedServer(std::deque<int> statuses) : script(std::move(statuses)) {
    server.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mu);
      auth_headers.push_back(req.get_header_value("Authorization"));
      bodies.push_back(req.body);
      const int status = script.empty() ? 200 : script.front();
      if (!script.empty()) script.pop_front();
      res.status = status;
      res.set_content(status == 200 ? completion_body("ok") : R"({"error":"nope"})", "application/json");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~ScriptedServer() {
    server.stop();
    thread.join();
  }
  std::size_t requests() {
    std::lock_guard lock(mu);
    return bodies.size();
  }
  BackendConfig config() const {
    BackendConfig c;
    c.endpoint_url = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
    c.model_name = "test-vlm";
    c.auth_token = "secret-token";
    c.timeout_ms = 5000;
    c.max_retries = 3;
    c.backoff_base_ms = 1;
    return c;
  }
};

// In-process transport with a fixed delay, recording start times and the
// peak number of concurrent posts.
class SlowTransport final : public http::Transport {
 public:
  explicit SlowTransport(std::chrono::milliseconds delay) : delay_(delay) {}
  http::Response post(const std::string&, const std::string&, const http::Headers&,
                      std::chrono::milliseconds) override {
    const int now = ++active_;
    {
      std::lock_guard lock(mu_);
      peak_ = std::max(peak_, now);
      starts_.push_back(std::chrono::steady_clock::now());
    }
    std::this_thread::sleep_for(delay_);
    --active_;
    return http::Response{200, completion_body("ok"), "", false};
  }
  int peak() {
    std::lock_guard lock(mu_);
    return peak_;
  }
  std::vector<std::chrono::steady_clock::time_point> starts() {
    std::lock_guard lock(mu_);
    return starts_;
  }

 private:
  std::chrono::milliseconds delay_;
  std::atomic<int> active_{0};
  std::mutex mu_;
  int peak_ = 0;
  std::vector<std::chrono::steady_clock::time_point> starts_;
};

class FixedTransport final : public http::Transport {
 public:
  explicit FixedTransport(std::vector<http::Response> replies) : replies_(std::move(replies)) {}
  http::Response post(const std::string&, const std::string&, const http::Headers&,
                      std::chrono::milliseconds) override {
    const auto i = std::min(calls++, replies_.size() - 1);
    return replies_[i];
  }
  std::size_t calls = 0;

 private:
  std::vector<http::Response> replies_;
};

BackendConfig fake_config() {
  BackendConfig c;
  c.endpoint_url = "http://backend.invalid/v1/chat/completions";
  c.model_name = "test-vlm";
  c.max_retries = 2;
  c.backoff_base_ms = 100;
  return c;
}

}  // namespace

TEST_CASE("chat request matches the golden wire fixture") {
  BackendConfig c;
  c.model_name = "test-vlm";
  const std::string golden = mind::testing::slurp(mind::testing::golden_dir() / "wire_request.json");
  CHECK(build_chat_request(wire_bundle(), c) + "\n" == golden);
}

TEST_CASE("local images are inlined as data URIs") {
  const Catalog cat = mind::testing::fixture_catalog();
  PromptBundle b = wire_bundle();
  b.images = {cat.product("P1").image_refs[0]};
  const auto j = nlohmann::json::parse(build_chat_request(b, BackendConfig{}));
  const std::string url = j["messages"][0]["content"][0]["image_url"]["url"];
  CHECK(url == "data:image/png;base64," + text::base64_encode(mind::testing::slurp(b.images[0])));
}

TEST_CASE("completion text extraction") {
  CHECK(extract_completion_text(completion_body("Yes, fine.")) == "Yes, fine.");
  CHECK(extract_completion_text(
            R"({"choices":[{"message":{"content":[{"type":"text","text":"a"},{"type":"text","text":"b"}]}}]})") ==
        "ab");
  CHECK_FALSE(extract_completion_text("{}").has_value());
  CHECK_FALSE(extract_completion_text(R"({"choices":[]})").has_value());
  CHECK_FALSE(extract_completion_text(completion_body("   ")).has_value());
  CHECK_FALSE(extract_completion_text("not json").has_value());
}

TEST_CASE("backend config validation") {
  BackendConfig c;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::kInvalidConfig);
  c.endpoint_url = "ftp://x/y";
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::kInvalidConfig);
  c.endpoint_url = "http://x/y";
  CHECK_NOTHROW(c.validate());
  c.max_parallel = 0;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::kInvalidConfig);
  CHECK(http::split_url("https://h:8/a/b").origin == "https://h:8");
  CHECK(http::split_url("https://h:8/a/b").path == "/a/b");
  CHECK(http::split_url("http://h").path == "/");
}

TEST_CASE("429 then 200 succeeds on the second attempt") {
  ScriptedServer srv({429});
  HttpClient client(srv.config());
  std::vector<std::chrono::milliseconds> sleeps;
  client.set_sleeper([&](std::chrono::milliseconds d) { sleeps.push_back(d); });
  const auto r = client.complete(wire_bundle());
  CHECK(r.text == "ok");
  CHECK(r.attempt == 2);
  CHECK(srv.requests() == 2);
  CHECK(sleeps.size() == 1);
  CHECK(srv.auth_headers[0] == "Bearer secret-token");
  CHECK(srv.bodies[0] == srv.bodies[1]);
  CHECK(r.backend_id == "test-vlm@" + srv.config().endpoint_url);
}

TEST_CASE("401 fails at once with AuthFailed") {
  ScriptedServer srv({401, 200});
  HttpClient client(srv.config());
  client.set_sleeper([](std::chrono::milliseconds) {});
  CHECK(code_of([&] { client.complete(wire_bundle()); }) == ErrorCode::kAuthFailed);
  CHECK(srv.requests() == 1);
}

TEST_CASE("413 maps to PayloadTooLarge and other 4xx to BackendRejected") {
  {
    ScriptedServer srv({413});
    HttpClient client(srv.config());
    CHECK(code_of([&] { client.complete(wire_bundle()); }) == ErrorCode::kPayloadTooLarge);
    CHECK(srv.requests() == 1);
  }
  {
    ScriptedServer srv({400});
    HttpClient client(srv.config());
    CHECK(code_of([&] { client.complete(wire_bundle()); }) == ErrorCode::kBackendRejected);
    CHECK(srv.requests() == 1);
  }
}

TEST_CASE("persistent 5xx exhausts the retry budget") {
  ScriptedServer srv({503, 500, 502, 504, 500});
  HttpClient client(srv.config());
  client.set_sleeper([](std::chrono::milliseconds) {});
  CHECK(code_of([&] { client.complete(wire_bundle()); }) == ErrorCode::kExhaustedRetries);
  CHECK(srv.requests() == 4);
}

TEST_CASE("oversized payload is refused before sending") {
  ScriptedServer srv({});
  BackendConfig c = srv.config();
  c.max_payload_bytes = 64;
  HttpClient client(c);
  CHECK(code_of([&] { client.complete(wire_bundle()); }) == ErrorCode::kPayloadTooLarge);
  CHECK(srv.requests() == 0);
}

TEST_CASE("timeouts and empty completions are retried with bounded full-jitter backoff") {
  auto transport = std::make_unique<FixedTransport>(std::vector<http::Response>{
      {0, "", "read timeout", true}, {200, "{}", "", false}, {200, completion_body("done"), "", false}});
  auto* t = transport.get();
  HttpClient client(fake_config(), std::move(transport));
  std::vector<std::chrono::milliseconds> sleeps;
  client.set_sleeper([&](std::chrono::milliseconds d) { sleeps.push_back(d); });
  const auto r = client.complete(wire_bundle());
  CHECK(r.text == "done");
  CHECK(r.attempt == 3);
  CHECK(t->calls == 3);
  REQUIRE(sleeps.size() == 2);
  CHECK(sleeps[0].count() <= 100);
  CHECK(sleeps[1].count() <= 200);
}

TEST_CASE("throttle caps requests in flight") {
  BackendConfig c = fake_config();
  c.max_parallel = 2;
  auto transport = std::make_unique<SlowTransport>(std::chrono::milliseconds(20));
  auto* t = transport.get();
  HttpClient client(c, std::move(transport));
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) threads.emplace_back([&] { client.complete(wire_bundle()); });
  for (auto& th : threads) th.join();
  CHECK(t->peak() <= 2);
  CHECK(t->peak() >= 1);
  CHECK(t->starts().size() == 8);
}

TEST_CASE("throttle spaces request starts") {
  BackendConfig c = fake_config();
  c.max_parallel = 4;
  c.min_request_interval_ms = 25;
  auto transport = std::make_unique<SlowTransport>(std::chrono::milliseconds(1));
  auto* t = transport.get();
  HttpClient client(c, std::move(transport));
  std::vector<std::thread> threads;
  for (int i = 0; i < 5; ++i) threads.emplace_back([&] { client.complete(wire_bundle()); });
  for (auto& th : threads) th.join();
  auto starts = t->starts();
  std::sort(starts.begin(), starts.end());
  REQUIRE(starts.size() == 5);
  for (std::size_t i = 1; i < starts.size(); ++i) {
    CHECK(starts[i] - starts[i - 1] >= std::chrono::milliseconds(24));
  }
}

TEST_CASE("mock backend is deterministic and keyed on stage, seed and text") {
  PromptBundle b = wire_bundle();
  b.stage = Stage::kRoleAwareFilter;
  const auto r1 = mock_complete(b, MockScenario::kWellFormed);
  CHECK(mock_complete(b, MockScenario::kWellFormed).text == r1.text);
  CHECK(r1.backend_id == "mock:WellFormed");

  // Parity rule checked against an independent hash over many seeds.
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    b.gen_params.seed = seed;
    const bool even = oracle::mock_key("RoleAwareFilter", seed, b.text) % 2 == 0;
    const auto text = mock_complete(b, MockScenario::kWellFormed).text;
    CHECK(text.rfind(even ? "Yes, " : "No, ", 0) == 0);
  }
}

TEST_CASE("mock scenarios shape only their own stage") {
  PromptBundle gen = wire_bundle();
  gen.stage = Stage::kIntentionGeneration;
  const auto missing = mock_complete(gen, MockScenario::kMissingPrefix).text;
  CHECK(missing.find("they both are used for") == std::string::npos);
  const auto longer = mock_complete(gen, MockScenario::kOverLongIntention).text;
  CHECK(text::word_count(longer) > 120);
  CHECK(mock_complete(gen, MockScenario::kAmbiguousVerdict).text ==
        mock_complete(gen, MockScenario::kWellFormed).text);

  PromptBundle filt = wire_bundle();
  filt.stage = Stage::kRoleAwareFilter;
  CHECK(mock_complete(filt, MockScenario::kAmbiguousVerdict).text.rfind("Maybe", 0) == 0);
  CHECK(mock_complete(filt, MockScenario::kAlwaysReject).text.rfind("No, ", 0) == 0);
  CHECK(mock_complete(filt, MockScenario::kMissingPrefix).text ==
        mock_complete(filt, MockScenario::kWellFormed).text);

  CHECK(parse_scenario("alwaysreject") == MockScenario::kAlwaysReject);
  CHECK_FALSE(parse_scenario("sometimes").has_value());

  MockClient client(MockScenario::kWellFormed);
  client.complete(filt);
  client.complete(filt);
  CHECK(client.calls() == 2);
}
