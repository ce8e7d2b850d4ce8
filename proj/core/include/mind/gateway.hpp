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

#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "mind/http.hpp"
#include "mind/prompt.hpp"

namespace mind {

struct ModelResponse {
  std::string text;
  std::string backend_id;
  double latency_ms = 0.0;
  int attempt = 1;  // 1 + number of retries it took
};

struct BackendConfig {
  std::string endpoint_url;  // full chat-completions URL
  std::string auth_token;
  std::string model_name;
  int max_parallel = 4;
  int timeout_ms = 60000;
  int max_retries = 3;
  int min_request_interval_ms = 0;
  int backoff_base_ms = 500;
  double backoff_factor = 2.0;
  std::size_t max_payload_bytes = 20u << 20;

  // MIND_MODEL_URL, MIND_MODEL_TOKEN, MIND_MODEL_NAME. Unset variables
  // leave the corresponding field empty.
  static BackendConfig from_env();

  // Throws kInvalidConfig.
  void validate() const;
};

class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  // Throws Error{kExhaustedRetries|kAuthFailed|kPayloadTooLarge|kBackendRejected}.
  virtual ModelResponse complete(const PromptBundle& bundle) = 0;
  virtual std::string backend_id() const = 0;
};

// --- mock backend ----------------------------------------------------------

enum class MockScenario {
  kWellFormed,
  kMissingPrefix,
  kOverLongIntention,
  kAmbiguousVerdict,
  kAlwaysReject,
};

std::string_view scenario_name(MockScenario s);
std::optional<MockScenario> parse_scenario(std::string_view name);

// Deterministic reply keyed on FNV-1a 64 over
//   stage_name + '\x1f' + decimal(seed) + '\x1f' + text.
// Stage 1 always answers with a feature description. Stage 2 malformations
// (MissingPrefix, OverLongIntention) and stage 3 ones (AmbiguousVerdict,
// AlwaysReject) only affect their own stage; other stages answer as
// WellFormed. Under WellFormed, stage 3 says "Yes, ..." iff the hash is even.
ModelResponse mock_complete(const PromptBundle& bundle, MockScenario scenario);

class MockClient final : public CompletionClient {
 public:
  explicit MockClient(MockScenario scenario) : scenario_(scenario) {}
  ModelResponse complete(const PromptBundle& bundle) override;
  std::string backend_id() const override;
  std::size_t calls() const { return calls_.load(); }

 private:
  MockScenario scenario_;
  std::atomic<std::size_t> calls_{0};
};

// --- live backend ----------------------------------------------------------

// JSON chat request body for a bundle. Local image files are inlined as
// base64 data URIs; http(s) and data: refs pass through unchanged.
std::string build_chat_request(const PromptBundle& bundle, const BackendConfig& config);

// Assistant text of a chat-completions response; nullopt when the body is
// not a usable completion.
std::optional<std::string> extract_completion_text(std::string_view body);

// Caps concurrent requests and spaces request starts at least
// min_interval apart. Shareable across threads.
class RequestThrottle {
 public:
  RequestThrottle(int max_parallel, std::chrono::milliseconds min_interval);

  class Slot {
   public:
    explicit Slot(RequestThrottle& t) : t_(&t) {}
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;
    ~Slot() { t_->release(); }

   private:
    RequestThrottle* t_;
  };

  // Blocks until a slot is free and the next start time has arrived.
  [[nodiscard]] std::unique_ptr<Slot> acquire();
  int in_flight() const;

 private:
  void release();

  const int max_parallel_;
  const std::chrono::milliseconds min_interval_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  int in_flight_ = 0;
  std::chrono::steady_clock::time_point next_start_{};
};

class HttpClient final : public CompletionClient {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit HttpClient(BackendConfig config,
                      std::unique_ptr<http::Transport> transport = http::make_transport(),
                      std::uint64_t jitter_seed = 0x6d696e64);

  // Retries timeouts, transport failures, 429 and 5xx with exponential
  // full-jitter backoff; 401/403, 413 and other 4xx fail at once.
  ModelResponse complete(const PromptBundle& bundle) override;
  std::string backend_id() const override;

  // Replaces the backoff sleep (tests).
  void set_sleeper(Sleeper sleeper) { sleeper_ = std::move(sleeper); }
  const BackendConfig& config() const { return config_; }

 private:
  std::chrono::milliseconds backoff_delay(int retry);

  BackendConfig config_;
  std::unique_ptr<http::Transport> transport_;
  RequestThrottle throttle_;
  Sleeper sleeper_;
  std::mutex rng_mu_;
  std::mt19937_64 rng_;
};

// One-shot convenience over HttpClient.
ModelResponse complete(const PromptBundle& bundle, const BackendConfig& config);

}  // namespace mind
