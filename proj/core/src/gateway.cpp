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

#include "mind/gateway.hpp"

#include <cmath>
#include <cstdlib>
#include <thread>

#include <json.hpp>

#include "mind/error.hpp"
#include "mind/jsonl.hpp"
#include "mind/text.hpp"

namespace mind {
namespace {

using json = nlohmann::ordered_json;

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : std::string();
}

std::string mime_for(const std::filesystem::path& p) {
  const std::string ext = text::to_lower(p.extension().string());
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  if (ext == ".png") return "image/png";
  if (ext == ".gif") return "image/gif";
  if (ext == ".webp") return "image/webp";
  return "application/octet-stream";
}

std::string image_url_for(const std::string& ref) {
  if (ref.rfind("http://", 0) == 0 || ref.rfind("https://", 0) == 0 ||
      ref.rfind("data:", 0) == 0) {
    return ref;
  }
  std::string path = ref.rfind("file://", 0) == 0 ? ref.substr(7) : ref;
  return "data:" + mime_for(path) + ";base64," + text::base64_encode(io::read_file(path));
}

enum class Outcome { kOk, kTransient, kAuth, kTooLarge, kRejected };

Outcome classify(int status) {
  if (status / 100 == 2) return Outcome::kOk;
  if (status == 0 || status == 429 || status / 100 == 5 || status == 408) return Outcome::kTransient;
  if (status == 401 || status == 403) return Outcome::kAuth;
  if (status == 413) return Outcome::kTooLarge;
  return Outcome::kRejected;
}

}  // namespace

BackendConfig BackendConfig::from_env() {
  BackendConfig c;
  c.endpoint_url = env_or_empty("MIND_MODEL_URL");
  c.auth_token = env_or_empty("MIND_MODEL_TOKEN");
  c.model_name = env_or_empty("MIND_MODEL_NAME");
  return c;
}

void BackendConfig::validate() const {
  if (endpoint_url.empty()) fail(ErrorCode::kInvalidConfig, "endpoint URL not set (MIND_MODEL_URL)");
  http::split_url(endpoint_url);
  if (max_parallel < 1) fail(ErrorCode::kInvalidConfig, "max_parallel must be >= 1");
  if (timeout_ms <= 0) fail(ErrorCode::kInvalidConfig, "timeout_ms must be > 0");
  if (max_retries < 0) fail(ErrorCode::kInvalidConfig, "max_retries must be >= 0");
  if (min_request_interval_ms < 0) fail(ErrorCode::kInvalidConfig, "min_request_interval_ms must be >= 0");
  if (backoff_base_ms < 0 || backoff_factor < 1.0) fail(ErrorCode::kInvalidConfig, "invalid backoff settings");
}

std::string build_chat_request(const PromptBundle& bundle, const BackendConfig& config) {
  json content = json::array();
  for (const auto& ref : bundle.images) {
    content.push_back({{"type", "image_url"}, {"image_url", {{"url", image_url_for(ref)}}}});
  }
  content.push_back({{"type", "text"}, {"text", bundle.text}});

  json req;
  req["model"] = config.model_name;
  req["messages"] = json::array({{{"role", "user"}, {"content", std::move(content)}}});
  req["max_tokens"] = bundle.gen_params.max_tokens;
  req["temperature"] = bundle.gen_params.temperature;
  req["seed"] = bundle.gen_params.seed;
  return req.dump();
}

std::optional<std::string> extract_completion_text(std::string_view body) {
  const json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  auto choices = j.find("choices");
  if (choices == j.end() || !choices->is_array() || choices->empty()) return std::nullopt;
  const json& first = (*choices)[0];
  auto msg = first.find("message");
  if (msg == first.end() || !msg->is_object()) return std::nullopt;
  auto c = msg->find("content");
  if (c == msg->end()) return std::nullopt;
  std::string out;
  if (c->is_string()) {
    out = c->get<std::string>();
  } else if (c->is_array()) {
    for (const auto& part : *c) {
      if (part.is_object() && part.value("type", "") == "text") out += part.value("text", "");
    }
  } else {
    return std::nullopt;
  }
  if (text::trim(out).empty()) return std::nullopt;
  return out;
}

RequestThrottle::RequestThrottle(int max_parallel, std::chrono::milliseconds min_interval)
    : max_parallel_(max_parallel < 1 ? 1 : max_parallel), min_interval_(min_interval) {}

std::unique_ptr<RequestThrottle::Slot> RequestThrottle::acquire() {
  std::chrono::steady_clock::time_point start;
  {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return in_flight_ < max_parallel_; });
    ++in_flight_;
    start = std::max(std::chrono::steady_clock::now(), next_start_);
    next_start_ = start + min_interval_;
  }
  auto slot = std::make_unique<Slot>(*this);
  std::this_thread::sleep_until(start);
  return slot;
}

int RequestThrottle::in_flight() const {
  std::lock_guard lock(mu_);
  return in_flight_;
}

void RequestThrottle::release() {
  {
    std::lock_guard lock(mu_);
    --in_flight_;
  }
  cv_.notify_one();
}

HttpClient::HttpClient(BackendConfig config, std::unique_ptr<http::Transport> transport,
                       std::uint64_t jitter_seed)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      throttle_(config_.max_parallel, std::chrono::milliseconds(config_.min_request_interval_ms)),
      sleeper_([](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); }),
      rng_(jitter_seed) {
  config_.validate();
}

std::string HttpClient::backend_id() const {
  return config_.model_name.empty() ? config_.endpoint_url
                                    : config_.model_name + "@" + config_.endpoint_url;
}

std::chrono::milliseconds HttpClient::backoff_delay(int retry) {
  const double cap = config_.backoff_base_ms * std::pow(config_.backoff_factor, retry - 1);
  std::lock_guard lock(rng_mu_);
  std::uniform_real_distribution<double> dist(0.0, cap);
  return std::chrono::milliseconds(static_cast<long long>(dist(rng_)));
}

ModelResponse HttpClient::complete(const PromptBundle& bundle) {
  const std::string body = build_chat_request(bundle, config_);
  if (body.size() > config_.max_payload_bytes) {
    fail(ErrorCode::kPayloadTooLarge, "request of " + std::to_string(body.size()) +
                                          " bytes exceeds limit of " +
                                          std::to_string(config_.max_payload_bytes));
  }
  http::Headers headers;
  if (!config_.auth_token.empty()) headers.emplace_back("Authorization", "Bearer " + config_.auth_token);

  std::string last_cause;
  const int attempts = config_.max_retries + 1;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    if (attempt > 1) sleeper_(backoff_delay(attempt - 1));

    const auto t0 = std::chrono::steady_clock::now();
    http::Response res;
    {
      auto slot = throttle_.acquire();
      res = transport_->post(config_.endpoint_url, body, headers,
                             std::chrono::milliseconds(config_.timeout_ms));
    }
    const double latency =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    switch (classify(res.status)) {
      case Outcome::kOk:
        if (auto text = extract_completion_text(res.body)) {
          return ModelResponse{std::move(*text), backend_id(), latency, attempt};
        }
        last_cause = "HTTP " + std::to_string(res.status) + " without completion text";
        break;
      case Outcome::kTransient:
        last_cause = res.status == 0 ? (res.timed_out ? "timeout: " : "transport: ") + res.error
                                     : "HTTP " + std::to_string(res.status);
        break;
      case Outcome::kAuth:
        fail(ErrorCode::kAuthFailed, "HTTP " + std::to_string(res.status) + " from " + config_.endpoint_url);
      case Outcome::kTooLarge:
        fail(ErrorCode::kPayloadTooLarge, "HTTP 413 from " + config_.endpoint_url);
      case Outcome::kRejected:
        fail(ErrorCode::kBackendRejected,
             "HTTP " + std::to_string(res.status) + ": " + res.body.substr(0, 200));
    }
  }
  fail(ErrorCode::kExhaustedRetries,
       "gave up after " + std::to_string(attempts) + " attempts; last cause: " + last_cause);
}

ModelResponse complete(const PromptBundle& bundle, const BackendConfig& config) {
  HttpClient client(config);
  return client.complete(bundle);
}

}  // namespace mind
