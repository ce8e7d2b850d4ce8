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

#include "mind/http.hpp"

#include <httplib.h>

#include "mind/error.hpp"

namespace mind::http {
namespace {

void apply_timeout(httplib::Client& cli, std::chrono::milliseconds timeout) {
  const auto sec = static_cast<time_t>(timeout.count() / 1000);
  const auto usec = static_cast<time_t>((timeout.count() % 1000) * 1000);
  cli.set_connection_timeout(sec, usec);
  cli.set_read_timeout(sec, usec);
  cli.set_write_timeout(sec, usec);
}

class HttplibTransport final : public Transport {
 public:
  Response post(const std::string& url, const std::string& body,
                const Headers& headers,
                std::chrono::milliseconds timeout) override {
    const UrlParts parts = split_url(url);
    httplib::Client cli(parts.origin);
    apply_timeout(cli, timeout);
    cli.set_follow_location(true);
    httplib::Headers h;
    for (const auto& [k, v] : headers) h.emplace(k, v);
    auto res = cli.Post(parts.path, h, body, "application/json");
    Response out;
    if (!res) {
      out.error = httplib::to_string(res.error());
      out.timed_out = res.error() == httplib::Error::Read ||
                      res.error() == httplib::Error::Write ||
                      res.error() == httplib::Error::ConnectionTimeout;
      return out;
    }
    out.status = res->status;
    out.body = res->body;
    return out;
  }
};

}  // namespace

std::unique_ptr<Transport> make_transport() {
  return std::make_unique<HttplibTransport>();
}

UrlParts split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    fail(ErrorCode::kInvalidConfig, "not an absolute URL: " + url);
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    fail(ErrorCode::kInvalidConfig, "unsupported URL scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  UrlParts parts;
  if (path_start == std::string::npos) {
    parts.origin = url;
    parts.path = "/";
  } else {
    parts.origin = url.substr(0, path_start);
    parts.path = url.substr(path_start);
  }
  return parts;
}

bool probe(const std::string& url, std::chrono::milliseconds timeout) {
  UrlParts parts;
  try {
    parts = split_url(url);
  } catch (const Error&) {
    return false;
  }
  httplib::Client cli(parts.origin);
  apply_timeout(cli, timeout);
  cli.set_follow_location(true);
  if (auto res = cli.Head(parts.path); res && res->status / 100 == 2) {
    return true;
  }
  httplib::Headers range{{"Range", "bytes=0-0"}};
  auto res = cli.Get(parts.path, range);
  return res && res->status / 100 == 2;
}

}  // namespace mind::http
