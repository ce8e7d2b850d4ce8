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

#include <chrono>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace mind::http {

struct Response {
  int status = 0;  // 0 when the request never produced an HTTP status
  std::string body;
  std::string error;
  bool timed_out = false;
};

using Headers = std::vector<std::pair<std::string, std::string>>;

class Transport {
 public:
  virtual ~Transport() = default;
  virtual Response post(const std::string& url, const std::string& body,
                        const Headers& headers,
                        std::chrono::milliseconds timeout) = 0;
};

std::unique_ptr<Transport> make_transport();

struct UrlParts {
  std::string origin;  // scheme://host[:port]
  std::string path;    // starts with '/'
};

// Throws Error{kInvalidConfig} for anything that is not http(s)://.
UrlParts split_url(const std::string& url);

// True when a HEAD (or a one-byte ranged GET) returns 2xx.
bool probe(const std::string& url, std::chrono::milliseconds timeout);

}  // namespace mind::http
