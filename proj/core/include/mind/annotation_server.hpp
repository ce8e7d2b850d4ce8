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

#include <memory>
#include <string>
#include <string_view>
#include <thread>
#include <utility>

#include "mind/analytics.hpp"
#include "mind/annotation.hpp"

namespace mind {

// host:port; a bare ":port" binds 127.0.0.1. Throws kInvalidConfig.
std::pair<std::string, int> parse_listen_addr(std::string_view addr);
// $MIND_ANNOTATE_ADDR, else 127.0.0.1:8088.
std::string default_listen_addr();

// JSON REST front end over an AnnotationStore:
//   GET  /tasks/next?rater=ID        next task for the rater, 204 when none
//   GET  /tasks/{id}                 task payload, raters and status
//   POST /tasks/{id}/ratings         four binary aspects; rater from the
//                                    X-Rater-Id header or "rater_id"
//   GET  /reports/agreement?aspect=  one aspect, or "pooled" (default)
//   POST /qualification/score        {"answers":[...],"key":[...]}
//   GET  /reports/typicality         per-relation Likert means
// Errors answer {"error":<code>,"message":...} with 400, 404 or 409.
class AnnotationServer {
 public:
  explicit AnnotationServer(AnnotationStore& store, LikertMapping mapping = {});
  ~AnnotationServer();
  AnnotationServer(const AnnotationServer&) = delete;
  AnnotationServer& operator=(const AnnotationServer&) = delete;

  // Binds without serving; port 0 picks a free port. Returns the bound port.
  // Throws kIo.
  int bind(const std::string& host, int port);
  // Serves on the calling thread until stop().
  void serve();
  // bind() plus serve() on a background thread.
  int start(const std::string& host, int port);
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::thread thread_;
};

}  // namespace mind
