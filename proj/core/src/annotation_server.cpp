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

#include "mind/annotation_server.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

#include "mind/error.hpp"
#include "mind/text.hpp"

namespace mind {
namespace {

using json = nlohmann::ordered_json;

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownTask:
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kDuplicateSubmission:
    case ErrorCode::kTaskComplete:
    case ErrorCode::kCapacityExceeded:
    case ErrorCode::kTaskIncomplete:
      return 409;
    default:
      return 400;
  }
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, ErrorCode code, std::string_view message) {
  send_json(res, http_status_for(code),
            json{{"error", std::string(to_string(code))}, {"message", std::string(message)}});
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json task_json(const AnnotationTask& t, std::size_t ratings) {
  json j;
  j["task_id"] = t.task_id;
  j["record_id"] = t.record_id;
  j["product_a"] = {{"title", t.title_a}, {"image", t.image_a}};
  j["product_b"] = {{"title", t.title_b}, {"image", t.image_b}};
  j["relation"] = relation_name(t.relation);
  j["intention"] = t.intention;
  j["verdict"] = {{"accept", t.accepted}, {"rationale", t.rationale}};
  j["aspects"] = json::array();
  for (Aspect a : kAllAspects) j["aspects"].push_back(aspect_name(a));
  j["raters"] = t.raters;
  j["ratings"] = ratings;
  j["status"] = t.status == TaskStatus::kComplete ? "complete" : "open";
  return j;
}

int vote_of(const json& body, Aspect a) {
  const std::string name(aspect_name(a));
  auto it = body.find(name);
  if (it == body.end() || it->is_null()) fail(ErrorCode::kValidation, "missing aspect " + name);
  if (it->is_boolean()) return it->get<bool>() ? 1 : 0;
  if (it->is_number_integer()) {
    const auto v = it->get<long long>();
    if (v == 0 || v == 1) return static_cast<int>(v);
  }
  fail(ErrorCode::kValidation, "aspect " + name + " must be 0 or 1");
}

std::vector<std::string> answer_list(const json& body, const char* field) {
  auto it = body.find(field);
  if (it == body.end() || !it->is_array()) {
    fail(ErrorCode::kValidation, std::string("\"") + field + "\" must be an array");
  }
  std::vector<std::string> out;
  for (const auto& v : *it) out.push_back(v.is_string() ? v.get<std::string>() : v.dump());
  return out;
}

json parse_body(const httplib::Request& req) {
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) {
    fail(ErrorCode::kValidation, "request body must be a JSON object");
  }
  return body;
}

}  // namespace

std::pair<std::string, int> parse_listen_addr(std::string_view addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string_view::npos) {
    fail(ErrorCode::kInvalidConfig, "listen address must be host:port, got " + std::string(addr));
  }
  std::string host(addr.substr(0, colon));
  if (host.empty()) host = "127.0.0.1";
  const std::string port_s(addr.substr(colon + 1));
  char* end = nullptr;
  const long port = std::strtol(port_s.c_str(), &end, 10);
  if (port_s.empty() || *end != '\0' || port < 0 || port > 65535) {
    fail(ErrorCode::kInvalidConfig, "bad port in listen address " + std::string(addr));
  }
  return {host, static_cast<int>(port)};
}

std::string default_listen_addr() {
  const char* env = std::getenv("MIND_ANNOTATE_ADDR");
  return env != nullptr && *env != '\0' ? env : "127.0.0.1:8088";
}

struct AnnotationServer::Impl {
  AnnotationStore& store;
  LikertMapping mapping;
  httplib::Server server;

  Impl(AnnotationStore& s, LikertMapping m) : store(s), mapping(m) { routes(); }

  template <typename Fn>
  httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const Error& e) {
        send_error(res, e.code(), e.what());
      } catch (const std::exception& e) {
        send_error(res, ErrorCode::kValidation, e.what());
      }
    };
  }

  void routes() {
    server.Get("/tasks/next", guarded([this](const httplib::Request& req, httplib::Response& res) {
      const std::string rater = req.get_param_value("rater");
      if (text::trim(rater).empty()) fail(ErrorCode::kValidation, "rater query parameter is required");
      auto t = store.next_task(rater);
      if (!t) {
        res.status = 204;
        return;
      }
      send_json(res, 200, task_json(*t, store.ratings(t->task_id).size()));
    }));

    server.Get(R"(/tasks/([^/]+))",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const std::string id = req.matches[1];
                 const auto t = store.task(id);
                 send_json(res, 200, task_json(t, store.ratings(id).size()));
               }));

    server.Post(R"(/tasks/([^/]+)/ratings)",
                guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const json body = parse_body(req);
                  AspectRatings r;
                  r.task_id = req.matches[1];
                  r.rater_id = req.get_header_value("X-Rater-Id");
                  if (r.rater_id.empty()) r.rater_id = body.value("rater_id", "");
                  for (Aspect a : kAllAspects) r.votes[static_cast<std::size_t>(a)] = vote_of(body, a);
                  const std::string rater = r.rater_id;
                  const TaskStatus status = store.submit(std::move(r));
                  send_json(res, 200,
                            json{{"task_id", std::string(req.matches[1])},
                                 {"rater_id", rater},
                                 {"status", status == TaskStatus::kComplete ? "complete" : "open"}});
                }));

    server.Get("/reports/agreement",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                 std::optional<Aspect> aspect;
                 const std::string name = req.get_param_value("aspect");
                 if (!name.empty() && name != "pooled") {
                   aspect = parse_aspect(name);
                   if (!aspect) fail(ErrorCode::kValidation, "unknown aspect " + name);
                 }
                 const AgreementReport r = agreement_report(store, aspect);
                 json j;
                 j["aspect"] = aspect ? std::string(aspect_name(*aspect)) : "pooled";
                 j["pairwise_agreement"] = opt(r.pairwise_agreement);
                 j["fleiss_kappa"] = opt(r.fleiss_kappa);
                 j["n_items"] = r.n_items;
                 j["n_raters"] = r.n_raters;
                 j["n_categories"] = r.n_categories;
                 j["completed"] = store.completed_count();
                 j["open"] = store.open_count();
                 json rates = json::object();
                 const auto pr = positive_rates(store);
                 for (Aspect a : kAllAspects) {
                   rates[std::string(aspect_name(a))] = opt(pr[static_cast<std::size_t>(a)]);
                 }
                 j["positive_rates"] = rates;
                 send_json(res, 200, j);
               }));

    server.Post("/qualification/score",
                guarded([](const httplib::Request& req, httplib::Response& res) {
                  const json body = parse_body(req);
                  const auto q = qualification_score(answer_list(body, "answers"),
                                                     answer_list(body, "key"));
                  send_json(res, 200,
                            json{{"matches", q.matches},
                                 {"total", q.total},
                                 {"accuracy", q.accuracy},
                                 {"passed", q.passed},
                                 {"threshold_percent", kQualificationPercent}});
                }));

    server.Get("/reports/typicality",
               guarded([this](const httplib::Request&, httplib::Response& res) {
                 json rows = json::array();
                 for (const auto& t : typicality_report(store, mapping)) {
                   rows.push_back(json{{"relation", std::string(relation_name(t.relation))},
                                       {"items", t.items},
                                       {"mean", t.mean}});
                 }
                 send_json(res, 200,
                           json{{"relations", rows},
                                {"likert_base", mapping.base},
                                {"votes_per_item", mapping.votes_per_item}});
               }));
  }
};

AnnotationServer::AnnotationServer(AnnotationStore& store, LikertMapping mapping)
    : impl_(std::make_unique<Impl>(store, mapping)) {}

AnnotationServer::~AnnotationServer() { stop(); }

int AnnotationServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) fail(ErrorCode::kIo, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    fail(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void AnnotationServer::serve() { impl_->server.listen_after_bind(); }

int AnnotationServer::start(const std::string& host, int port) {
  const int bound = bind(host, port);
  thread_ = std::thread([this] { serve(); });
  impl_->server.wait_until_ready();
  return bound;
}

void AnnotationServer::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

}  // namespace mind
