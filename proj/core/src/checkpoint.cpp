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

#include "mind/checkpoint.hpp"

#include <json.hpp>

#include "mind/error.hpp"

namespace mind {
namespace {

using json = nlohmann::ordered_json;

constexpr std::string_view kManifest = "manifest.json";

Relation relation_or_throw(const json& j) {
  auto r = parse_relation(j.at("relation").get<std::string>());
  if (!r) fail(ErrorCode::kMalformed, "checkpoint names unknown relation");
  return *r;
}

std::optional<FailureClass> failure_of(const json& j) {
  auto it = j.find("failure");
  if (it == j.end() || !it->is_string()) return std::nullopt;
  return parse_failure_class(it->get<std::string>());
}

void put_failure(json& j, const std::optional<FailureClass>& f) {
  if (f) j["failure"] = failure_class_name(*f);
}

json to_json(const FeatureOutcome& o) {
  json j;
  j["key"] = o.product_id;
  j["status"] = o.dead ? "dead" : "ok";
  j["features"] = o.features;
  j["raw"] = o.raw_response;
  if (!o.error.empty()) j["error"] = o.error;
  return j;
}

FeatureOutcome feature_from(const json& j) {
  FeatureOutcome o;
  o.product_id = j.at("key").get<std::string>();
  o.dead = j.at("status").get<std::string>() == "dead";
  o.features = j.value("features", "");
  o.raw_response = j.value("raw", "");
  o.error = j.value("error", "");
  return o;
}

json to_json(const GenerationOutcome& o) {
  json j;
  j["key"] = o.key;
  j["status"] = status_name(o.status);
  j["cobuy_id"] = o.candidate.cobuy_id;
  j["relation"] = relation_name(o.candidate.relation);
  j["sample"] = o.candidate.sample_index;
  j["text"] = o.candidate.text;
  j["raw"] = o.candidate.raw_response;
  j["created_at"] = o.candidate.created_at;
  put_failure(j, o.failure);
  if (!o.detail.empty()) j["detail"] = o.detail;
  return j;
}

GenerationOutcome generation_from(const json& j) {
  GenerationOutcome o;
  o.key = j.at("key").get<std::string>();
  const std::string status = j.at("status").get<std::string>();
  o.status = status == "candidate"       ? GenerationOutcome::Status::kCandidate
             : status == "parse_failure" ? GenerationOutcome::Status::kParseFailure
                                         : GenerationOutcome::Status::kDead;
  o.candidate.cobuy_id = j.at("cobuy_id").get<std::string>();
  o.candidate.relation = relation_or_throw(j);
  o.candidate.sample_index = j.at("sample").get<std::uint32_t>();
  o.candidate.text = j.value("text", "");
  o.candidate.raw_response = j.value("raw", "");
  o.candidate.created_at = j.value("created_at", "");
  o.failure = failure_of(j);
  o.detail = j.value("detail", "");
  return o;
}

json to_json(const FilterOutcome& o) {
  json j;
  j["key"] = o.key;
  j["status"] = status_name(o.status);
  j["accept"] = o.verdict.accept;
  j["rationale"] = o.verdict.rationale;
  j["raw"] = o.verdict.raw_response;
  put_failure(j, o.failure);
  if (!o.detail.empty()) j["detail"] = o.detail;
  return j;
}

FilterOutcome filter_from(const json& j) {
  FilterOutcome o;
  o.key = j.at("key").get<std::string>();
  const std::string status = j.at("status").get<std::string>();
  o.status = status == "accepted"     ? FilterOutcome::Status::kAccepted
             : status == "rejected"   ? FilterOutcome::Status::kRejected
             : status == "unparseable" ? FilterOutcome::Status::kUnparseable
                                       : FilterOutcome::Status::kDead;
  o.verdict.accept = j.value("accept", false);
  o.verdict.rationale = j.value("rationale", "");
  o.verdict.raw_response = j.value("raw", "");
  o.failure = failure_of(j);
  o.detail = j.value("detail", "");
  return o;
}

template <typename Map, typename Parse>
void replay(const std::filesystem::path& path, Map& into, Parse parse) {
  if (!std::filesystem::exists(path)) return;
  io::for_each_line(path, [&](std::string_view line, std::size_t) {
    const json j = json::parse(line, nullptr, false);
    // A torn final line from a crash is ignored; the item reruns.
    if (j.is_discarded() || !j.is_object()) return;
    auto outcome = parse(j);
    std::string key = j.at("key").template get<std::string>();
    into.insert_or_assign(std::move(key), std::move(outcome));
  });
}

}  // namespace

std::string work_item_key(std::string_view cobuy_id, Relation relation, std::uint32_t sample) {
  std::string key(cobuy_id);
  key += '|';
  key += relation_name(relation);
  key += '|';
  key += std::to_string(sample);
  return key;
}

std::string_view status_name(GenerationOutcome::Status s) {
  switch (s) {
    case GenerationOutcome::Status::kCandidate: return "candidate";
    case GenerationOutcome::Status::kParseFailure: return "parse_failure";
    case GenerationOutcome::Status::kDead: return "dead";
  }
  return "";
}

std::string_view status_name(FilterOutcome::Status s) {
  switch (s) {
    case FilterOutcome::Status::kAccepted: return "accepted";
    case FilterOutcome::Status::kRejected: return "rejected";
    case FilterOutcome::Status::kUnparseable: return "unparseable";
    case FilterOutcome::Status::kDead: return "dead";
  }
  return "";
}

bool Checkpoint::exists(const std::filesystem::path& root, std::string_view run_id) {
  return std::filesystem::exists(root / std::string(run_id) / kManifest);
}

Checkpoint::Checkpoint(std::filesystem::path dir, std::string run_id, std::string fingerprint,
                       bool durable)
    : dir_(std::move(dir)),
      run_id_(std::move(run_id)),
      fingerprint_(std::move(fingerprint)),
      stage1_(dir_ / "stage1.jsonl", durable),
      stage2_(dir_ / "stage2.jsonl", durable),
      stage3_(dir_ / "stage3.jsonl", durable) {}

Checkpoint::Checkpoint(Checkpoint&& other) noexcept
    : dir_(std::move(other.dir_)),
      run_id_(std::move(other.run_id_)),
      fingerprint_(std::move(other.fingerprint_)),
      stage1_(std::move(other.stage1_)),
      stage2_(std::move(other.stage2_)),
      stage3_(std::move(other.stage3_)),
      features_(std::move(other.features_)),
      generations_(std::move(other.generations_)),
      filters_(std::move(other.filters_)) {}

Checkpoint Checkpoint::create(const std::filesystem::path& root, std::string run_id,
                              std::string fingerprint, bool durable) {
  if (run_id.empty() || run_id.find('/') != std::string::npos) {
    fail(ErrorCode::kInvalidArgument, "invalid run id: " + run_id);
  }
  if (exists(root, run_id)) {
    fail(ErrorCode::kInvalidArgument, "run " + run_id + " already exists; pass --resume " + run_id);
  }
  const auto dir = root / run_id;
  std::filesystem::create_directories(dir);
  json manifest;
  manifest["run_id"] = run_id;
  manifest["fingerprint"] = fingerprint;
  io::write_file_atomic(dir / kManifest, manifest.dump(2) + "\n");
  return Checkpoint(dir, std::move(run_id), std::move(fingerprint), durable);
}

Checkpoint Checkpoint::resume(const std::filesystem::path& root, std::string run_id,
                              std::string_view fingerprint, bool durable) {
  if (!exists(root, run_id)) fail(ErrorCode::kNotFound, "no checkpoint for run " + run_id);
  const auto dir = root / run_id;
  const json manifest = json::parse(io::read_file(dir / kManifest), nullptr, false);
  if (manifest.is_discarded() || !manifest.contains("fingerprint")) {
    fail(ErrorCode::kMalformed, "corrupt manifest for run " + run_id);
  }
  const std::string stored = manifest["fingerprint"].get<std::string>();
  if (stored != fingerprint) {
    fail(ErrorCode::kConfigMismatch, "run " + run_id + " was created with configuration " +
                                         stored + ", current configuration is " +
                                         std::string(fingerprint));
  }
  Checkpoint cp(dir, std::move(run_id), stored, durable);
  cp.load();
  return cp;
}

void Checkpoint::load() {
  replay(dir_ / "stage1.jsonl", features_, feature_from);
  replay(dir_ / "stage2.jsonl", generations_, generation_from);
  replay(dir_ / "stage3.jsonl", filters_, filter_from);
}

void Checkpoint::record(const FeatureOutcome& o) {
  stage1_.append_line(to_json(o).dump());
  std::lock_guard lock(mu_);
  features_.insert_or_assign(o.product_id, o);
}

void Checkpoint::record(const GenerationOutcome& o) {
  stage2_.append_line(to_json(o).dump());
  std::lock_guard lock(mu_);
  generations_.insert_or_assign(o.key, o);
}

void Checkpoint::record(const FilterOutcome& o) {
  stage3_.append_line(to_json(o).dump());
  std::lock_guard lock(mu_);
  filters_.insert_or_assign(o.key, o);
}

std::optional<FeatureOutcome> Checkpoint::feature(std::string_view id) const {
  std::lock_guard lock(mu_);
  auto it = features_.find(id);
  if (it == features_.end()) return std::nullopt;
  return it->second;
}

std::optional<GenerationOutcome> Checkpoint::generation(std::string_view key) const {
  std::lock_guard lock(mu_);
  auto it = generations_.find(key);
  if (it == generations_.end()) return std::nullopt;
  return it->second;
}

std::optional<FilterOutcome> Checkpoint::filter(std::string_view key) const {
  std::lock_guard lock(mu_);
  auto it = filters_.find(key);
  if (it == filters_.end()) return std::nullopt;
  return it->second;
}

bool Checkpoint::feature_done(std::string_view id) const {
  auto o = feature(id);
  return o && !o->dead;
}

bool Checkpoint::generation_done(std::string_view key) const {
  auto o = generation(key);
  return o && o->status != GenerationOutcome::Status::kDead;
}

bool Checkpoint::filter_done(std::string_view key) const {
  auto o = filter(key);
  return o && o->status != FilterOutcome::Status::kDead;
}

std::vector<FeatureOutcome> Checkpoint::features() const {
  std::lock_guard lock(mu_);
  std::vector<FeatureOutcome> out;
  for (const auto& [_, o] : features_) out.push_back(o);
  return out;
}

std::vector<GenerationOutcome> Checkpoint::generations() const {
  std::lock_guard lock(mu_);
  std::vector<GenerationOutcome> out;
  for (const auto& [_, o] : generations_) out.push_back(o);
  return out;
}

std::vector<FilterOutcome> Checkpoint::filters() const {
  std::lock_guard lock(mu_);
  std::vector<FilterOutcome> out;
  for (const auto& [_, o] : filters_) out.push_back(o);
  return out;
}

}  // namespace mind
