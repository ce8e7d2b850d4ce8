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

#include "mind/kb.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <mutex>

#include <json.hpp>

#include "mind/error.hpp"
#include "mind/text.hpp"

namespace mind {
namespace {

using json = nlohmann::ordered_json;

std::string dedup_key(const IntentionRecord& r) {
  std::string key = r.cobuy_id;
  key += '\x1f';
  key += relation_name(r.relation);
  key += '\x1f';
  key += normalize_intention(r.intention);
  return key;
}

std::string failure_key(const FailureRecord& f) {
  return f.run_id + '\x1f' + f.stage + '\x1f' + f.key;
}

std::string failure_to_json_line(const FailureRecord& f) {
  json j;
  j["run_id"] = f.run_id;
  j["key"] = f.key;
  j["stage"] = f.stage;
  j["failure_class"] = f.failure_class;
  j["cobuy_id"] = f.cobuy_id;
  j["relation"] = relation_name(f.relation);
  j["sample"] = f.sample_index;
  j["detail"] = f.detail;
  j["raw_response"] = f.raw_response;
  j["created_at"] = f.created_at;
  return j.dump();
}

FailureRecord failure_from_json(const json& j) {
  FailureRecord f;
  f.run_id = j.value("run_id", "");
  f.key = j.value("key", "");
  f.stage = j.value("stage", "");
  f.failure_class = j.value("failure_class", "");
  f.cobuy_id = j.value("cobuy_id", "");
  if (auto r = parse_relation(j.value("relation", ""))) f.relation = *r;
  f.sample_index = j.value("sample", 0u);
  f.detail = j.value("detail", "");
  f.raw_response = j.value("raw_response", "");
  f.created_at = j.value("created_at", "");
  return f;
}

bool matches(const IntentionRecord& r, const KbQuery& q) {
  if (q.relation && r.relation != *q.relation) return false;
  if (q.product_id && r.product_a != *q.product_id && r.product_b != *q.product_id) return false;
  if (q.contains) {
    const std::string hay = text::to_lower(r.intention);
    if (hay.find(text::to_lower(*q.contains)) == std::string::npos) return false;
  }
  return true;
}

}  // namespace

std::optional<double> rfp_rate(std::size_t accepted, std::size_t rejected) {
  const std::size_t denom = accepted + rejected;
  if (denom == 0) return std::nullopt;
  return static_cast<double>(accepted) / static_cast<double>(denom);
}

std::string instruction_question(std::string_view title_a, std::string_view title_b) {
  std::string q = "Q: customer buys ";
  q += title_a;
  q += " and ";
  q += title_b;
  q += ". What is the most likely intention for buying them?";
  return q;
}

std::string instruction_answer(std::string_view intention) {
  std::string_view s = text::trim(intention);
  while (!s.empty() && s.back() == '.') {
    s.remove_suffix(1);
    s = text::trim(s);
  }
  return std::string(s) + ".";
}

std::string normalize_intention(std::string_view intention) {
  std::string s = text::to_lower(text::collapse_whitespace(intention));
  while (!s.empty() && (std::ispunct(static_cast<unsigned char>(s.back())) ||
                        std::isspace(static_cast<unsigned char>(s.back())))) {
    s.pop_back();
  }
  return s;
}

std::string record_to_json_line(const IntentionRecord& r) {
  json j;
  j["record_id"] = r.record_id;
  j["cobuy_id"] = r.cobuy_id;
  j["product_a"] = {{"id", r.product_a}, {"title", r.title_a}, {"image", r.image_a}};
  j["product_b"] = {{"id", r.product_b}, {"title", r.title_b}, {"image", r.image_b}};
  j["relation"] = relation_name(r.relation);
  j["sample"] = r.sample_index;
  j["intention"] = r.intention;
  j["verdict"] = {{"accept", r.verdict.accept},
                  {"rationale", r.verdict.rationale},
                  {"raw_response", r.verdict.raw_response}};
  j["run_id"] = r.run_id;
  j["created_at"] = r.created_at;
  return j.dump();
}

IntentionRecord record_from_json_line(std::string_view line) {
  const json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) fail(ErrorCode::kMalformed, "not a JSON object");
  try {
    IntentionRecord r;
    r.record_id = j.at("record_id").get<std::uint64_t>();
    r.cobuy_id = j.at("cobuy_id").get<std::string>();
    const auto& a = j.at("product_a");
    const auto& b = j.at("product_b");
    r.product_a = a.at("id").get<std::string>();
    r.title_a = a.value("title", "");
    r.image_a = a.value("image", "");
    r.product_b = b.at("id").get<std::string>();
    r.title_b = b.value("title", "");
    r.image_b = b.value("image", "");
    auto rel = parse_relation(j.at("relation").get<std::string>());
    if (!rel) fail(ErrorCode::kMalformed, "unknown relation");
    r.relation = *rel;
    r.sample_index = j.value("sample", 0u);
    r.intention = j.at("intention").get<std::string>();
    const auto& v = j.at("verdict");
    r.verdict.accept = v.at("accept").get<bool>();
    r.verdict.rationale = v.value("rationale", "");
    r.verdict.raw_response = v.value("raw_response", "");
    r.run_id = j.value("run_id", "");
    r.created_at = j.value("created_at", "");
    return r;
  } catch (const json::exception& e) {
    fail(ErrorCode::kMalformed, e.what());
  }
}

IntentionKb::IntentionKb(std::filesystem::path dir, bool durable, bool writable)
    : dir_(std::move(dir)), writable_(writable) {
  if (writable_) {
    accepted_out_ = io::DurableAppender(dir_ / "accepted.jsonl", durable);
    rejected_out_ = io::DurableAppender(dir_ / "rejected.jsonl", durable);
    failures_out_ = io::DurableAppender(dir_ / "failures.jsonl", durable);
  }
}

IntentionKb::IntentionKb(IntentionKb&& other) noexcept
    : dir_(std::move(other.dir_)),
      writable_(other.writable_),
      accepted_out_(std::move(other.accepted_out_)),
      rejected_out_(std::move(other.rejected_out_)),
      failures_out_(std::move(other.failures_out_)),
      accepted_(std::move(other.accepted_)),
      rejected_(std::move(other.rejected_)),
      failures_(std::move(other.failures_)),
      dedup_(std::move(other.dedup_)),
      failure_keys_(std::move(other.failure_keys_)),
      next_id_(other.next_id_),
      duplicates_(other.duplicates_) {}

IntentionKb IntentionKb::open(const std::filesystem::path& dir, bool durable) {
  std::filesystem::create_directories(dir);
  IntentionKb kb(dir, durable, true);
  kb.load();
  return kb;
}

IntentionKb IntentionKb::open_read_only(const std::filesystem::path& dir) {
  IntentionKb kb(dir, false, false);
  kb.load();
  return kb;
}

void IntentionKb::index(IntentionRecord record) {
  dedup_.insert(dedup_key(record));
  next_id_ = std::max(next_id_, record.record_id + 1);
  if (record.verdict.accept) {
    accepted_.push_back(std::move(record));
  } else {
    rejected_.push_back(std::move(record));
  }
}

void IntentionKb::load() {
  for (const char* name : {"accepted.jsonl", "rejected.jsonl"}) {
    const auto path = dir_ / name;
    if (!std::filesystem::exists(path)) continue;
    io::for_each_line(path, [&](std::string_view line, std::size_t line_no) {
      try {
        index(record_from_json_line(line));
      } catch (const Error& e) {
        fail(ErrorCode::kMalformed,
             path.string() + " line " + std::to_string(line_no) + ": " + e.what());
      }
    });
  }
  auto by_id = [](const IntentionRecord& x, const IntentionRecord& y) {
    return x.record_id < y.record_id;
  };
  std::sort(accepted_.begin(), accepted_.end(), by_id);
  std::sort(rejected_.begin(), rejected_.end(), by_id);
  if (!std::filesystem::exists(dir_ / "failures.jsonl")) return;
  io::for_each_line(dir_ / "failures.jsonl", [&](std::string_view line, std::size_t) {
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return;
    FailureRecord f = failure_from_json(j);
    failure_keys_.insert(failure_key(f));
    failures_.push_back(std::move(f));
  });
}

std::optional<std::uint64_t> IntentionKb::insert(IntentionRecord record) {
  if (!writable_) fail(ErrorCode::kIo, "knowledge base opened read-only");
  std::unique_lock lock(mu_);
  const std::string key = dedup_key(record);
  if (dedup_.count(key) != 0) {
    ++duplicates_;
    return std::nullopt;
  }
  record.record_id = next_id_;
  const std::string line = record_to_json_line(record);
  (record.verdict.accept ? accepted_out_ : rejected_out_).append_line(line);
  ++next_id_;
  dedup_.insert(key);
  const std::uint64_t id = record.record_id;
  (record.verdict.accept ? accepted_ : rejected_).push_back(std::move(record));
  return id;
}

bool IntentionKb::record_failure(const FailureRecord& failure) {
  if (!writable_) fail(ErrorCode::kIo, "knowledge base opened read-only");
  std::unique_lock lock(mu_);
  if (!failure_keys_.insert(failure_key(failure)).second) return false;
  failures_out_.append_line(failure_to_json_line(failure));
  failures_.push_back(failure);
  return true;
}

std::vector<IntentionRecord> IntentionKb::query(const KbQuery& filter) const {
  std::shared_lock lock(mu_);
  std::vector<IntentionRecord> out;
  if (!filter.accepted || *filter.accepted) {
    for (const auto& r : accepted_) {
      if (matches(r, filter)) out.push_back(r);
    }
  }
  if (!filter.accepted || !*filter.accepted) {
    for (const auto& r : rejected_) {
      if (matches(r, filter)) out.push_back(r);
    }
  }
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    return x.record_id < y.record_id;
  });
  return out;
}

std::vector<FailureRecord> IntentionKb::failures() const {
  std::shared_lock lock(mu_);
  return failures_;
}

KbStats IntentionKb::stats() const {
  std::shared_lock lock(mu_);
  KbStats s;
  for (Relation r : all_relations()) s.relations.push_back(RelationStats{r, 0, 0, std::nullopt});
  for (const auto& rec : accepted_) ++s.relations[static_cast<std::size_t>(rec.relation)].count;
  for (const auto& rec : rejected_) ++s.relations[static_cast<std::size_t>(rec.relation)].rejected;
  for (auto& rs : s.relations) rs.rfp_rate = rfp_rate(rs.count, rs.rejected);
  s.total = accepted_.size();
  s.rejected = rejected_.size();
  s.failures = failures_.size();
  s.duplicates_skipped = duplicates_;
  s.rfp_rate = rfp_rate(s.total, s.rejected);
  return s;
}

std::size_t IntentionKb::duplicates_skipped() const {
  std::shared_lock lock(mu_);
  return duplicates_;
}

std::size_t IntentionKb::export_instruction_tuning(const std::filesystem::path& out) const {
  std::shared_lock lock(mu_);
  if (accepted_.empty()) fail(ErrorCode::kEmptyExport, "knowledge base has no accepted intentions");
  std::string body;
  for (const auto& r : accepted_) {
    json j;
    j["question"] = instruction_question(r.title_a, r.title_b);
    j["answer"] = instruction_answer(r.intention);
    body += j.dump();
    body += '\n';
  }
  io::write_file_atomic(out, body);
  return accepted_.size();
}

}  // namespace mind
