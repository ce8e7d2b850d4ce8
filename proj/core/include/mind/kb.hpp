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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "mind/jsonl.hpp"
#include "mind/parsers.hpp"
#include "mind/relation.hpp"

namespace mind {

struct IntentionRecord {
  std::uint64_t record_id = 0;
  std::string cobuy_id;
  std::string product_a;
  std::string title_a;
  std::string product_b;
  std::string title_b;
  std::string image_a;  // first image ref, for the review UI
  std::string image_b;
  Relation relation = Relation::kOpen;
  std::uint32_t sample_index = 0;
  std::string intention;
  FilterVerdict verdict;
  std::string run_id;
  std::string created_at;
};

// A work item that never produced a verdict: parse failures of either stage
// and dead-lettered requests.
struct FailureRecord {
  std::string run_id;
  std::string key;
  std::string stage;          // "feature" | "generation" | "filter"
  std::string failure_class;  // FailureClass name, or "DeadLetter"
  std::string cobuy_id;
  Relation relation = Relation::kOpen;
  std::uint32_t sample_index = 0;
  std::string detail;
  std::string raw_response;
  std::string created_at;
};

struct KbQuery {
  std::optional<Relation> relation;
  std::optional<std::string> product_id;  // matches either endpoint
  std::optional<std::string> contains;    // case-insensitive substring of the intention
  std::optional<bool> accepted;
};

struct RelationStats {
  Relation relation = Relation::kOpen;
  std::size_t count = 0;  // accepted
  std::size_t rejected = 0;
  std::optional<double> rfp_rate;  // accepted / (accepted + rejected)
};

struct KbStats {
  std::vector<RelationStats> relations;  // every relation, table order
  std::size_t total = 0;                 // accepted
  std::size_t rejected = 0;
  std::size_t failures = 0;
  std::size_t duplicates_skipped = 0;
  std::optional<double> rfp_rate;
};

// Accepted/rejected split for one relation; nullopt when both are zero.
std::optional<double> rfp_rate(std::size_t accepted, std::size_t rejected);

// "Q: customer buys <a> and <b>. What is the most likely intention for buying them?"
std::string instruction_question(std::string_view title_a, std::string_view title_b);
// The intention with trailing periods collapsed to exactly one.
std::string instruction_answer(std::string_view intention);

// Lowercased, whitespace-collapsed, terminal punctuation stripped.
std::string normalize_intention(std::string_view intention);

std::string record_to_json_line(const IntentionRecord& record);
IntentionRecord record_from_json_line(std::string_view line);

// Append-only store under one directory:
//   accepted.jsonl   records with an accepting verdict
//   rejected.jsonl   records the filter turned down
//   failures.jsonl   parse failures and dead letters
// The in-memory index is rebuilt from the files on open. One writer,
// any number of concurrent readers.
class IntentionKb {
 public:
  static IntentionKb open(const std::filesystem::path& dir, bool durable = true);
  // Never creates or writes files; a missing directory reads as empty and
  // insert/record_failure throw kIo.
  static IntentionKb open_read_only(const std::filesystem::path& dir);

  IntentionKb(IntentionKb&& other) noexcept;
  IntentionKb(const IntentionKb&) = delete;

  // Routes by verdict.accept. Returns the new record id, or nullopt when
  // (cobuy_id, relation, normalized intention) is already stored.
  std::optional<std::uint64_t> insert(IntentionRecord record);
  // Skips a failure already logged for the same (run_id, stage, key).
  bool record_failure(const FailureRecord& failure);

  // Ordered by record_id.
  std::vector<IntentionRecord> query(const KbQuery& filter) const;
  std::vector<FailureRecord> failures() const;
  KbStats stats() const;
  std::size_t duplicates_skipped() const;

  // One {"question","answer"} line per accepted record. Throws kEmptyExport
  // when nothing is accepted.
  std::size_t export_instruction_tuning(const std::filesystem::path& out) const;

  const std::filesystem::path& dir() const { return dir_; }

 private:
  IntentionKb(std::filesystem::path dir, bool durable, bool writable);
  void load();
  void index(IntentionRecord record);

  std::filesystem::path dir_;
  bool writable_ = true;
  io::DurableAppender accepted_out_;
  io::DurableAppender rejected_out_;
  io::DurableAppender failures_out_;
  mutable std::shared_mutex mu_;
  std::vector<IntentionRecord> accepted_;
  std::vector<IntentionRecord> rejected_;
  std::vector<FailureRecord> failures_;
  std::unordered_set<std::string> dedup_;
  std::set<std::string> failure_keys_;
  std::uint64_t next_id_ = 1;
  std::size_t duplicates_ = 0;
};

}  // namespace mind
