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

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mind/jsonl.hpp"
#include "mind/parsers.hpp"
#include "mind/relation.hpp"

namespace mind {

// Stable key of one generation work item: "<cobuy_id>|<Relation>|<sample>".
std::string work_item_key(std::string_view cobuy_id, Relation relation, std::uint32_t sample);

struct FeatureOutcome {
  std::string product_id;
  bool dead = false;
  std::string features;
  std::string raw_response;
  std::string error;
};

struct GenerationOutcome {
  enum class Status { kCandidate, kParseFailure, kDead };
  std::string key;
  Status status = Status::kCandidate;
  IntentionCandidate candidate;  // cobuy_id/relation/sample_index always set
  std::optional<FailureClass> failure;
  std::string detail;
};

struct FilterOutcome {
  enum class Status { kAccepted, kRejected, kUnparseable, kDead };
  std::string key;
  Status status = Status::kAccepted;
  FilterVerdict verdict;
  std::optional<FailureClass> failure;
  std::string detail;
};

std::string_view status_name(GenerationOutcome::Status s);
std::string_view status_name(FilterOutcome::Status s);

// Per-run stage cursors under <root>/<run_id>/:
//   manifest.json                     run id + config fingerprint
//   stage1.jsonl stage2.jsonl stage3.jsonl   one line per finished item
// Every line is fsync'd as it is appended; the last line for a key wins
// when reopening, so a dead-lettered item can later complete. Thread-safe.
class Checkpoint {
 public:
  static bool exists(const std::filesystem::path& root, std::string_view run_id);
  // Throws kInvalidArgument when the run already exists.
  static Checkpoint create(const std::filesystem::path& root, std::string run_id,
                           std::string fingerprint, bool durable = true);
  // Throws kNotFound for an unknown run and kConfigMismatch when the
  // fingerprint differs from the one the run was created with.
  static Checkpoint resume(const std::filesystem::path& root, std::string run_id,
                           std::string_view fingerprint, bool durable = true);

  Checkpoint(Checkpoint&& other) noexcept;
  Checkpoint& operator=(Checkpoint&&) = delete;
  Checkpoint(const Checkpoint&) = delete;

  const std::string& run_id() const { return run_id_; }
  const std::string& fingerprint() const { return fingerprint_; }
  const std::filesystem::path& dir() const { return dir_; }

  void record(const FeatureOutcome& outcome);
  void record(const GenerationOutcome& outcome);
  void record(const FilterOutcome& outcome);

  std::optional<FeatureOutcome> feature(std::string_view product_id) const;
  std::optional<GenerationOutcome> generation(std::string_view key) const;
  std::optional<FilterOutcome> filter(std::string_view key) const;

  // A dead-lettered item is not complete.
  bool feature_done(std::string_view product_id) const;
  bool generation_done(std::string_view key) const;
  bool filter_done(std::string_view key) const;

  std::vector<FeatureOutcome> features() const;
  std::vector<GenerationOutcome> generations() const;
  std::vector<FilterOutcome> filters() const;

 private:
  Checkpoint(std::filesystem::path dir, std::string run_id, std::string fingerprint, bool durable);
  void load();

  std::filesystem::path dir_;
  std::string run_id_;
  std::string fingerprint_;
  io::DurableAppender stage1_;
  io::DurableAppender stage2_;
  io::DurableAppender stage3_;
  mutable std::mutex mu_;
  std::map<std::string, FeatureOutcome, std::less<>> features_;
  std::map<std::string, GenerationOutcome, std::less<>> generations_;
  std::map<std::string, FilterOutcome, std::less<>> filters_;
};

}  // namespace mind
