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

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mind/analytics.hpp"
#include "mind/jsonl.hpp"
#include "mind/kb.hpp"
#include "mind/relation.hpp"

namespace mind {

enum class Aspect { kPlausibility, kTypicality, kHumanCentric, kFilterRationale };
inline constexpr std::size_t kAspectCount = 4;
inline constexpr std::size_t kRatersPerTask = 3;
inline constexpr std::array<Aspect, kAspectCount> kAllAspects = {
    Aspect::kPlausibility, Aspect::kTypicality, Aspect::kHumanCentric, Aspect::kFilterRationale};

// "plausibility", "typicality", "human_centric", "filter_rationale".
std::string_view aspect_name(Aspect a);
std::optional<Aspect> parse_aspect(std::string_view name);

enum class TaskStatus { kOpen, kComplete };

struct AnnotationTask {
  std::string task_id;
  std::uint64_t record_id = 0;
  std::string title_a;
  std::string title_b;
  std::string image_a;
  std::string image_b;
  Relation relation = Relation::kOpen;
  std::string intention;
  bool accepted = true;
  std::string rationale;
  std::vector<std::string> raters;  // assigned, in assignment order
  TaskStatus status = TaskStatus::kOpen;
};

struct AspectRatings {
  std::string rater_id;
  std::string task_id;
  std::array<int, kAspectCount> votes{};  // 0 or 1, indexed by Aspect
  std::string submitted_at;

  int vote(Aspect a) const { return votes[static_cast<std::size_t>(a)]; }
};

// Tasks and ratings persisted under one directory as tasks.jsonl and
// ratings.jsonl. Ratings are append-only; task status and assignments are
// derived from them on open. Thread-safe.
class AnnotationStore {
 public:
  static AnnotationStore open(const std::filesystem::path& dir, bool durable = true);

  AnnotationStore(AnnotationStore&& other) noexcept;
  AnnotationStore(const AnnotationStore&) = delete;

  // Seeded uniform sample without replacement of `source`; one new open task
  // per sampled record. Throws kInsufficientRecords.
  std::vector<std::string> create_tasks(std::size_t sample_size, std::uint64_t seed,
                                        const std::vector<IntentionRecord>& source);

  // An open task the rater has not rated yet: first one already assigned to
  // them, else the first with spare capacity, which the rater then holds.
  std::optional<AnnotationTask> next_task(const std::string& rater_id);

  // Throws kUnknownTask.
  AnnotationTask task(std::string_view task_id) const;
  std::vector<AnnotationTask> tasks() const;
  std::vector<AspectRatings> ratings(std::string_view task_id) const;

  // Throws kUnknownTask, kTaskComplete, kDuplicateSubmission,
  // kCapacityExceeded, kValidation. The third distinct rater completes the task.
  TaskStatus submit(AspectRatings rating);

  std::size_t completed_count() const;
  std::size_t open_count() const;

 private:
  struct Entry {
    AnnotationTask task;
    std::vector<AspectRatings> ratings;
  };

  AnnotationStore(std::filesystem::path dir, bool durable);
  void load();
  Entry& entry(std::string_view task_id);
  const Entry& entry(std::string_view task_id) const;

  std::filesystem::path dir_;
  io::DurableAppender tasks_out_;
  io::DurableAppender ratings_out_;
  mutable std::mutex mu_;
  std::vector<Entry> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

// --- statistics ------------------------------------------------------------

// 1 iff more than half the votes are 1 (2 of 3). Throws kTaskIncomplete when
// fewer than three ratings are present.
std::array<int, kAspectCount> majority_vote(const std::vector<AspectRatings>& ratings);
int majority(const std::vector<int>& votes);

// Fraction of rater pairs that agree.
double pairwise_agreement(const std::vector<int>& votes);
// Mean of per-item pairwise agreement. Throws kEmptyInput.
double pairwise_agreement(const std::vector<std::vector<int>>& items);

// matrix[i][j] = raters who put item i in category j.
// Throws kRowSumMismatch, kTooFewItems (< 2), kTooFewCategories (< 2).
double fleiss_kappa(const std::vector<std::vector<std::size_t>>& matrix, std::size_t n_raters);

struct AgreementReport {
  std::optional<Aspect> aspect;  // nullopt: all four aspects pooled as items
  std::size_t n_tasks = 0;       // complete tasks
  std::size_t n_items = 0;
  std::size_t n_raters = kRatersPerTask;
  std::size_t n_categories = 2;
  std::optional<double> pairwise_agreement;
  std::optional<double> fleiss_kappa;
};

AgreementReport agreement_report(const std::vector<std::vector<AspectRatings>>& complete_tasks,
                                 std::optional<Aspect> aspect);
AgreementReport agreement_report(const AnnotationStore& store, std::optional<Aspect> aspect);

// Share of positive votes per aspect over complete tasks; nullopt when none.
std::array<std::optional<double>, kAspectCount> positive_rates(const AnnotationStore& store);

// Per-relation Likert typicality over complete tasks.
std::vector<RelationTypicality> typicality_report(const AnnotationStore& store,
                                                  const LikertMapping& mapping = {});

inline constexpr int kQualificationPercent = 87;

struct QualificationResult {
  std::size_t matches = 0;
  std::size_t total = 0;
  double accuracy = 0.0;
  bool passed = false;  // strictly over 87%
};

// Answers compare after trimming and lowercasing. Throws kLengthMismatch
// (including empty input).
QualificationResult qualification_score(const std::vector<std::string>& answers,
                                        const std::vector<std::string>& key);

}  // namespace mind
