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

#include "mind/annotation.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "mind/error.hpp"
#include "mind/text.hpp"

namespace mind {
namespace {

using json = nlohmann::ordered_json;

json task_to_json(const AnnotationTask& t) {
  json j;
  j["task_id"] = t.task_id;
  j["record_id"] = t.record_id;
  j["title_a"] = t.title_a;
  j["title_b"] = t.title_b;
  j["image_a"] = t.image_a;
  j["image_b"] = t.image_b;
  j["relation"] = relation_name(t.relation);
  j["intention"] = t.intention;
  j["accepted"] = t.accepted;
  j["rationale"] = t.rationale;
  return j;
}

AnnotationTask task_from_json(const json& j) {
  AnnotationTask t;
  t.task_id = j.at("task_id").get<std::string>();
  t.record_id = j.at("record_id").get<std::uint64_t>();
  t.title_a = j.value("title_a", "");
  t.title_b = j.value("title_b", "");
  t.image_a = j.value("image_a", "");
  t.image_b = j.value("image_b", "");
  if (auto r = parse_relation(j.value("relation", ""))) t.relation = *r;
  t.intention = j.value("intention", "");
  t.accepted = j.value("accepted", true);
  t.rationale = j.value("rationale", "");
  return t;
}

json rating_to_json(const AspectRatings& r) {
  json j;
  j["task_id"] = r.task_id;
  j["rater_id"] = r.rater_id;
  for (Aspect a : kAllAspects) j[std::string(aspect_name(a))] = r.vote(a);
  j["submitted_at"] = r.submitted_at;
  return j;
}

AspectRatings rating_from_json(const json& j) {
  AspectRatings r;
  r.task_id = j.at("task_id").get<std::string>();
  r.rater_id = j.at("rater_id").get<std::string>();
  for (Aspect a : kAllAspects) {
    r.votes[static_cast<std::size_t>(a)] = j.at(std::string(aspect_name(a))).get<int>();
  }
  r.submitted_at = j.value("submitted_at", "");
  return r;
}

std::string task_id_for(std::size_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "t%05zu", n);
  return buf;
}

bool has_rated(const std::vector<AspectRatings>& ratings, const std::string& rater) {
  return std::any_of(ratings.begin(), ratings.end(),
                     [&](const AspectRatings& r) { return r.rater_id == rater; });
}

std::vector<int> aspect_votes(const std::vector<AspectRatings>& ratings, Aspect a) {
  std::vector<int> votes;
  votes.reserve(ratings.size());
  for (const auto& r : ratings) votes.push_back(r.vote(a));
  return votes;
}

std::vector<std::vector<AspectRatings>> complete_ratings(const AnnotationStore& store) {
  std::vector<std::vector<AspectRatings>> out;
  for (const auto& t : store.tasks()) {
    if (t.status == TaskStatus::kComplete) out.push_back(store.ratings(t.task_id));
  }
  return out;
}

}  // namespace

std::string_view aspect_name(Aspect a) {
  switch (a) {
    case Aspect::kPlausibility: return "plausibility";
    case Aspect::kTypicality: return "typicality";
    case Aspect::kHumanCentric: return "human_centric";
    case Aspect::kFilterRationale: return "filter_rationale";
  }
  return "";
}

std::optional<Aspect> parse_aspect(std::string_view name) {
  for (Aspect a : kAllAspects) {
    if (text::iequals(aspect_name(a), name)) return a;
  }
  return std::nullopt;
}

// --- store -----------------------------------------------------------------

AnnotationStore::AnnotationStore(std::filesystem::path dir, bool durable)
    : dir_(std::move(dir)),
      tasks_out_(dir_ / "tasks.jsonl", durable),
      ratings_out_(dir_ / "ratings.jsonl", durable) {}

AnnotationStore::AnnotationStore(AnnotationStore&& other) noexcept
    : dir_(std::move(other.dir_)),
      tasks_out_(std::move(other.tasks_out_)),
      ratings_out_(std::move(other.ratings_out_)),
      entries_(std::move(other.entries_)),
      index_(std::move(other.index_)) {}

AnnotationStore AnnotationStore::open(const std::filesystem::path& dir, bool durable) {
  std::filesystem::create_directories(dir);
  AnnotationStore s(dir, durable);
  s.load();
  return s;
}

void AnnotationStore::load() {
  auto parse_line = [](std::string_view line, std::size_t line_no,
                       const std::filesystem::path& path) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      fail(ErrorCode::kMalformed, path.string() + " line " + std::to_string(line_no));
    }
    return j;
  };
  const auto tasks_path = dir_ / "tasks.jsonl";
  io::for_each_line(tasks_path, [&](std::string_view line, std::size_t n) {
    AnnotationTask t = task_from_json(parse_line(line, n, tasks_path));
    index_.emplace(t.task_id, entries_.size());
    entries_.push_back(Entry{std::move(t), {}});
  });
  const auto ratings_path = dir_ / "ratings.jsonl";
  io::for_each_line(ratings_path, [&](std::string_view line, std::size_t n) {
    AspectRatings r = rating_from_json(parse_line(line, n, ratings_path));
    Entry& e = entry(r.task_id);
    e.task.raters.push_back(r.rater_id);
    e.ratings.push_back(std::move(r));
    if (e.ratings.size() >= kRatersPerTask) e.task.status = TaskStatus::kComplete;
  });
}

AnnotationStore::Entry& AnnotationStore::entry(std::string_view task_id) {
  auto it = index_.find(task_id);
  if (it == index_.end()) fail(ErrorCode::kUnknownTask, "unknown task " + std::string(task_id));
  return entries_[it->second];
}

const AnnotationStore::Entry& AnnotationStore::entry(std::string_view task_id) const {
  auto it = index_.find(task_id);
  if (it == index_.end()) fail(ErrorCode::kUnknownTask, "unknown task " + std::string(task_id));
  return entries_[it->second];
}

std::vector<std::string> AnnotationStore::create_tasks(std::size_t sample_size, std::uint64_t seed,
                                                       const std::vector<IntentionRecord>& source) {
  if (sample_size > source.size()) {
    fail(ErrorCode::kInsufficientRecords, "asked for " + std::to_string(sample_size) +
                                              " tasks but only " + std::to_string(source.size()) +
                                              " records are available");
  }
  std::lock_guard lock(mu_);
  std::vector<std::string> ids;
  for (std::size_t idx : text::sample_indices(source.size(), sample_size, seed)) {
    const IntentionRecord& r = source[idx];
    AnnotationTask t;
    t.task_id = task_id_for(entries_.size() + 1);
    t.record_id = r.record_id;
    t.title_a = r.title_a;
    t.title_b = r.title_b;
    t.image_a = r.image_a;
    t.image_b = r.image_b;
    t.relation = r.relation;
    t.intention = r.intention;
    t.accepted = r.verdict.accept;
    t.rationale = r.verdict.rationale;
    tasks_out_.append_line(task_to_json(t).dump());
    ids.push_back(t.task_id);
    index_.emplace(t.task_id, entries_.size());
    entries_.push_back(Entry{std::move(t), {}});
  }
  return ids;
}

std::optional<AnnotationTask> AnnotationStore::next_task(const std::string& rater_id) {
  std::lock_guard lock(mu_);
  for (const Entry& e : entries_) {
    if (e.task.status != TaskStatus::kOpen || has_rated(e.ratings, rater_id)) continue;
    const auto& r = e.task.raters;
    if (std::find(r.begin(), r.end(), rater_id) != r.end()) return e.task;
  }
  for (Entry& e : entries_) {
    if (e.task.status != TaskStatus::kOpen || e.task.raters.size() >= kRatersPerTask) continue;
    const auto& r = e.task.raters;
    if (has_rated(e.ratings, rater_id) || std::find(r.begin(), r.end(), rater_id) != r.end()) continue;
    e.task.raters.push_back(rater_id);
    return e.task;
  }
  return std::nullopt;
}

AnnotationTask AnnotationStore::task(std::string_view task_id) const {
  std::lock_guard lock(mu_);
  return entry(task_id).task;
}

std::vector<AnnotationTask> AnnotationStore::tasks() const {
  std::lock_guard lock(mu_);
  std::vector<AnnotationTask> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.task);
  return out;
}

std::vector<AspectRatings> AnnotationStore::ratings(std::string_view task_id) const {
  std::lock_guard lock(mu_);
  return entry(task_id).ratings;
}

TaskStatus AnnotationStore::submit(AspectRatings rating) {
  if (text::trim(rating.rater_id).empty()) fail(ErrorCode::kValidation, "rater id is required");
  for (int v : rating.votes) {
    if (v != 0 && v != 1) fail(ErrorCode::kValidation, "aspect votes must be 0 or 1");
  }
  std::lock_guard lock(mu_);
  Entry& e = entry(rating.task_id);
  if (e.task.status == TaskStatus::kComplete) {
    fail(ErrorCode::kTaskComplete, "task " + rating.task_id + " is already complete");
  }
  if (has_rated(e.ratings, rating.rater_id)) {
    fail(ErrorCode::kDuplicateSubmission,
         "rater " + rating.rater_id + " already rated task " + rating.task_id);
  }
  auto& raters = e.task.raters;
  const bool assigned = std::find(raters.begin(), raters.end(), rating.rater_id) != raters.end();
  if (!assigned && raters.size() >= kRatersPerTask) {
    fail(ErrorCode::kCapacityExceeded, "task " + rating.task_id + " already has " +
                                           std::to_string(kRatersPerTask) + " raters");
  }
  if (rating.submitted_at.empty()) rating.submitted_at = text::utc_now_iso8601();
  ratings_out_.append_line(rating_to_json(rating).dump());
  if (!assigned) raters.push_back(rating.rater_id);
  e.ratings.push_back(std::move(rating));
  if (e.ratings.size() >= kRatersPerTask) e.task.status = TaskStatus::kComplete;
  return e.task.status;
}

std::size_t AnnotationStore::completed_count() const {
  std::lock_guard lock(mu_);
  return static_cast<std::size_t>(std::count_if(entries_.begin(), entries_.end(), [](const Entry& e) {
    return e.task.status == TaskStatus::kComplete;
  }));
}

std::size_t AnnotationStore::open_count() const {
  std::lock_guard lock(mu_);
  return static_cast<std::size_t>(std::count_if(entries_.begin(), entries_.end(), [](const Entry& e) {
    return e.task.status == TaskStatus::kOpen;
  }));
}

// --- statistics ------------------------------------------------------------

int majority(const std::vector<int>& votes) {
  const auto ones = std::count(votes.begin(), votes.end(), 1);
  return 2 * static_cast<std::size_t>(ones) > votes.size() ? 1 : 0;
}

std::array<int, kAspectCount> majority_vote(const std::vector<AspectRatings>& ratings) {
  if (ratings.size() < kRatersPerTask) {
    fail(ErrorCode::kTaskIncomplete, "task has " + std::to_string(ratings.size()) + " of " +
                                         std::to_string(kRatersPerTask) + " ratings");
  }
  std::array<int, kAspectCount> out{};
  for (Aspect a : kAllAspects) out[static_cast<std::size_t>(a)] = majority(aspect_votes(ratings, a));
  return out;
}

double pairwise_agreement(const std::vector<int>& votes) {
  if (votes.size() < 2) fail(ErrorCode::kInvalidArgument, "agreement needs at least two votes");
  std::size_t agree = 0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < votes.size(); ++i) {
    for (std::size_t j = i + 1; j < votes.size(); ++j) {
      ++pairs;
      if (votes[i] == votes[j]) ++agree;
    }
  }
  return static_cast<double>(agree) / static_cast<double>(pairs);
}

double pairwise_agreement(const std::vector<std::vector<int>>& items) {
  if (items.empty()) fail(ErrorCode::kEmptyInput, "no complete tasks");
  double sum = 0.0;
  for (const auto& votes : items) sum += pairwise_agreement(votes);
  return sum / static_cast<double>(items.size());
}

double fleiss_kappa(const std::vector<std::vector<std::size_t>>& matrix, std::size_t n_raters) {
  if (matrix.size() < 2) fail(ErrorCode::kTooFewItems, "kappa needs at least 2 items");
  const std::size_t k = matrix.front().size();
  if (k < 2) fail(ErrorCode::kTooFewCategories, "kappa needs at least 2 categories");
  if (n_raters < 2) fail(ErrorCode::kInvalidArgument, "kappa needs at least 2 raters");

  const double n = static_cast<double>(n_raters);
  const double items = static_cast<double>(matrix.size());
  std::vector<double> column(k, 0.0);
  double p_bar = 0.0;
  bool unanimous = true;
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    const auto& row = matrix[i];
    if (row.size() != k) {
      fail(ErrorCode::kRowSumMismatch, "row " + std::to_string(i) + " has " +
                                           std::to_string(row.size()) + " categories, expected " +
                                           std::to_string(k));
    }
    std::size_t total = 0;
    double sq = 0.0;
    std::size_t nonzero = 0;
    for (std::size_t j = 0; j < k; ++j) {
      total += row[j];
      column[j] += static_cast<double>(row[j]);
      sq += static_cast<double>(row[j]) * static_cast<double>(row[j]);
      if (row[j] != 0) ++nonzero;
    }
    if (total != n_raters) {
      fail(ErrorCode::kRowSumMismatch, "row " + std::to_string(i) + " sums to " +
                                           std::to_string(total) + ", expected " +
                                           std::to_string(n_raters));
    }
    if (nonzero != 1) unanimous = false;
    p_bar += (sq - n) / (n * (n - 1.0));
  }
  if (unanimous) return 1.0;
  p_bar /= items;
  double p_e = 0.0;
  for (double c : column) {
    const double p = c / (items * n);
    p_e += p * p;
  }
  return (p_bar - p_e) / (1.0 - p_e);
}

AgreementReport agreement_report(const std::vector<std::vector<AspectRatings>>& complete_tasks,
                                 std::optional<Aspect> aspect) {
  AgreementReport r;
  r.aspect = aspect;
  r.n_tasks = complete_tasks.size();
  std::vector<std::vector<int>> items;
  for (const auto& ratings : complete_tasks) {
    if (aspect) {
      items.push_back(aspect_votes(ratings, *aspect));
    } else {
      for (Aspect a : kAllAspects) items.push_back(aspect_votes(ratings, a));
    }
  }
  r.n_items = items.size();
  if (items.empty()) return r;
  r.n_raters = items.front().size();
  r.pairwise_agreement = pairwise_agreement(items);
  if (items.size() >= 2) {
    std::vector<std::vector<std::size_t>> matrix;
    matrix.reserve(items.size());
    for (const auto& votes : items) {
      const auto ones = static_cast<std::size_t>(std::count(votes.begin(), votes.end(), 1));
      matrix.push_back({votes.size() - ones, ones});
    }
    r.fleiss_kappa = fleiss_kappa(matrix, r.n_raters);
  }
  return r;
}

AgreementReport agreement_report(const AnnotationStore& store, std::optional<Aspect> aspect) {
  return agreement_report(complete_ratings(store), aspect);
}

std::array<std::optional<double>, kAspectCount> positive_rates(const AnnotationStore& store) {
  std::array<std::size_t, kAspectCount> ones{};
  std::size_t total = 0;
  for (const auto& ratings : complete_ratings(store)) {
    for (const auto& r : ratings) {
      for (std::size_t a = 0; a < kAspectCount; ++a) ones[a] += static_cast<std::size_t>(r.votes[a]);
      ++total;
    }
  }
  std::array<std::optional<double>, kAspectCount> out{};
  if (total == 0) return out;
  for (std::size_t a = 0; a < kAspectCount; ++a) {
    out[a] = static_cast<double>(ones[a]) / static_cast<double>(total);
  }
  return out;
}

std::vector<RelationTypicality> typicality_report(const AnnotationStore& store,
                                                  const LikertMapping& mapping) {
  std::vector<TypicalityItem> items;
  for (const auto& t : store.tasks()) {
    if (t.status != TaskStatus::kComplete) continue;
    items.push_back(TypicalityItem{t.relation, aspect_votes(store.ratings(t.task_id),
                                                            Aspect::kTypicality)});
  }
  return typicality_by_relation(items, mapping);
}

QualificationResult qualification_score(const std::vector<std::string>& answers,
                                        const std::vector<std::string>& key) {
  if (answers.size() != key.size() || key.empty()) {
    fail(ErrorCode::kLengthMismatch, std::to_string(answers.size()) + " answers for a key of " +
                                         std::to_string(key.size()));
  }
  QualificationResult r;
  r.total = key.size();
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (text::to_lower(text::trim(answers[i])) == text::to_lower(text::trim(key[i]))) ++r.matches;
  }
  r.accuracy = static_cast<double>(r.matches) / static_cast<double>(r.total);
  r.passed = r.matches * 100 > static_cast<std::size_t>(kQualificationPercent) * r.total;
  return r;
}

}  // namespace mind
