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

#include "mind/pipeline.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>

#include "mind/error.hpp"
#include "mind/text.hpp"

namespace mind {
namespace {

bool dead_letters(ErrorCode code) {
  return code == ErrorCode::kExhaustedRetries || code == ErrorCode::kPayloadTooLarge ||
         code == ErrorCode::kBackendRejected;
}

// Runs fn(i) for i in [0, n) on up to `workers` threads. The first exception
// stops the remaining items and is rethrown after all threads join.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn fn) {
  if (n == 0) return;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr first;
  std::mutex err_mu;
  auto body = [&] {
    while (!stop.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (!first) first = std::current_exception();
        stop.store(true);
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (threads == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  if (first) std::rethrow_exception(first);
}

std::string first_image(const Product& p) {
  return p.image_refs.empty() ? std::string() : p.image_refs.front();
}

}  // namespace

std::string run_fingerprint(const PromptForge& forge, const PipelineOptions& options) {
  std::string material = forge.fingerprint();
  material += "\nrelations=";
  for (Relation r : options.relations) {
    material += relation_name(r);
    material += ',';
  }
  material += "\nsamples=" + std::to_string(options.samples_per_pair);
  material += options.parse.strict_prefix ? "\nstrict" : "\nlenient";
  return text::to_hex(text::fnv1a64(material));
}

Pipeline::Pipeline(const Catalog& catalog, CompletionClient& client, const PromptForge& forge,
                   Checkpoint& checkpoint, PipelineOptions options)
    : catalog_(catalog),
      client_(client),
      forge_(forge),
      checkpoint_(checkpoint),
      options_(std::move(options)) {
  if (options_.samples_per_pair == 0) {
    fail(ErrorCode::kInvalidArgument, "samples per pair must be at least 1");
  }
  if (options_.relations.empty()) fail(ErrorCode::kInvalidArgument, "no relations selected");
  if (!options_.clock) options_.clock = &text::utc_now_iso8601;
}

std::optional<ModelResponse> Pipeline::call(const PromptBundle& bundle,
                                            std::atomic<std::size_t>& counter,
                                            std::string& error) {
  ++counter;
  try {
    return client_.complete(bundle);
  } catch (const Error& e) {
    if (!dead_letters(e.code())) throw;
    error = std::string(to_string(e.code())) + ": " + e.what();
    return std::nullopt;
  }
}

void Pipeline::check_abort(std::size_t dead, std::size_t total, const char* stage) const {
  if (total == 0) return;
  if (static_cast<double>(dead) > options_.abort_threshold * static_cast<double>(total)) {
    fail(ErrorCode::kRunAborted, std::string(stage) + " stage aborted: " + std::to_string(dead) +
                                     " of " + std::to_string(total) + " items dead-lettered");
  }
}

std::optional<Product> Pipeline::annotated(const std::string& product_id) const {
  auto outcome = checkpoint_.feature(product_id);
  if (!outcome || outcome->dead) return std::nullopt;
  Product p = catalog_.product(product_id);
  p.extracted_features = outcome->features;
  return p;
}

// --- stage 1 ---------------------------------------------------------------

FeatureStageResult Pipeline::run_feature_stage() {
  const std::vector<std::string> ids = catalog_.paired_product_ids();
  std::vector<std::string> todo;
  for (const auto& id : ids) {
    if (!checkpoint_.feature_done(id)) todo.push_back(id);
  }

  const std::size_t start = feature_requests_.load();
  std::atomic<std::size_t> dead{0};
  parallel_for(todo.size(), options_.workers, [&](std::size_t i) {
    const Product& p = catalog_.product(todo[i]);
    FeatureOutcome out;
    out.product_id = p.id;
    std::string error;
    auto reply = call(forge_.render_feature_prompt(p), feature_requests_, error);
    if (reply) {
      out.raw_response = reply->text;
      out.features = text::collapse_whitespace(reply->text);
    } else {
      out.dead = true;
      out.error = error;
    }
    checkpoint_.record(out);
    if (out.dead) check_abort(++dead, ids.size(), "feature");
  });

  FeatureStageResult result;
  for (const auto& id : ids) {
    auto o = checkpoint_.feature(id);
    if (!o) continue;
    if (o->dead) {
      ++result.dead_lettered;
      result.dead_letter.push_back(id);
    } else {
      ++result.annotated;
    }
  }
  result.requests = feature_requests_.load() - start;
  return result;
}

// --- stages 2 and 3 --------------------------------------------------------

std::vector<Pipeline::WorkItem> Pipeline::work_items() const {
  std::vector<WorkItem> items;
  items.reserve(catalog_.cobuys().size() * options_.relations.size() * options_.samples_per_pair);
  for (const auto& c : catalog_.cobuys()) {
    for (Relation r : options_.relations) {
      for (std::uint32_t s = 0; s < options_.samples_per_pair; ++s) {
        items.push_back(WorkItem{work_item_key(c.id, r, s), &c, r, s});
      }
    }
  }
  return items;
}

bool Pipeline::pair_ready(const CoBuyRecord& cobuy) const {
  for (const std::string* id : {&cobuy.product_a, &cobuy.product_b}) {
    auto o = checkpoint_.feature(*id);
    if (!o) {
      fail(ErrorCode::kFeaturesMissing,
           "product " + *id + " has no extracted features; run stage 1 first");
    }
    if (o->dead) return false;
  }
  return true;
}

void Pipeline::generate(const WorkItem& item) {
  const Product a = *annotated(item.cobuy->product_a);
  const Product b = *annotated(item.cobuy->product_b);
  GenerationOutcome out;
  out.key = item.key;
  out.candidate.cobuy_id = item.cobuy->id;
  out.candidate.relation = item.relation;
  out.candidate.sample_index = item.sample;
  out.candidate.created_at = options_.clock();

  std::string error;
  auto reply = call(forge_.render_intention_prompt(a, b, item.relation, item.sample),
                    generation_requests_, error);
  if (!reply) {
    out.status = GenerationOutcome::Status::kDead;
    out.detail = error;
  } else {
    out.candidate.raw_response = reply->text;
    auto parsed = parse_intention(reply->text, item.relation, forge_.relations(), options_.parse);
    if (auto* c = std::get_if<IntentionCandidate>(&parsed)) {
      out.status = GenerationOutcome::Status::kCandidate;
      out.candidate.text = c->text;
    } else {
      const auto& f = std::get<ParseFailure>(parsed);
      out.status = GenerationOutcome::Status::kParseFailure;
      out.failure = f.kind;
      out.detail = f.detail;
    }
  }
  checkpoint_.record(out);
}

void Pipeline::filter(const WorkItem& item) {
  const auto gen = checkpoint_.generation(item.key);
  const Product a = *annotated(item.cobuy->product_a);
  const Product b = *annotated(item.cobuy->product_b);
  FilterOutcome out;
  out.key = item.key;

  std::string error;
  auto reply = call(
      forge_.render_filter_prompt(a, b, item.relation, gen->candidate.text, item.sample),
      filter_requests_, error);
  if (!reply) {
    out.status = FilterOutcome::Status::kDead;
    out.detail = error;
  } else {
    auto parsed = parse_verdict(reply->text);
    if (auto* v = std::get_if<FilterVerdict>(&parsed)) {
      out.verdict = *v;
      out.status = v->accept ? FilterOutcome::Status::kAccepted : FilterOutcome::Status::kRejected;
    } else {
      const auto& f = std::get<ParseFailure>(parsed);
      out.status = FilterOutcome::Status::kUnparseable;
      out.verdict.raw_response = reply->text;
      out.failure = f.kind;
      out.detail = f.detail;
    }
  }
  checkpoint_.record(out);
}

GenerationStageResult Pipeline::tally_generation() const {
  GenerationStageResult r;
  for (const auto& item : work_items()) {
    auto g = checkpoint_.generation(item.key);
    if (!g) {
      auto fa = checkpoint_.feature(item.cobuy->product_a);
      auto fb = checkpoint_.feature(item.cobuy->product_b);
      if ((fa && fa->dead) || (fb && fb->dead)) ++r.skipped_items;
      continue;
    }
    switch (g->status) {
      case GenerationOutcome::Status::kCandidate: ++r.candidates; break;
      case GenerationOutcome::Status::kParseFailure:
        ++r.parse_failures;
        ++r.failures_by_class[*g->failure];
        break;
      case GenerationOutcome::Status::kDead: ++r.dead_lettered; break;
    }
  }
  return r;
}

FilterStageResult Pipeline::tally_filter() const {
  FilterStageResult r;
  for (const auto& item : work_items()) {
    auto g = checkpoint_.generation(item.key);
    if (!g || g->status != GenerationOutcome::Status::kCandidate) continue;
    auto f = checkpoint_.filter(item.key);
    if (!f) continue;
    ++r.candidates_in;
    switch (f->status) {
      case FilterOutcome::Status::kAccepted: ++r.accepted; break;
      case FilterOutcome::Status::kRejected: ++r.rejected; break;
      case FilterOutcome::Status::kUnparseable: ++r.unparseable; break;
      case FilterOutcome::Status::kDead: ++r.dead_lettered; break;
    }
  }
  return r;
}

GenerationStageResult Pipeline::run_generation_stage() {
  std::vector<WorkItem> todo;
  std::size_t ready_total = 0;
  for (auto& item : work_items()) {
    if (!pair_ready(*item.cobuy)) continue;
    ++ready_total;
    if (!checkpoint_.generation_done(item.key)) todo.push_back(std::move(item));
  }
  const std::size_t start = generation_requests_.load();
  std::atomic<std::size_t> dead{0};
  parallel_for(todo.size(), options_.workers, [&](std::size_t i) {
    generate(todo[i]);
    if (!checkpoint_.generation_done(todo[i].key)) {
      check_abort(++dead, ready_total, "generation");
    }
  });
  GenerationStageResult r = tally_generation();
  r.requests = generation_requests_.load() - start;
  return r;
}

FilterStageResult Pipeline::run_filter_stage() {
  std::vector<WorkItem> todo;
  std::size_t total = 0;
  for (auto& item : work_items()) {
    auto g = checkpoint_.generation(item.key);
    if (!g || g->status != GenerationOutcome::Status::kCandidate) continue;
    ++total;
    if (!checkpoint_.filter_done(item.key)) todo.push_back(std::move(item));
  }
  const std::size_t start = filter_requests_.load();
  std::atomic<std::size_t> dead{0};
  parallel_for(todo.size(), options_.workers, [&](std::size_t i) {
    filter(todo[i]);
    if (!checkpoint_.filter_done(todo[i].key)) check_abort(++dead, total, "filter");
  });
  FilterStageResult r = tally_filter();
  r.requests = filter_requests_.load() - start;
  return r;
}

RunResult Pipeline::run(const std::set<int>& stages, IntentionKb* kb) {
  for (int s : stages) {
    if (s < 1 || s > 3) fail(ErrorCode::kInvalidArgument, "unknown stage " + std::to_string(s));
  }
  RunResult result;
  if (stages.count(1)) result.features = run_feature_stage();

  const bool gen = stages.count(2) != 0;
  const bool fil = stages.count(3) != 0;
  if (gen && fil) {
    std::vector<WorkItem> todo;
    std::size_t ready_total = 0;
    for (auto& item : work_items()) {
      if (!pair_ready(*item.cobuy)) continue;
      ++ready_total;
      if (!checkpoint_.filter_done(item.key)) todo.push_back(std::move(item));
    }
    const std::size_t gen_start = generation_requests_.load();
    const std::size_t fil_start = filter_requests_.load();
    std::atomic<std::size_t> dead{0};
    parallel_for(todo.size(), options_.workers, [&](std::size_t i) {
      const WorkItem& item = todo[i];
      if (!checkpoint_.generation_done(item.key)) generate(item);
      auto g = checkpoint_.generation(item.key);
      if (g->status == GenerationOutcome::Status::kDead) {
        check_abort(++dead, ready_total, "generation");
        return;
      }
      if (g->status != GenerationOutcome::Status::kCandidate) return;
      filter(item);
      if (!checkpoint_.filter_done(item.key)) check_abort(++dead, ready_total, "filter");
    });
    result.generation = tally_generation();
    result.generation->requests = generation_requests_.load() - gen_start;
    result.filter = tally_filter();
    result.filter->requests = filter_requests_.load() - fil_start;
  } else if (gen) {
    result.generation = run_generation_stage();
  } else if (fil) {
    result.filter = run_filter_stage();
  }

  if (kb != nullptr) result.commit = commit(*kb);
  return result;
}

CommitResult Pipeline::commit(IntentionKb& kb) const {
  CommitResult r;
  const std::string& run_id = checkpoint_.run_id();

  for (const auto& id : catalog_.paired_product_ids()) {
    auto f = checkpoint_.feature(id);
    if (!f || !f->dead) continue;
    FailureRecord fr;
    fr.run_id = run_id;
    fr.key = id;
    fr.stage = "feature";
    fr.failure_class = "DeadLetter";
    fr.detail = f->error;
    if (kb.record_failure(fr)) ++r.failures_logged;
  }

  for (const auto& item : work_items()) {
    auto g = checkpoint_.generation(item.key);
    if (!g) continue;
    FailureRecord fr;
    fr.run_id = run_id;
    fr.key = item.key;
    fr.cobuy_id = item.cobuy->id;
    fr.relation = item.relation;
    fr.sample_index = item.sample;
    fr.created_at = g->candidate.created_at;

    if (g->status != GenerationOutcome::Status::kCandidate) {
      fr.stage = "generation";
      fr.failure_class = g->failure ? std::string(failure_class_name(*g->failure)) : "DeadLetter";
      fr.detail = g->detail;
      fr.raw_response = g->candidate.raw_response;
      if (kb.record_failure(fr)) ++r.failures_logged;
      continue;
    }

    auto f = checkpoint_.filter(item.key);
    if (!f) continue;
    if (f->status == FilterOutcome::Status::kUnparseable ||
        f->status == FilterOutcome::Status::kDead) {
      fr.stage = "filter";
      fr.failure_class = f->failure ? std::string(failure_class_name(*f->failure)) : "DeadLetter";
      fr.detail = f->detail;
      fr.raw_response = f->verdict.raw_response;
      if (kb.record_failure(fr)) ++r.failures_logged;
      continue;
    }

    const Product& a = catalog_.product(item.cobuy->product_a);
    const Product& b = catalog_.product(item.cobuy->product_b);
    IntentionRecord rec;
    rec.cobuy_id = item.cobuy->id;
    rec.product_a = a.id;
    rec.title_a = a.title;
    rec.image_a = first_image(a);
    rec.product_b = b.id;
    rec.title_b = b.title;
    rec.image_b = first_image(b);
    rec.relation = item.relation;
    rec.sample_index = item.sample;
    rec.intention = g->candidate.text;
    rec.verdict = f->verdict;
    rec.run_id = run_id;
    rec.created_at = g->candidate.created_at;
    if (kb.insert(std::move(rec))) {
      ++(f->verdict.accept ? r.inserted_accepted : r.inserted_rejected);
    } else {
      ++r.duplicates;
    }
  }
  return r;
}

}  // namespace mind
