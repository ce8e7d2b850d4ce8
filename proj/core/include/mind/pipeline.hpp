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

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mind/catalog.hpp"
#include "mind/checkpoint.hpp"
#include "mind/gateway.hpp"
#include "mind/kb.hpp"
#include "mind/parsers.hpp"
#include "mind/prompt.hpp"
#include "mind/relation.hpp"
#include "mind/text.hpp"

namespace mind {

struct PipelineOptions {
  std::vector<Relation> relations{all_relations().begin(), all_relations().end()};
  std::uint32_t samples_per_pair = 1;
  IntentionParseOptions parse;
  int workers = 4;
  // Abort when more than this fraction of a stage's items dead-letter.
  double abort_threshold = 0.2;
  // Timestamp source for candidates and KB records.
  std::function<std::string()> clock = &text::utc_now_iso8601;
};

// Counts below are cumulative over the checkpoint (so a resumed run reports
// the whole run), except `requests`, which counts calls made by this call.
struct FeatureStageResult {
  std::size_t annotated = 0;
  std::size_t dead_lettered = 0;
  std::vector<std::string> dead_letter;  // product ids
  std::size_t requests = 0;
};

struct GenerationStageResult {
  std::size_t candidates = 0;
  std::size_t parse_failures = 0;
  std::map<FailureClass, std::size_t> failures_by_class;
  std::size_t dead_lettered = 0;
  std::size_t skipped_items = 0;  // pairs with a dead-lettered product
  std::size_t requests = 0;
};

struct FilterStageResult {
  std::size_t candidates_in = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t unparseable = 0;
  std::size_t dead_lettered = 0;
  std::size_t requests = 0;
};

struct CommitResult {
  std::size_t inserted_accepted = 0;
  std::size_t inserted_rejected = 0;
  std::size_t duplicates = 0;
  std::size_t failures_logged = 0;
};

struct RunResult {
  std::optional<FeatureStageResult> features;
  std::optional<GenerationStageResult> generation;
  std::optional<FilterStageResult> filter;
  std::optional<CommitResult> commit;
};

// Hash of the prompt configuration plus every run option that changes the
// work-item set or the replies.
std::string run_fingerprint(const PromptForge& forge, const PipelineOptions& options);

// Drives the three stages over a catalog. Independent work items run on a
// bounded worker pool; each finished item is recorded in the checkpoint
// before the next is picked up, so an interrupted run resumes where it
// stopped.
class Pipeline {
 public:
  Pipeline(const Catalog& catalog, CompletionClient& client, const PromptForge& forge,
           Checkpoint& checkpoint, PipelineOptions options = {});

  FeatureStageResult run_feature_stage();
  GenerationStageResult run_generation_stage();
  FilterStageResult run_filter_stage();

  // Runs the requested stages (1, 2, 3). When both 2 and 3 are requested an
  // item moves to the filter as soon as its candidate parses. Commits into
  // kb when given.
  RunResult run(const std::set<int>& stages, IntentionKb* kb = nullptr);

  // Writes checkpoint outcomes into the KB in catalog order, so the KB
  // bytes do not depend on worker scheduling.
  CommitResult commit(IntentionKb& kb) const;

  // The product with the stage 1 features attached; nullopt while the
  // product has none.
  std::optional<Product> annotated(const std::string& product_id) const;

  const PipelineOptions& options() const { return options_; }

 private:
  struct WorkItem {
    std::string key;
    const CoBuyRecord* cobuy;
    Relation relation;
    std::uint32_t sample;
  };

  std::vector<WorkItem> work_items() const;
  // Returns false when an endpoint of the pair is dead-lettered.
  bool pair_ready(const CoBuyRecord& cobuy) const;
  void generate(const WorkItem& item);
  void filter(const WorkItem& item);
  GenerationStageResult tally_generation() const;
  FilterStageResult tally_filter() const;
  // Counts the request; nullopt with `error` set when the item dead-letters.
  std::optional<ModelResponse> call(const PromptBundle& bundle, std::atomic<std::size_t>& counter,
                                    std::string& error);
  void check_abort(std::size_t dead, std::size_t total, const char* stage) const;

  const Catalog& catalog_;
  CompletionClient& client_;
  const PromptForge& forge_;
  Checkpoint& checkpoint_;
  PipelineOptions options_;
  std::atomic<std::size_t> feature_requests_{0};
  std::atomic<std::size_t> generation_requests_{0};
  std::atomic<std::size_t> filter_requests_{0};
};

}  // namespace mind
