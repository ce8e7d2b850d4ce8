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
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mind/http.hpp"
#include "mind/kb.hpp"
#include "mind/relation.hpp"

namespace mind {

using EmbeddingVector = std::vector<double>;

// u·v / (|u| |v|). Throws kDimensionMismatch, kZeroVector.
double cosine(const EmbeddingVector& u, const EmbeddingVector& v);

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
};

// Fixed-dimension hashed bag of words, unit-normalized. Word order does not
// matter; any text with at least one token gives a nonzero vector.
class HashedBowEmbedder final : public Embedder {
 public:
  explicit HashedBowEmbedder(std::size_t dim = 256);
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
  EmbeddingVector embed_one(std::string_view text) const;
  std::size_t dim() const { return dim_; }

 private:
  std::size_t dim_;
};

// POSTs {"texts":[...]} and reads {"vectors":[[...]]}.
class HttpEmbedder final : public Embedder {
 public:
  explicit HttpEmbedder(std::string url,
                        std::unique_ptr<http::Transport> transport = http::make_transport(),
                        int timeout_ms = 60000);
  // $MIND_EMBED_URL; nullptr when unset.
  static std::unique_ptr<HttpEmbedder> from_env();
  std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;

 private:
  std::string url_;
  std::unique_ptr<http::Transport> transport_;
  int timeout_ms_;
};

// Published full-scale figures, reported next to local results for comparison.
// Not reproducible without a production model and human raters.
inline constexpr double kReferenceRobustnessMean = 0.85;
inline constexpr std::size_t kReferenceIntentionCount = 1264441;
inline constexpr double kReferencePlausibility = 0.94;
inline constexpr double kReferenceTypicality = 0.90;
inline constexpr double kReferenceFleissKappa = 0.56;
inline constexpr double kReferencePairwiseAgreement = 0.731;
inline constexpr double kReferencePassRate = 0.467;

inline constexpr std::size_t kRobustnessBins = 20;

struct RobustnessReport {
  std::size_t pairs = 0;
  double mean = 0.0;
  double min = 0.0;
  // Equal-width bins over [-1, 1]; a cosine of exactly 1 lands in the last.
  std::array<std::size_t, kRobustnessBins> histogram{};
  std::vector<double> cosines;
  double reference_mean = kReferenceRobustnessMean;
};

// Cosine between each original and its modified phrasing. Throws kEmptyInput.
RobustnessReport robustness_report(
    const std::vector<std::pair<std::string, std::string>>& pairs, Embedder& embedder);

// instance -> weighted hypernyms; instance lookup is case-insensitive.
class Taxonomy {
 public:
  // instance<TAB>hypernym<TAB>weight per line. Throws kMalformed.
  static Taxonomy load(const std::filesystem::path& path);
  static Taxonomy parse(std::string_view tsv);

  // Throws kInvalidArgument for a non-positive weight.
  void add(std::string_view instance, std::string_view hypernym, double weight);
  bool contains(std::string_view instance) const;
  // Highest-weight hypernym, lexicographically smallest among equal weights.
  std::optional<std::string> top_hypernym(std::string_view instance) const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  // Longest instance, in words.
  std::size_t max_ngram() const { return max_ngram_; }

 private:
  std::map<std::string, std::map<std::string, double>, std::less<>> entries_;
  std::size_t max_ngram_ = 0;
};

class NounExtractor {
 public:
  virtual ~NounExtractor() = default;
  virtual std::vector<std::string> extract(std::string_view text) const = 0;
};

// Greedy longest match of taxonomy instances (up to the taxonomy's longest
// n-gram) over lowercased tokens. A single token that misses is retried
// with naive plural stripping: -ies -> -y, then -es, then -s.
class LexiconNounExtractor final : public NounExtractor {
 public:
  explicit LexiconNounExtractor(const Taxonomy& taxonomy) : taxonomy_(taxonomy) {}
  std::vector<std::string> extract(std::string_view text) const override;

 private:
  const Taxonomy& taxonomy_;
};

struct HypernymCount {
  std::string hypernym;
  std::size_t count = 0;
  bool operator==(const HypernymCount&) const = default;
};

// Counts the top hypernym of every extracted noun; nouns the taxonomy does
// not know contribute nothing. Top-k by count, ties lexicographic.
// Throws kEmptyTaxonomy, kInvalidArgument for top_k == 0.
std::vector<HypernymCount> hypernym_distribution(const std::vector<std::string>& intentions,
                                                 const Taxonomy& taxonomy,
                                                 const NounExtractor& extractor,
                                                 std::size_t top_k);

// Votes -> Likert score. The default reads the four-point scale as
// 1 + number of positive votes over 3 votes.
struct LikertMapping {
  std::size_t votes_per_item = 3;
  int base = 1;
  int score(const std::vector<int>& votes) const;  // throws kWrongVoteCount
};

struct TypicalityItem {
  Relation relation = Relation::kOpen;
  std::vector<int> votes;
};

struct RelationTypicality {
  Relation relation = Relation::kOpen;
  std::size_t items = 0;
  double mean = 0.0;
};

// Mean Likert score per relation, for relations with at least one item,
// in table order.
std::vector<RelationTypicality> typicality_by_relation(const std::vector<TypicalityItem>& items,
                                                       const LikertMapping& mapping = {});

struct RfpReport {
  std::vector<RelationStats> relations;
  std::optional<double> overall;
};

// Accepted / (accepted + rejected) per relation from the KB partitions.
RfpReport rfp_by_relation(const IntentionKb& kb);

}  // namespace mind
