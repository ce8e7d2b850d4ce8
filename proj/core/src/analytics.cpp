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

#include "mind/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <json.hpp>

#include "mind/error.hpp"
#include "mind/jsonl.hpp"
#include "mind/text.hpp"

namespace mind {
namespace {

std::string join_tokens(const std::vector<std::string>& tokens, std::size_t from, std::size_t n) {
  std::string out;
  for (std::size_t i = from; i < from + n; ++i) {
    if (!out.empty()) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::string instance_key(std::string_view instance) {
  const auto tokens = text::tokenize(instance);
  return join_tokens(tokens, 0, tokens.size());
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

double cosine(const EmbeddingVector& u, const EmbeddingVector& v) {
  if (u.size() != v.size()) {
    fail(ErrorCode::kDimensionMismatch, "vector dimensions differ: " + std::to_string(u.size()) +
                                            " vs " + std::to_string(v.size()));
  }
  if (u.empty()) fail(ErrorCode::kDimensionMismatch, "vectors have no components");
  double dot = 0.0;
  double nu = 0.0;
  double nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) fail(ErrorCode::kZeroVector, "cosine of a zero vector");
  const double c = dot / (std::sqrt(nu) * std::sqrt(nv));
  return std::clamp(c, -1.0, 1.0);
}

// --- embedders -------------------------------------------------------------

HashedBowEmbedder::HashedBowEmbedder(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) fail(ErrorCode::kInvalidArgument, "embedding dimension must be positive");
}

EmbeddingVector HashedBowEmbedder::embed_one(std::string_view text) const {
  EmbeddingVector v(dim_, 0.0);
  for (const auto& tok : text::tokenize(text)) v[text::fnv1a64(tok) % dim_] += 1.0;
  double norm = 0.0;
  for (double x : v) norm += x * x;
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (double& x : v) x /= norm;
  }
  return v;
}

std::vector<EmbeddingVector> HashedBowEmbedder::embed(const std::vector<std::string>& texts) {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(embed_one(t));
  return out;
}

HttpEmbedder::HttpEmbedder(std::string url, std::unique_ptr<http::Transport> transport,
                           int timeout_ms)
    : url_(std::move(url)), transport_(std::move(transport)), timeout_ms_(timeout_ms) {
  http::split_url(url_);
}

std::unique_ptr<HttpEmbedder> HttpEmbedder::from_env() {
  const char* url = std::getenv("MIND_EMBED_URL");
  if (url == nullptr || *url == '\0') return nullptr;
  return std::make_unique<HttpEmbedder>(url);
}

std::vector<EmbeddingVector> HttpEmbedder::embed(const std::vector<std::string>& texts) {
  const nlohmann::json req = {{"texts", texts}};
  const auto resp = transport_->post(url_, req.dump(), {{"Content-Type", "application/json"}},
                                     std::chrono::milliseconds(timeout_ms_));
  if (resp.status < 200 || resp.status >= 300) {
    fail(ErrorCode::kBackendRejected,
         "embedding endpoint returned " + std::to_string(resp.status) +
             (resp.error.empty() ? "" : ": " + resp.error));
  }
  const auto body = nlohmann::json::parse(resp.body, nullptr, false);
  if (body.is_discarded() || !body.contains("vectors") || !body["vectors"].is_array()) {
    fail(ErrorCode::kMalformed, "embedding response has no vectors array");
  }
  std::vector<EmbeddingVector> out;
  try {
    out = body["vectors"].get<std::vector<EmbeddingVector>>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kMalformed, std::string("embedding response: ") + e.what());
  }
  if (out.size() != texts.size()) {
    fail(ErrorCode::kMalformed, "embedding response has " + std::to_string(out.size()) +
                                    " vectors for " + std::to_string(texts.size()) + " texts");
  }
  return out;
}

// --- robustness ------------------------------------------------------------

RobustnessReport robustness_report(
    const std::vector<std::pair<std::string, std::string>>& pairs, Embedder& embedder) {
  if (pairs.empty()) fail(ErrorCode::kEmptyInput, "no intention pairs");
  std::vector<std::string> texts;
  texts.reserve(pairs.size() * 2);
  for (const auto& [a, b] : pairs) {
    texts.push_back(a);
    texts.push_back(b);
  }
  const auto vectors = embedder.embed(texts);
  if (vectors.size() != texts.size()) {
    fail(ErrorCode::kMalformed, "embedder returned the wrong number of vectors");
  }

  RobustnessReport r;
  r.pairs = pairs.size();
  r.min = 1.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double c = cosine(vectors[2 * i], vectors[2 * i + 1]);
    r.cosines.push_back(c);
    sum += c;
    r.min = std::min(r.min, c);
    auto bin = static_cast<std::size_t>(std::floor((c + 1.0) / 2.0 * kRobustnessBins));
    ++r.histogram[std::min(bin, kRobustnessBins - 1)];
  }
  r.mean = sum / static_cast<double>(pairs.size());
  return r;
}

// --- taxonomy --------------------------------------------------------------

void Taxonomy::add(std::string_view instance, std::string_view hypernym, double weight) {
  if (!(weight > 0.0) || !std::isfinite(weight)) {
    fail(ErrorCode::kInvalidArgument, "hypernym weight must be positive");
  }
  const std::string key = instance_key(instance);
  const std::string hyper = text::collapse_whitespace(hypernym);
  if (key.empty() || hyper.empty()) fail(ErrorCode::kInvalidArgument, "empty taxonomy entry");
  entries_[key][hyper] += weight;
  max_ngram_ = std::max(max_ngram_, text::word_count(key));
}

Taxonomy Taxonomy::parse(std::string_view tsv) {
  Taxonomy t;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= tsv.size()) {
    std::size_t end = tsv.find('\n', pos);
    if (end == std::string_view::npos) end = tsv.size();
    std::string_view line = tsv.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (text::trim(line).empty() || line.front() == '#') continue;

    const std::size_t t1 = line.find('\t');
    const std::size_t t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos) {
      fail(ErrorCode::kMalformed, "line " + std::to_string(line_no) + ": expected 3 tab-separated fields");
    }
    const std::string weight_s(text::trim(line.substr(t2 + 1)));
    char* endp = nullptr;
    const double w = std::strtod(weight_s.c_str(), &endp);
    if (weight_s.empty() || endp != weight_s.c_str() + weight_s.size()) {
      fail(ErrorCode::kMalformed, "line " + std::to_string(line_no) + ": bad weight '" + weight_s + "'");
    }
    try {
      t.add(line.substr(0, t1), line.substr(t1 + 1, t2 - t1 - 1), w);
    } catch (const Error& e) {
      fail(ErrorCode::kMalformed, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return t;
}

Taxonomy Taxonomy::load(const std::filesystem::path& path) {
  return parse(io::read_file(path));
}

bool Taxonomy::contains(std::string_view instance) const {
  return entries_.find(instance_key(instance)) != entries_.end();
}

std::optional<std::string> Taxonomy::top_hypernym(std::string_view instance) const {
  auto it = entries_.find(instance_key(instance));
  if (it == entries_.end()) return std::nullopt;
  const std::string* best = nullptr;
  double best_w = 0.0;
  for (const auto& [h, w] : it->second) {
    if (best == nullptr || w > best_w) {
      best = &h;
      best_w = w;
    }
  }
  return *best;
}

std::vector<std::string> LexiconNounExtractor::extract(std::string_view text) const {
  const auto tokens = text::tokenize(text);
  std::vector<std::string> nouns;
  std::size_t i = 0;
  while (i < tokens.size()) {
    bool matched = false;
    const std::size_t longest = std::min(taxonomy_.max_ngram(), tokens.size() - i);
    for (std::size_t n = longest; n >= 1 && !matched; --n) {
      std::string cand = join_tokens(tokens, i, n);
      if (taxonomy_.contains(cand)) {
        nouns.push_back(std::move(cand));
        i += n;
        matched = true;
      }
    }
    if (matched) continue;
    const std::string& tok = tokens[i];
    std::vector<std::string> stems;
    if (ends_with(tok, "ies")) stems.push_back(tok.substr(0, tok.size() - 3) + "y");
    if (ends_with(tok, "es")) stems.push_back(tok.substr(0, tok.size() - 2));
    if (ends_with(tok, "s")) stems.push_back(tok.substr(0, tok.size() - 1));
    for (auto& stem : stems) {
      if (taxonomy_.contains(stem)) {
        nouns.push_back(std::move(stem));
        break;
      }
    }
    ++i;
  }
  return nouns;
}

std::vector<HypernymCount> hypernym_distribution(const std::vector<std::string>& intentions,
                                                 const Taxonomy& taxonomy,
                                                 const NounExtractor& extractor,
                                                 std::size_t top_k) {
  if (taxonomy.empty()) fail(ErrorCode::kEmptyTaxonomy, "taxonomy has no entries");
  if (top_k == 0) fail(ErrorCode::kInvalidArgument, "top-k must be at least 1");
  std::map<std::string, std::size_t> counts;
  for (const auto& intention : intentions) {
    for (const auto& noun : extractor.extract(intention)) {
      if (auto h = taxonomy.top_hypernym(noun)) ++counts[*h];
    }
  }
  std::vector<HypernymCount> ranked;
  ranked.reserve(counts.size());
  for (auto& [h, c] : counts) ranked.push_back(HypernymCount{h, c});
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.count > b.count;
  });
  if (ranked.size() > top_k) ranked.resize(top_k);
  return ranked;
}

// --- typicality ------------------------------------------------------------

int LikertMapping::score(const std::vector<int>& votes) const {
  if (votes.size() != votes_per_item) {
    fail(ErrorCode::kWrongVoteCount, "expected " + std::to_string(votes_per_item) + " votes, got " +
                                         std::to_string(votes.size()));
  }
  int positives = 0;
  for (int v : votes) {
    if (v != 0 && v != 1) fail(ErrorCode::kValidation, "votes must be 0 or 1");
    positives += v;
  }
  return base + positives;
}

std::vector<RelationTypicality> typicality_by_relation(const std::vector<TypicalityItem>& items,
                                                       const LikertMapping& mapping) {
  std::array<double, kRelationCount> sums{};
  std::array<std::size_t, kRelationCount> counts{};
  for (const auto& item : items) {
    const auto idx = static_cast<std::size_t>(item.relation);
    sums[idx] += mapping.score(item.votes);
    ++counts[idx];
  }
  std::vector<RelationTypicality> out;
  for (Relation r : all_relations()) {
    const auto idx = static_cast<std::size_t>(r);
    if (counts[idx] == 0) continue;
    out.push_back(RelationTypicality{r, counts[idx], sums[idx] / static_cast<double>(counts[idx])});
  }
  return out;
}

RfpReport rfp_by_relation(const IntentionKb& kb) {
  const KbStats s = kb.stats();
  return RfpReport{s.relations, s.rfp_rate};
}

}  // namespace mind
