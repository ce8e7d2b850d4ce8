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

#include <doctest.h>

#include <cmath>
#include <random>

#include <json.hpp>

#include "mind/analytics.hpp"
#include "mind/error.hpp"
#include "mind/text.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace mind;
using mind::testing::code_of;
using mind::testing::fixture_dir;

namespace {

class CannedTransport final : public http::Transport {
 public:
  explicit CannedTransport(http::Response r) : reply_(std::move(r)) {}
  http::Response post(const std::string&, const std::string& body, const http::Headers&,
                      std::chrono::milliseconds) override {
    last_body = body;
    return reply_;
  }
  std::string last_body;

 private:
  http::Response reply_;
};

class ListExtractor final : public NounExtractor {
 public:
  std::vector<std::string> extract(std::string_view text) const override {
    std::vector<std::string> out;
    for (auto w : text::split_words(text)) out.emplace_back(w);
    return out;
  }
};

}  // namespace

TEST_CASE("cosine examples") {
  CHECK(cosine({1, 2, 0}, {2, 1, 2}) == doctest::Approx(4.0 / (3.0 * std::sqrt(5.0))).epsilon(1e-14));
  CHECK(std::abs(cosine({1, 2, 0}, {2, 1, 2}) - 0.596284793999944) < 1e-12);
  CHECK(cosine({1, 0}, {0, 3}) == 0.0);
  CHECK(cosine({2, 2}, {1, 1}) == doctest::Approx(1.0));
  CHECK(cosine({1, 1}, {-1, -1}) == doctest::Approx(-1.0));
  CHECK(code_of([] { cosine({1, 2}, {1, 2, 3}); }) == ErrorCode::kDimensionMismatch);
  CHECK(code_of([] { cosine({}, {}); }) == ErrorCode::kDimensionMismatch);
  CHECK(code_of([] { cosine({0, 0}, {1, 2}); }) == ErrorCode::kZeroVector);
}

TEST_CASE("cosine against the hand oracle") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> val(-10.0, 10.0);
  std::uniform_int_distribution<std::size_t> dim(1, 64);
  std::uniform_real_distribution<double> scale(0.001, 1000.0);
  for (int i = 0; i < 100; ++i) {
    const std::size_t d = dim(rng);
    EmbeddingVector u(d), v(d);
    for (std::size_t k = 0; k < d; ++k) {
      u[k] = val(rng);
      v[k] = val(rng);
    }
    const double c = cosine(u, v);
    CHECK(std::abs(c - oracle::hand_cosine(u, v)) < 1e-12);
    CHECK(std::abs(c - cosine(v, u)) < 1e-12);
    EmbeddingVector su = u;
    const double s = scale(rng);
    for (double& x : su) x *= s;
    CHECK(std::abs(c - cosine(su, v)) < 1e-12);
  }
}

TEST_CASE("hashed bag-of-words embedder") {
  HashedBowEmbedder e(64);
  const auto a = e.embed_one("Hiking boots for the mountains");
  const auto b = e.embed_one("the mountains for hiking BOOTS");
  CHECK(a.size() == 64);
  CHECK(cosine(a, b) == doctest::Approx(1.0));
  double norm = 0;
  for (double x : a) norm += x * x;
  CHECK(norm == doctest::Approx(1.0));
  CHECK(cosine(a, e.embed_one("keyboard")) < 0.9);
  CHECK(e.embed({"a", "b"}).size() == 2);
  CHECK(code_of([] { HashedBowEmbedder(0); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("robustness report") {
  HashedBowEmbedder e;
  const auto r = robustness_report({{"they both are used for hiking", "they are both used for hiking"},
                                    {"keyboard for typing", "mouse for gaming"}},
                                   e);
  CHECK(r.pairs == 2);
  REQUIRE(r.cosines.size() == 2);
  CHECK(r.cosines[0] == doctest::Approx(1.0));
  CHECK(r.mean == doctest::Approx((r.cosines[0] + r.cosines[1]) / 2));
  CHECK(r.min == doctest::Approx(r.cosines[1]));
  CHECK(r.histogram[kRobustnessBins - 1] >= 1);
  std::size_t total = 0;
  for (auto h : r.histogram) total += h;
  CHECK(total == 2);
  CHECK(r.reference_mean == 0.85);
  CHECK(code_of([&] { robustness_report({}, e); }) == ErrorCode::kEmptyInput);
}

TEST_CASE("HTTP embedder") {
  auto t = std::make_unique<CannedTransport>(http::Response{200, R"({"vectors":[[1,0],[0,1]]})", "", false});
  auto* raw = t.get();
  HttpEmbedder e("http://embed.invalid/v1", std::move(t));
  const auto v = e.embed({"a", "b"});
  REQUIRE(v.size() == 2);
  CHECK(v[1][1] == 1.0);
  CHECK(nlohmann::json::parse(raw->last_body)["texts"][1] == "b");

  HttpEmbedder short_reply("http://embed.invalid/v1",
                           std::make_unique<CannedTransport>(http::Response{200, R"({"vectors":[[1]]})", "", false}));
  CHECK(code_of([&] { short_reply.embed({"a", "b"}); }) == ErrorCode::kMalformed);
  HttpEmbedder down("http://embed.invalid/v1",
                    std::make_unique<CannedTransport>(http::Response{503, "", "", false}));
  CHECK(code_of([&] { down.embed({"a"}); }) == ErrorCode::kBackendRejected);
}

TEST_CASE("taxonomy parsing") {
  const auto t = Taxonomy::parse("# comment\nHiking Trip\tactivity\t2\nhiking\tactivity\t1\n\nbackpack\tgear\t1\nbackpack\tbag\t1\n");
  CHECK(t.size() == 3);
  CHECK(t.max_ngram() == 2);
  CHECK(t.contains("hiking trip"));
  CHECK(t.contains("HIKING   TRIP"));
  CHECK(t.top_hypernym("backpack") == "bag");
  CHECK_FALSE(t.top_hypernym("tent").has_value());
  CHECK(code_of([] { Taxonomy::parse("a\tb\n"); }) == ErrorCode::kMalformed);
  CHECK(code_of([] { Taxonomy::parse("a\tb\tx\n"); }) == ErrorCode::kMalformed);
  CHECK(code_of([] { Taxonomy::parse("a\tb\t0\n"); }) == ErrorCode::kMalformed);
  Taxonomy m;
  CHECK(code_of([&] { m.add("a", "b", -1); }) == ErrorCode::kInvalidArgument);
  m.add("tent", "shelter", 1);
  m.add("tent", "gear", 0.5);
  m.add("tent", "gear", 0.75);
  CHECK(m.top_hypernym("tent") == "gear");
}

TEST_CASE("lexicon noun extraction") {
  const auto t = Taxonomy::parse("water bottle\tgear\t1\nbottle\tgear\t1\nfamily\tperson\t1\nbox\tgear\t1\nglass\tgear\t1\n");
  const LexiconNounExtractor x(t);
  CHECK(x.extract("A Water Bottle and two bottles") == std::vector<std::string>{"water bottle", "bottle"});
  CHECK(x.extract("families with boxes") == std::vector<std::string>{"family", "box"});
  CHECK(x.extract("glass") == std::vector<std::string>{"glass"});
  CHECK(x.extract("nothing here").empty());
}

TEST_CASE("hypernym distribution ranks by count then name") {
  const auto t = Taxonomy::parse("a\tzeta\t1\nb\talpha\t1\nc\tbeta\t1\nd\tbeta\t1\n");
  const ListExtractor x;
  const auto top = hypernym_distribution({"a b c", "d a b", "unknown"}, t, x, 10);
  CHECK(top == std::vector<HypernymCount>{{"alpha", 2}, {"beta", 2}, {"zeta", 2}});
  const auto one = hypernym_distribution({"c d a"}, t, x, 1);
  CHECK(one == std::vector<HypernymCount>{{"beta", 2}});
  CHECK(code_of([&] { hypernym_distribution({"a"}, t, x, 0); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([&] { hypernym_distribution({"a"}, Taxonomy{}, x, 3); }) == ErrorCode::kEmptyTaxonomy);
}

TEST_CASE("hypernym distribution equals the frozen tally of the synthetic corpus") {
  const auto taxonomy = Taxonomy::load(fixture_dir() / "diversity" / "taxonomy.tsv");
  std::vector<std::string> corpus;
  io::for_each_line(fixture_dir() / "diversity" / "intentions.txt",
                    [&](std::string_view l, std::size_t) { corpus.emplace_back(l); });
  REQUIRE(corpus.size() == 100);
  const auto golden = nlohmann::json::parse(mind::testing::slurp(mind::testing::golden_dir() / "hypernym_tally.json"));
  std::vector<HypernymCount> expected;
  for (const auto& row : golden["counts"]) expected.push_back({row["hypernym"], row["count"]});
  REQUIRE(expected.size() == 5);
  const LexiconNounExtractor x(taxonomy);
  CHECK(hypernym_distribution(corpus, taxonomy, x, 5) == expected);
  CHECK(hypernym_distribution(corpus, taxonomy, x, 2) ==
        std::vector<HypernymCount>(expected.begin(), expected.begin() + 2));
}

TEST_CASE("Likert typicality") {
  const LikertMapping m;
  CHECK(m.score({0, 0, 0}) == 1);
  CHECK(m.score({1, 1, 1}) == 4);
  CHECK(m.score({1, 0, 1}) == 3);
  CHECK(code_of([&] { m.score({1, 1}); }) == ErrorCode::kWrongVoteCount);
  CHECK(code_of([&] { m.score({1, 2, 0}); }) == ErrorCode::kValidation);
  const auto rows = typicality_by_relation({{Relation::kUsedFor, {1, 1, 1}},
                                            {Relation::kUsedFor, {0, 0, 1}},
                                            {Relation::kEffect, {0, 1, 0}}});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].relation == Relation::kEffect);
  CHECK(rows[0].mean == 2.0);
  CHECK(rows[1].relation == Relation::kUsedFor);
  CHECK(rows[1].items == 2);
  CHECK(rows[1].mean == 3.0);
  LikertMapping zero_based{3, 0};
  CHECK(zero_based.score({1, 1, 1}) == 3);
}
