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

#include <random>

#include "mind/parsers.hpp"
#include "mind/text.hpp"
#include "text_gen.hpp"

using namespace mind;
using namespace mind::testing;

TEST_CASE("intention examples") {
  auto ok = parse_intention("they both are used for hiking in the mountains.", Relation::kUsedFor);
  REQUIRE(is_candidate(ok));
  CHECK(std::get<IntentionCandidate>(ok).text == "they both are used for hiking in the mountains.");
  CHECK(std::get<IntentionCandidate>(ok).raw_response == "they both are used for hiking in the mountains.");

  auto echoed = parse_intention("The potential co-buy intention could be \"They both are used for hiking.\"",
                                Relation::kUsedFor);
  REQUIRE(is_candidate(echoed));
  CHECK(std::get<IntentionCandidate>(echoed).text == "They both are used for hiking.");

  CHECK(failure_of(parse_intention("These are great for hiking.", Relation::kUsedFor)) ==
        FailureClass::kPrefixViolation);
  CHECK(failure_of(parse_intention("they both are used forever", Relation::kUsedFor)) ==
        FailureClass::kPrefixViolation);
  CHECK(failure_of(parse_intention("   \n ", Relation::kUsedFor)) == FailureClass::kEmpty);
  CHECK(failure_of(parse_intention("\"\"", Relation::kOpen)) == FailureClass::kEmpty);
  CHECK(failure_of(parse_intention("the potential co-buy intention could be", Relation::kOpen)) ==
        FailureClass::kEmpty);
  CHECK(is_candidate(parse_intention("Anything the customer likes.", Relation::kOpen)));
  CHECK(is_candidate(parse_intention("they both are used for", Relation::kUsedFor)));
}

TEST_CASE("strict prefix mode") {
  const IntentionParseOptions strict{true};
  CHECK(is_candidate(parse_intention("They both are used for hiking.", Relation::kUsedFor,
                                     RelationTemplates::defaults(), strict)));
  CHECK(failure_of(parse_intention("They Both are used for hiking.", Relation::kUsedFor,
                                   RelationTemplates::defaults(), strict)) == FailureClass::kPrefixViolation);
  CHECK(failure_of(parse_intention("the potential co-buy intention could be they both are used for hiking.",
                                   Relation::kUsedFor, RelationTemplates::defaults(), strict)) ==
        FailureClass::kPrefixViolation);
}

TEST_CASE("word cap boundary") {
  const std::string prefix = "they both are used for";  // 5 words
  std::mt19937_64 rng(5);
  const std::string at_cap = prefix + " " + random_words(rng, 115);
  const std::string over = prefix + " " + random_words(rng, 116);
  CHECK(is_candidate(parse_intention(at_cap, Relation::kUsedFor)));
  CHECK(failure_of(parse_intention(over, Relation::kUsedFor)) == FailureClass::kTooLong);
  // Empty beats TooLong beats PrefixViolation.
  CHECK(failure_of(parse_intention(random_words(rng, 130), Relation::kUsedFor)) == FailureClass::kTooLong);
  CHECK(satisfies_intention_invariants(at_cap, Relation::kUsedFor));
  CHECK_FALSE(satisfies_intention_invariants(over, Relation::kUsedFor));
  CHECK_FALSE(satisfies_intention_invariants("", Relation::kOpen));
}

TEST_CASE("property: prefixed, unprefixed and overlong intentions are classified exactly") {
  std::mt19937_64 rng(0x5eed);
  const auto& t = RelationTemplates::defaults();
  std::size_t cases = 0;
  std::size_t wrong = 0;

  for (int i = 0; i < 1500; ++i) {
    const Relation r = random_relation(rng, true);
    const std::string prefix = random_case(rng, t.of(r));
    const std::size_t prefix_words = text::word_count(prefix);
    const std::size_t room = 120 - prefix_words;
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, room)(rng);
    std::string text = prefix.empty() ? random_words(rng, n) : prefix + random_gap(rng) + random_words(rng, n);
    if (i % 3 == 0) text = "The potential co-buy intention could be " + text;
    if (i % 5 == 0) text = "\"" + text + ".\"";
    const auto v = parse_intention(text, r);
    ++cases;
    if (!is_candidate(v)) {
      ++wrong;
    } else if (!satisfies_intention_invariants(std::get<IntentionCandidate>(v).text, r)) {
      ++wrong;
    }
  }

  for (int i = 0; i < 1500; ++i) {
    const Relation r = random_relation(rng, false);
    const auto words = text::split_words(t.of(r));
    std::string text;
    switch (i % 3) {
      case 0:  // no prefix at all
        text = random_words(rng, std::uniform_int_distribution<std::size_t>(1, 100)(rng));
        break;
      case 1: {  // truncated prefix
        for (std::size_t w = 0; w + 1 < words.size(); ++w) text += std::string(words[w]) + " ";
        text += random_words(rng, 5);
        break;
      }
      default:  // prefix glued to the next word
        text = t.of(r) + random_words(rng, 4);
        break;
    }
    ++cases;
    if (failure_of(parse_intention(text, r)) != FailureClass::kPrefixViolation) ++wrong;
  }

  for (int i = 0; i < 1500; ++i) {
    const Relation r = random_relation(rng, true);
    const std::string& prefix = t.of(r);
    const std::size_t total = std::uniform_int_distribution<std::size_t>(121, 400)(rng);
    const std::size_t filler = total - text::word_count(prefix);
    const std::string text = prefix.empty() ? random_words(rng, filler) : prefix + " " + random_words(rng, filler);
    ++cases;
    if (failure_of(parse_intention(text, r)) != FailureClass::kTooLong) ++wrong;
    ++cases;
    if (failure_of(parse_intention(random_words(rng, total), r)) != FailureClass::kTooLong) ++wrong;
  }

  CHECK(cases >= 1000);
  CHECK(wrong == 0);
}

TEST_CASE("verdict examples") {
  auto yes = parse_verdict("Yes, it motivates a joint purchase.");
  REQUIRE(std::holds_alternative<FilterVerdict>(yes));
  CHECK(std::get<FilterVerdict>(yes).accept);
  CHECK(std::get<FilterVerdict>(yes).rationale == "it motivates a joint purchase.");
  CHECK(std::get<FilterVerdict>(yes).raw_response == "Yes, it motivates a joint purchase.");

  auto no = parse_verdict("  NO.  Too generic. ");
  REQUIRE(std::holds_alternative<FilterVerdict>(no));
  CHECK_FALSE(std::get<FilterVerdict>(no).accept);
  CHECK(std::get<FilterVerdict>(no).rationale == "Too generic.");

  CHECK(failure_of(parse_verdict("Maybe, it depends.")) == FailureClass::kAmbiguous);
  CHECK(failure_of(parse_verdict("Yesterday, I bought it.")) == FailureClass::kAmbiguous);
  CHECK(failure_of(parse_verdict("Nope, not really.")) == FailureClass::kAmbiguous);
  CHECK(failure_of(parse_verdict("Not really, no.")) == FailureClass::kAmbiguous);
  CHECK(failure_of(parse_verdict("**Yes**, fine.")) == FailureClass::kAmbiguous);
  CHECK(failure_of(parse_verdict("Yes")) == FailureClass::kEmptyRationale);
  CHECK(failure_of(parse_verdict("No.")) == FailureClass::kEmptyRationale);
  CHECK(failure_of(parse_verdict("")) == FailureClass::kAmbiguous);
  CHECK(failure_of(parse_verdict("I think yes, because...")) == FailureClass::kAmbiguous);
}

TEST_CASE("property: verdict accepts exactly the Yes/No family") {
  std::mt19937_64 rng(0xfeed);
  const std::vector<std::string> seps = {",", ".", ":", ";", "!", " -", " ", ", ", ".\n"};
  std::size_t cases = 0;
  std::size_t wrong = 0;
  for (int i = 0; i < 1000; ++i) {
    const bool accept = i % 2 == 0;
    const std::string token = random_case(rng, accept ? "yes" : "no");
    const std::string sep = seps[std::uniform_int_distribution<std::size_t>(0, seps.size() - 1)(rng)];
    const std::string rationale = random_words(rng, std::uniform_int_distribution<std::size_t>(1, 30)(rng));
    const auto v = parse_verdict(token + sep + " " + rationale);
    ++cases;
    const auto* fv = std::get_if<FilterVerdict>(&v);
    if (!fv || fv->accept != accept || fv->rationale != rationale) ++wrong;
  }
  const std::vector<std::string> not_verdicts = {"maybe", "yeah", "nah", "yess", "noo", "sure",
                                                 "perhaps", "not", "none", "yesno", "y", "n"};
  for (int i = 0; i < 1000; ++i) {
    const std::string lead = random_case(
        rng, not_verdicts[std::uniform_int_distribution<std::size_t>(0, not_verdicts.size() - 1)(rng)]);
    const std::string text = lead + ", " + random_words(rng, 6);
    ++cases;
    if (failure_of(parse_verdict(text)) != FailureClass::kAmbiguous) ++wrong;
  }
  CHECK(cases >= 1000);
  CHECK(wrong == 0);
}

TEST_CASE("failure class names round trip") {
  for (auto c : {FailureClass::kPrefixViolation, FailureClass::kTooLong, FailureClass::kEmpty,
                 FailureClass::kAmbiguous, FailureClass::kEmptyRationale}) {
    CHECK(parse_failure_class(failure_class_name(c)) == c);
  }
  CHECK_FALSE(parse_failure_class("DeadLetter").has_value());
}
