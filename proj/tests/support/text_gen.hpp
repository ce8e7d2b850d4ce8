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

#include <cctype>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "mind/parsers.hpp"
#include "mind/relation.hpp"

namespace mind::testing {


inline bool is_candidate(const std::variant<IntentionCandidate, ParseFailure>& v) {
  return std::holds_alternative<IntentionCandidate>(v);
}

inline std::optional<FailureClass> failure_of(const std::variant<IntentionCandidate, ParseFailure>& v) {
  if (auto* f = std::get_if<ParseFailure>(&v)) return f->kind;
  return std::nullopt;
}

inline std::optional<FailureClass> failure_of(const std::variant<FilterVerdict, ParseFailure>& v) {
  if (auto* f = std::get_if<ParseFailure>(&v)) return f->kind;
  return std::nullopt;
}

// Filler vocabulary; no word starts any relation template.
inline const std::vector<std::string> kWords = {"hiking", "gear", "comfort", "weekend", "office", "music",
                                         "winter", "travel", "gifts", "cooking", "friends", "style",
                                         "sports", "kids", "garden", "safety", "work", "home"};

inline std::string random_words(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<std::size_t> pick(0, kWords.size() - 1);
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += kWords[pick(rng)];
  }
  return out;
}

inline std::string random_case(std::mt19937_64& rng, std::string s) {
  std::bernoulli_distribution flip(0.3);
  for (char& c : s) {
    if (flip(rng)) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  }
  return s;
}

// Joins with a random run of spaces, tabs or newlines.
inline std::string random_gap(std::mt19937_64& rng) {
  static const std::vector<std::string> gaps = {" ", "  ", "\t", "\n", " \n "};
  return gaps[std::uniform_int_distribution<std::size_t>(0, gaps.size() - 1)(rng)];
}

inline Relation random_relation(std::mt19937_64& rng, bool allow_open) {
  for (;;) {
    const Relation r = all_relations()[std::uniform_int_distribution<std::size_t>(0, kRelationCount - 1)(rng)];
    if (allow_open || r != Relation::kOpen) return r;
  }
}

}  // namespace mind::testing
