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
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "mind/relation.hpp"

namespace mind {

enum class FailureClass {
  kPrefixViolation,
  kTooLong,
  kEmpty,
  kAmbiguous,
  kEmptyRationale,
};

std::string_view failure_class_name(FailureClass c);
std::optional<FailureClass> parse_failure_class(std::string_view name);

struct ParseFailure {
  FailureClass kind;
  std::string detail;
};

// An intention parsed out of a stage 2 reply, grounded in one relation.
struct IntentionCandidate {
  std::string cobuy_id;
  Relation relation = Relation::kOpen;
  std::uint32_t sample_index = 0;
  std::string text;
  std::string raw_response;
  std::string created_at;
};

struct FilterVerdict {
  bool accept = false;
  std::string rationale;
  std::string raw_response;
};

struct IntentionParseOptions {
  // Exact prefix: no lead-in stripping, case must match past the first letter.
  bool strict_prefix = false;
};

// Normalizes whitespace, strips the echoed instruction lead-in ("the
// potential co-buy intention could be ..."), then enforces the relation
// prefix (every relation but Open) and the 120-word cap. Checked in the
// order Empty, TooLong, PrefixViolation.
std::variant<IntentionCandidate, ParseFailure> parse_intention(
    std::string_view raw, Relation relation,
    const RelationTemplates& templates = RelationTemplates::defaults(),
    IntentionParseOptions options = {});

// True when text begins with the relation template at a word boundary
// (case-insensitive) and has at most 120 words.
bool satisfies_intention_invariants(std::string_view text, Relation relation,
                                    const RelationTemplates& templates = RelationTemplates::defaults());

// Accepts a leading "Yes" or "No" token (any case) followed by optional
// punctuation; the trimmed remainder is the rationale.
std::variant<FilterVerdict, ParseFailure> parse_verdict(std::string_view raw);

}  // namespace mind
