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

#include "mind/parsers.hpp"

#include <array>
#include <cctype>

#include "mind/prompt.hpp"
#include "mind/text.hpp"

namespace mind {
namespace {

// Lead-ins LVLMs echo back from the generation instruction. Longest first.
constexpr std::array<std::string_view, 6> kLeadIns = {
    "the potential co-buy intention could be",
    "the potential co-buy intention would be",
    "potential co-buy intention could be",
    "the co-buy intention could be",
    "co-buy intention:",
    "intention:",
};

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool is_verdict_punct(char c) {
  return c == ',' || c == '.' || c == ':' || c == ';' || c == '!' || c == '-';
}

std::string_view strip_quotes(std::string_view s) {
  s = text::trim(s);
  while (!s.empty() && (s.front() == '"' || s.front() == '\'' || s.front() == '*')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == '"' || s.back() == '\'' || s.back() == '*')) {
    s.remove_suffix(1);
  }
  return text::trim(s);
}

std::string_view strip_lead_in(std::string_view s) {
  for (std::string_view lead : kLeadIns) {
    if (text::istarts_with(s, lead) &&
        (s.size() == lead.size() || !is_alnum(s[lead.size()]) || lead.back() == ':')) {
      s.remove_prefix(lead.size());
      s = text::trim(s);
      while (!s.empty() && (s.front() == ':' || s.front() == ',' || s.front() == '-')) {
        s.remove_prefix(1);
      }
      return strip_quotes(s);
    }
  }
  return s;
}

bool has_prefix_at_boundary(std::string_view s, std::string_view prefix, bool strict) {
  if (s.size() < prefix.size()) return false;
  const std::string_view head = s.substr(0, prefix.size());
  const bool match = strict ? (text::iequals(head.substr(0, 1), prefix.substr(0, 1)) &&
                               head.substr(1) == prefix.substr(1))
                            : text::iequals(head, prefix);
  return match && (s.size() == prefix.size() || !is_alnum(s[prefix.size()]));
}

}  // namespace

std::string_view failure_class_name(FailureClass c) {
  switch (c) {
    case FailureClass::kPrefixViolation: return "PrefixViolation";
    case FailureClass::kTooLong: return "TooLong";
    case FailureClass::kEmpty: return "Empty";
    case FailureClass::kAmbiguous: return "Ambiguous";
    case FailureClass::kEmptyRationale: return "EmptyRationale";
  }
  return "";
}

std::optional<FailureClass> parse_failure_class(std::string_view name) {
  for (auto c : {FailureClass::kPrefixViolation, FailureClass::kTooLong, FailureClass::kEmpty,
                 FailureClass::kAmbiguous, FailureClass::kEmptyRationale}) {
    if (failure_class_name(c) == name) return c;
  }
  return std::nullopt;
}

std::variant<IntentionCandidate, ParseFailure> parse_intention(
    std::string_view raw, Relation relation, const RelationTemplates& templates,
    IntentionParseOptions options) {
  const std::string collapsed = text::collapse_whitespace(raw);
  std::string_view body = strip_quotes(collapsed);
  if (!options.strict_prefix) body = strip_lead_in(body);

  if (body.empty()) return ParseFailure{FailureClass::kEmpty, "no intention text"};

  const std::size_t words = text::word_count(body);
  if (words > static_cast<std::size_t>(kIntentionWordLimit)) {
    return ParseFailure{FailureClass::kTooLong, std::to_string(words) + " words"};
  }

  const std::string& prefix = templates.of(relation);
  if (!prefix.empty() && !has_prefix_at_boundary(body, prefix, options.strict_prefix)) {
    return ParseFailure{FailureClass::kPrefixViolation,
                        "expected prefix \"" + prefix + "\""};
  }

  IntentionCandidate c;
  c.relation = relation;
  c.text = std::string(body);
  c.raw_response = std::string(raw);
  return c;
}

bool satisfies_intention_invariants(std::string_view text, Relation relation,
                                    const RelationTemplates& templates) {
  const std::string collapsed = text::collapse_whitespace(text);
  if (collapsed.empty()) return false;
  if (text::word_count(collapsed) > static_cast<std::size_t>(kIntentionWordLimit)) return false;
  const std::string& prefix = templates.of(relation);
  return prefix.empty() || has_prefix_at_boundary(collapsed, prefix, false);
}

std::variant<FilterVerdict, ParseFailure> parse_verdict(std::string_view raw) {
  std::string_view s = text::trim(raw);
  std::size_t n = 0;
  while (n < s.size() && std::isalpha(static_cast<unsigned char>(s[n]))) ++n;
  const std::string_view token = s.substr(0, n);
  const bool yes = text::iequals(token, "yes");
  const bool no = text::iequals(token, "no");
  if (!yes && !no) {
    return ParseFailure{FailureClass::kAmbiguous, "reply does not start with Yes or No"};
  }
  std::string_view rest = s.substr(n);
  if (!rest.empty() && !is_verdict_punct(rest.front()) &&
      !std::isspace(static_cast<unsigned char>(rest.front()))) {
    return ParseFailure{FailureClass::kAmbiguous, "reply does not start with Yes or No"};
  }
  while (!rest.empty() && (is_verdict_punct(rest.front()) ||
                           std::isspace(static_cast<unsigned char>(rest.front())))) {
    rest.remove_prefix(1);
  }
  const std::string rationale = text::collapse_whitespace(rest);
  if (rationale.empty()) return ParseFailure{FailureClass::kEmptyRationale, "no rationale"};
  return FilterVerdict{yes, rationale, std::string(raw)};
}

}  // namespace mind
