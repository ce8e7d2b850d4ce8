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

#include "mind/relation.hpp"

#include <bitset>

#include "mind/error.hpp"
#include "mind/jsonl.hpp"
#include "mind/text.hpp"

namespace mind {
namespace {

constexpr std::array<std::string_view, kRelationCount> kNames = {
    "Effect",    "MannerOf",  "isA",        "Other",      "MadeOf",
    "SimilarTo", "UsedFor",   "Can",        "CauseDesire", "RelatedTo",
    "PartOf",    "Open",      "CreatedBy",  "DeriveFrom", "DefinedAs",
    "PropertyOf", "CapableOf", "Cause",     "SymbolOf",   "DistinctFrom",
};

// Keep in sync with core/data/relations.tsv (checked by a unit test).
constexpr std::array<std::string_view, kRelationCount> kDefaultTemplates = {
    "the effect of buying them together is",
    "they are both a manner of",
    "they are both a type of",
    "another reason for buying them together is",
    "they are both made of",
    "they are both similar to",
    "they both are used for",
    "they both can",
    "they both make the customer want to",
    "they both are related to",
    "they are both part of",
    "",
    "they are both created by",
    "they are both derived from",
    "they are both defined as",
    "they both have the property of",
    "they both are capable of",
    "buying them together causes",
    "they are both a symbol of",
    "they are distinct from each other in that",
};

}  // namespace

const std::array<Relation, kRelationCount>& all_relations() {
  static const std::array<Relation, kRelationCount> kAll = [] {
    std::array<Relation, kRelationCount> a{};
    for (std::size_t i = 0; i < kRelationCount; ++i) a[i] = static_cast<Relation>(i);
    return a;
  }();
  return kAll;
}

std::string_view relation_name(Relation r) {
  return kNames[static_cast<std::size_t>(r)];
}

std::optional<Relation> parse_relation(std::string_view name) {
  name = text::trim(name);
  for (std::size_t i = 0; i < kRelationCount; ++i) {
    if (text::iequals(kNames[i], name)) return static_cast<Relation>(i);
  }
  return std::nullopt;
}

std::vector<Relation> parse_relation_list(std::string_view spec) {
  spec = text::trim(spec);
  if (text::iequals(spec, "all")) {
    return {all_relations().begin(), all_relations().end()};
  }
  std::vector<Relation> out;
  std::bitset<kRelationCount> seen;
  while (!spec.empty()) {
    const auto comma = spec.find(',');
    const std::string_view item = spec.substr(0, comma);
    auto r = parse_relation(item);
    if (!r) fail(ErrorCode::kInvalidArgument, "unknown relation: " + std::string(text::trim(item)));
    if (!seen.test(static_cast<std::size_t>(*r))) out.push_back(*r);
    seen.set(static_cast<std::size_t>(*r));
    if (comma == std::string_view::npos) break;
    spec.remove_prefix(comma + 1);
  }
  if (out.empty()) fail(ErrorCode::kInvalidArgument, "empty relation list");
  return out;
}

RelationTemplates RelationTemplates::defaults() {
  RelationTemplates t;
  for (std::size_t i = 0; i < kRelationCount; ++i) t.templates_[i] = kDefaultTemplates[i];
  return t;
}

RelationTemplates RelationTemplates::load(const std::filesystem::path& path) {
  return parse(io::read_file(path));
}

RelationTemplates RelationTemplates::parse(std::string_view content) {
  RelationTemplates t;
  std::bitset<kRelationCount> seen;
  std::size_t line_no = 0;
  while (!content.empty()) {
    const auto nl = content.find('\n');
    std::string_view line = content.substr(0, nl);
    content = nl == std::string_view::npos ? std::string_view{} : content.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (text::trim(line).empty() || line.front() == '#') continue;

    const auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      fail(ErrorCode::kMalformed, "relation templates line " + std::to_string(line_no) + ": missing tab");
    }
    auto r = parse_relation(line.substr(0, tab));
    if (!r) {
      fail(ErrorCode::kMalformed, "relation templates line " + std::to_string(line_no) +
                                      ": unknown relation " + std::string(line.substr(0, tab)));
    }
    const auto idx = static_cast<std::size_t>(*r);
    if (seen.test(idx)) {
      fail(ErrorCode::kMalformed, "duplicate relation " + std::string(relation_name(*r)));
    }
    seen.set(idx);
    std::string phrase = text::collapse_whitespace(line.substr(tab + 1));
    if (phrase.empty() && *r != Relation::kOpen) {
      fail(ErrorCode::kMalformed, "empty template for " + std::string(relation_name(*r)));
    }
    if (!phrase.empty() && *r == Relation::kOpen) {
      fail(ErrorCode::kMalformed, "Open takes no template");
    }
    t.templates_[idx] = std::move(phrase);
  }
  if (!seen.all()) {
    for (std::size_t i = 0; i < kRelationCount; ++i) {
      if (!seen.test(i)) fail(ErrorCode::kMalformed, "missing relation " + std::string(kNames[i]));
    }
  }
  return t;
}

std::string RelationTemplates::to_tsv() const {
  std::string out;
  for (std::size_t i = 0; i < kRelationCount; ++i) {
    out.append(kNames[i]).append("\t").append(templates_[i]).append("\n");
  }
  return out;
}

const std::string& relation_template(Relation r) {
  static const RelationTemplates kDefaults = RelationTemplates::defaults();
  return kDefaults.of(r);
}

}  // namespace mind
