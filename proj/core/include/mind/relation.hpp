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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mind {

// The closed set of commonsense relations, in knowledge-base table order.
enum class Relation {
  kEffect,
  kMannerOf,
  kIsA,
  kOther,
  kMadeOf,
  kSimilarTo,
  kUsedFor,
  kCan,
  kCauseDesire,
  kRelatedTo,
  kPartOf,
  kOpen,
  kCreatedBy,
  kDeriveFrom,
  kDefinedAs,
  kPropertyOf,
  kCapableOf,
  kCause,
  kSymbolOf,
  kDistinctFrom,
};

inline constexpr std::size_t kRelationCount = 20;

const std::array<Relation, kRelationCount>& all_relations();

std::string_view relation_name(Relation r);
// Case-insensitive.
std::optional<Relation> parse_relation(std::string_view name);

// Parses "all" or a comma-separated list of names; throws kInvalidArgument.
std::vector<Relation> parse_relation_list(std::string_view spec);

// Intention prefix phrase per relation. Open maps to the empty phrase.
class RelationTemplates {
 public:
  // Built-in phrasings; identical to data/relations.tsv.
  static RelationTemplates defaults();

  // `name<TAB>template` per line; every relation exactly once. Throws
  // kMalformed on unknown names, duplicates, omissions, or an empty
  // template for a relation other than Open.
  static RelationTemplates load(const std::filesystem::path& path);
  static RelationTemplates parse(std::string_view content);

  const std::string& of(Relation r) const {
    return templates_[static_cast<std::size_t>(r)];
  }

  // Serialized form, in the file format accepted by parse().
  std::string to_tsv() const;

 private:
  std::array<std::string, kRelationCount> templates_;
};

// Shorthand for the default template of a relation.
const std::string& relation_template(Relation r);

}  // namespace mind
