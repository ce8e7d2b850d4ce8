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
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mind/catalog.hpp"
#include "mind/relation.hpp"

namespace mind {

enum class Stage { kFeatureExtraction, kIntentionGeneration, kRoleAwareFilter };

std::string_view stage_name(Stage stage);
std::optional<Stage> parse_stage(std::string_view name);

struct GenParams {
  int max_tokens = 256;
  double temperature = 0.2;
  std::uint64_t seed = 0;

  bool operator==(const GenParams&) const = default;
};

inline constexpr int kIntentionWordLimit = 120;

// A rendered multimodal request. `relation` and `relation_template` are
// routing metadata for the stage 2/3 prompts and never go on the wire.
struct PromptBundle {
  Stage stage = Stage::kFeatureExtraction;
  std::string text;
  std::vector<std::string> images;
  GenParams gen_params;
  std::optional<Relation> relation;
  std::string relation_template;
};

// Template sources with {{name}} placeholders, one per stage.
class PromptTemplates {
 public:
  static PromptTemplates defaults();
  // Reads feature.txt, intention.txt and filter.txt from dir; a missing file
  // keeps the built-in text for that stage.
  static PromptTemplates load_dir(const std::filesystem::path& dir);
  // load_dir($MIND_PROMPT_DIR) when set, defaults() otherwise.
  static PromptTemplates from_env();

  // Throws kMalformed when the source names a placeholder the stage does not
  // provide, or leaves a "{{" unterminated.
  void set(Stage stage, std::string source);
  const std::string& source(Stage stage) const {
    return sources_[static_cast<std::size_t>(stage)];
  }

  static const std::vector<std::string_view>& placeholders(Stage stage);

 private:
  std::array<std::string, 3> sources_;
};

// Renders the three stage prompts. Pure: equal inputs give equal bytes.
class PromptForge {
 public:
  PromptForge();
  PromptForge(PromptTemplates templates, RelationTemplates relations,
              GenParams params = {});

  PromptBundle render_feature_prompt(const Product& product) const;
  PromptBundle render_intention_prompt(const Product& a, const Product& b,
                                       Relation relation,
                                       std::uint32_t sample_index = 0) const;
  PromptBundle render_filter_prompt(const Product& a, const Product& b,
                                    Relation relation,
                                    std::string_view intention,
                                    std::uint32_t sample_index = 0) const;

  const std::string& relation_template(Relation r) const { return relations_.of(r); }
  const RelationTemplates& relations() const { return relations_; }
  const PromptTemplates& templates() const { return templates_; }
  const GenParams& gen_params() const { return params_; }

  // Hash over templates, relation phrasings and generation parameters.
  std::string fingerprint() const;

 private:
  PromptTemplates templates_;
  RelationTemplates relations_;
  GenParams params_;
};

}  // namespace mind
