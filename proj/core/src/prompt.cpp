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

#include "mind/prompt.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <sstream>

#include "mind/error.hpp"
#include "mind/jsonl.hpp"
#include "mind/text.hpp"

namespace mind {
namespace {

// Keep in sync with core/data/prompts/*.txt (checked by a unit test).
constexpr std::string_view kFeatureTemplate =
    R"(The image contains a product and the name of it is {{title}}. Please analyze the product image together with the product name and provide a detailed description focusing on the product's features, design, and apparent quality. Highlight any unique characteristics or visible elements that distinguish this product from similar items. Additionally, speculate on the potential uses and benefits of this product for a consumer, based on its appearance and any information in the image and the name.
Given the product shown in the image: {{details}}
Generate additional features by focusing on the product's attribute, design, and quality.)";

constexpr std::string_view kIntentionTemplate =
    R"(The two images show two different products.
The product name of the upper image is {{title_a}}. The product detail and the potential purchase intention is: {{features_a}}
The product name of the lower image is {{title_b}}. The product detail and the potential purchase intention is: {{features_b}}
A customer purchased this pair of products together. Based on the information provided, together with the product images, what could be the potential intention for people buying these two products in one purchase simultaneously based on the relation of {{relation_phrase}}? Act as the customer, take the image features into consideration, and limit your word count within {{word_limit}} words. Start with "{{start_phrase}}".)";

constexpr std::string_view kFilterTemplate =
    R"(The two images show two different products.
The product name of the upper image is {{title_a}}. The product detail and the potential purchase intention is: {{features_a}}
The product name of the lower image is {{title_b}}. The product detail and the potential purchase intention is: {{features_b}}
Under the relation of {{relation_phrase}}, the potential co-buy intention would be: {{intention}}
Assume the role of an E-commerce customer. If you are a consumer who is eager to buy product a or product b, would this intention encourage you to buy the two products simultaneously? Be critical on your choice, and output yes or no together with the reason for your answer. For example, the output should be Yes, ... or No, ...)";

constexpr std::string_view kLeadIn = "the potential co-buy intention could be";
constexpr std::string_view kOpenRelationPhrase = "an open relation of your choice";

const std::array<std::string_view, 3> kFileNames = {"feature.txt", "intention.txt", "filter.txt"};

using Vars = std::map<std::string_view, std::string_view>;

// Names inside {{...}} in order of appearance.
std::vector<std::string> scan_placeholders(std::string_view src) {
  std::vector<std::string> names;
  std::size_t pos = 0;
  while ((pos = src.find("{{", pos)) != std::string_view::npos) {
    const auto end = src.find("}}", pos + 2);
    if (end == std::string_view::npos) {
      fail(ErrorCode::kMalformed, "unterminated placeholder in prompt template");
    }
    names.emplace_back(text::trim(src.substr(pos + 2, end - pos - 2)));
    pos = end + 2;
  }
  return names;
}

// Single pass: substituted values are never rescanned.
std::string render(std::string_view src, const Vars& vars) {
  std::string out;
  out.reserve(src.size() + 512);
  std::size_t pos = 0;
  while (true) {
    const auto open = src.find("{{", pos);
    if (open == std::string_view::npos) {
      out.append(src.substr(pos));
      break;
    }
    out.append(src.substr(pos, open - pos));
    const auto close = src.find("}}", open + 2);
    const auto name = text::trim(src.substr(open + 2, close - open - 2));
    out.append(vars.at(name));
    pos = close + 2;
  }
  return out;
}

std::string product_details(const Product& p) {
  std::string details = p.title;
  if (!p.domain.empty()) details += "; category: " + p.domain;
  const std::string desc = text::collapse_whitespace(p.description);
  if (!desc.empty()) details += "; description: " + desc;
  if (!p.attributes.empty()) {
    details += "; attributes: ";
    for (std::size_t i = 0; i < p.attributes.size(); ++i) {
      if (i) details += ", ";
      details += p.attributes[i].first + ": " + p.attributes[i].second;
    }
  }
  return details;
}

const std::string& features_or_throw(const Product& p) {
  if (!p.extracted_features || text::trim(*p.extracted_features).empty()) {
    fail(ErrorCode::kFeaturesMissing, "product " + p.id + " has no extracted features");
  }
  return *p.extracted_features;
}

std::string first_image(const Product& p) {
  if (p.image_refs.empty()) fail(ErrorCode::kMissingImage, "product " + p.id + " has no image");
  return p.image_refs.front();
}

}  // namespace

std::string_view stage_name(Stage stage) {
  switch (stage) {
    case Stage::kFeatureExtraction: return "FeatureExtraction";
    case Stage::kIntentionGeneration: return "IntentionGeneration";
    case Stage::kRoleAwareFilter: return "RoleAwareFilter";
  }
  return "";
}

std::optional<Stage> parse_stage(std::string_view name) {
  for (Stage s : {Stage::kFeatureExtraction, Stage::kIntentionGeneration, Stage::kRoleAwareFilter}) {
    if (text::iequals(stage_name(s), name)) return s;
  }
  return std::nullopt;
}

const std::vector<std::string_view>& PromptTemplates::placeholders(Stage stage) {
  static const std::vector<std::string_view> kFeature = {"title", "details"};
  static const std::vector<std::string_view> kIntention = {
      "title_a", "features_a", "title_b", "features_b",
      "relation_phrase", "start_phrase", "word_limit"};
  static const std::vector<std::string_view> kFilter = {
      "title_a", "features_a", "title_b", "features_b", "relation_phrase", "intention"};
  switch (stage) {
    case Stage::kFeatureExtraction: return kFeature;
    case Stage::kIntentionGeneration: return kIntention;
    case Stage::kRoleAwareFilter: return kFilter;
  }
  return kFeature;
}

PromptTemplates PromptTemplates::defaults() {
  PromptTemplates t;
  t.set(Stage::kFeatureExtraction, std::string(kFeatureTemplate));
  t.set(Stage::kIntentionGeneration, std::string(kIntentionTemplate));
  t.set(Stage::kRoleAwareFilter, std::string(kFilterTemplate));
  return t;
}

PromptTemplates PromptTemplates::load_dir(const std::filesystem::path& dir) {
  PromptTemplates t = defaults();
  for (std::size_t i = 0; i < kFileNames.size(); ++i) {
    const auto path = dir / kFileNames[i];
    if (!std::filesystem::exists(path)) continue;
    std::string src = io::read_file(path);
    while (!src.empty() && (src.back() == '\n' || src.back() == '\r')) src.pop_back();
    t.set(static_cast<Stage>(i), std::move(src));
  }
  return t;
}

PromptTemplates PromptTemplates::from_env() {
  const char* dir = std::getenv("MIND_PROMPT_DIR");
  if (dir && *dir) return load_dir(dir);
  return defaults();
}

void PromptTemplates::set(Stage stage, std::string source) {
  const auto& allowed = placeholders(stage);
  for (const auto& name : scan_placeholders(source)) {
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
      fail(ErrorCode::kMalformed, "unknown placeholder {{" + name + "}} in " +
                                      std::string(stage_name(stage)) + " template");
    }
  }
  sources_[static_cast<std::size_t>(stage)] = std::move(source);
}

PromptForge::PromptForge()
    : PromptForge(PromptTemplates::defaults(), RelationTemplates::defaults()) {}

PromptForge::PromptForge(PromptTemplates templates, RelationTemplates relations,
                         GenParams params)
    : templates_(std::move(templates)), relations_(std::move(relations)), params_(params) {}

PromptBundle PromptForge::render_feature_prompt(const Product& product) const {
  PromptBundle b;
  b.stage = Stage::kFeatureExtraction;
  b.images = {first_image(product)};
  const std::string details = product_details(product);
  b.text = render(templates_.source(Stage::kFeatureExtraction),
                  {{"title", product.title}, {"details", details}});
  b.gen_params = params_;
  return b;
}

PromptBundle PromptForge::render_intention_prompt(const Product& a, const Product& b,
                                                  Relation relation,
                                                  std::uint32_t sample_index) const {
  const std::string& features_a = features_or_throw(a);
  const std::string& features_b = features_or_throw(b);
  const std::string& tmpl = relations_.of(relation);
  const std::string relation_phrase =
      tmpl.empty() ? std::string(kOpenRelationPhrase) : "\"" + tmpl + "\"";
  const std::string start_phrase =
      tmpl.empty() ? std::string(kLeadIn) : std::string(kLeadIn) + " " + tmpl;
  const std::string limit = std::to_string(kIntentionWordLimit);

  PromptBundle out;
  out.stage = Stage::kIntentionGeneration;
  out.images = {first_image(a), first_image(b)};
  out.text = render(templates_.source(Stage::kIntentionGeneration),
                    {{"title_a", a.title},
                     {"features_a", features_a},
                     {"title_b", b.title},
                     {"features_b", features_b},
                     {"relation_phrase", relation_phrase},
                     {"start_phrase", start_phrase},
                     {"word_limit", limit}});
  out.gen_params = params_;
  out.gen_params.seed += sample_index;
  out.relation = relation;
  out.relation_template = tmpl;
  return out;
}

PromptBundle PromptForge::render_filter_prompt(const Product& a, const Product& b,
                                               Relation relation,
                                               std::string_view intention,
                                               std::uint32_t sample_index) const {
  const std::string trimmed(text::trim(intention));
  if (trimmed.empty()) fail(ErrorCode::kEmptyIntention, "empty intention");
  const std::string& tmpl = relations_.of(relation);
  const std::string relation_phrase =
      tmpl.empty() ? std::string(kOpenRelationPhrase) : "\"" + tmpl + "\"";

  PromptBundle out;
  out.stage = Stage::kRoleAwareFilter;
  out.images = {first_image(a), first_image(b)};
  out.text = render(templates_.source(Stage::kRoleAwareFilter),
                    {{"title_a", a.title},
                     {"features_a", a.extracted_features.value_or("")},
                     {"title_b", b.title},
                     {"features_b", b.extracted_features.value_or("")},
                     {"relation_phrase", relation_phrase},
                     {"intention", trimmed}});
  out.gen_params = params_;
  out.gen_params.seed += sample_index;
  out.relation = relation;
  out.relation_template = tmpl;
  return out;
}

std::string PromptForge::fingerprint() const {
  std::ostringstream material;
  for (Stage s : {Stage::kFeatureExtraction, Stage::kIntentionGeneration, Stage::kRoleAwareFilter}) {
    material << templates_.source(s) << '\x1e';
  }
  material << relations_.to_tsv() << '\x1e' << params_.max_tokens << ' '
           << params_.temperature << ' ' << params_.seed;
  return text::to_hex(text::fnv1a64(material.str()));
}

}  // namespace mind
