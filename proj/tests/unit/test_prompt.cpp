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

#include <set>

#include "mind/error.hpp"
#include "mind/prompt.hpp"
#include "mind/relation.hpp"
#include "test_support.hpp"

using namespace mind;
using mind::testing::code_of;
using mind::testing::core_data_dir;
using mind::testing::TempDir;
using mind::testing::write_text;

namespace {

Product annotated(Product p, std::string features) {
  p.extracted_features = std::move(features);
  return p;
}

}  // namespace

TEST_CASE("relation table has twenty distinct names") {
  std::set<std::string> names;
  for (Relation r : all_relations()) names.insert(std::string(relation_name(r)));
  CHECK(names.size() == kRelationCount);
  CHECK(relation_name(Relation::kIsA) == "isA");
  CHECK(parse_relation("isa") == Relation::kIsA);
  CHECK(parse_relation("CAUSEDESIRE") == Relation::kCauseDesire);
  CHECK_FALSE(parse_relation("Nope").has_value());
  CHECK(relation_template(Relation::kOpen).empty());
  CHECK(relation_template(Relation::kEffect) == "the effect of buying them together is");
}

TEST_CASE("relation list parsing") {
  CHECK(parse_relation_list("all").size() == 20);
  const auto two = parse_relation_list("UsedFor, isA");
  CHECK(two == std::vector<Relation>{Relation::kUsedFor, Relation::kIsA});
  CHECK(code_of([] { parse_relation_list("UsedFor,Bogus"); }) == ErrorCode::kInvalidArgument);
  CHECK(code_of([] { parse_relation_list(""); }) == ErrorCode::kInvalidArgument);
}

TEST_CASE("shipped relations.tsv equals the built-in table") {
  const auto loaded = RelationTemplates::load(core_data_dir() / "relations.tsv");
  CHECK(loaded.to_tsv() == RelationTemplates::defaults().to_tsv());
  CHECK(mind::testing::slurp(core_data_dir() / "relations.tsv") ==
        RelationTemplates::defaults().to_tsv());
}

TEST_CASE("relation template files are validated") {
  const std::string good = RelationTemplates::defaults().to_tsv();
  CHECK(code_of([&] { RelationTemplates::parse(good + "UsedFor\tagain\n"); }) == ErrorCode::kMalformed);
  CHECK(code_of([] { RelationTemplates::parse("UsedFor\tthey both are used for\n"); }) ==
        ErrorCode::kMalformed);
  std::string bad_name = good;
  bad_name.replace(bad_name.find("Cause\t"), 5, "Causes");
  CHECK(code_of([&] { RelationTemplates::parse(bad_name); }) == ErrorCode::kMalformed);
  std::string empty_tmpl = good;
  const auto pos = empty_tmpl.find("Can\t") + 4;
  empty_tmpl.erase(pos, empty_tmpl.find('\n', pos) - pos);
  CHECK(code_of([&] { RelationTemplates::parse(empty_tmpl); }) == ErrorCode::kMalformed);

  std::string custom = good;
  custom.replace(custom.find("they both can"), 13, "both of them can");
  CHECK(RelationTemplates::parse(custom).of(Relation::kCan) == "both of them can");
}

TEST_CASE("shipped prompt files equal the built-in templates") {
  const auto defaults = PromptTemplates::defaults();
  const std::pair<Stage, const char*> files[] = {{Stage::kFeatureExtraction, "feature.txt"},
                                                {Stage::kIntentionGeneration, "intention.txt"},
                                                {Stage::kRoleAwareFilter, "filter.txt"}};
  for (const auto& [stage, file] : files) {
    CHECK(mind::testing::slurp(core_data_dir() / "prompts" / file) == defaults.source(stage) + "\n");
  }
  const auto loaded = PromptTemplates::load_dir(core_data_dir() / "prompts");
  for (const auto& [stage, file] : files) CHECK(loaded.source(stage) == defaults.source(stage));
}

TEST_CASE("prompt templates reject unknown or unterminated placeholders") {
  PromptTemplates t = PromptTemplates::defaults();
  CHECK(code_of([&] { t.set(Stage::kFeatureExtraction, "{{title}} {{intention}}"); }) ==
        ErrorCode::kMalformed);
  CHECK(code_of([&] { t.set(Stage::kRoleAwareFilter, "{{intention"); }) == ErrorCode::kMalformed);
  CHECK_NOTHROW(t.set(Stage::kFeatureExtraction, "Describe {{ title }}."));

  TempDir dir;
  write_text(dir / "filter.txt", "Judge: {{intention}}\n");
  const auto loaded = PromptTemplates::load_dir(dir.path());
  CHECK(loaded.source(Stage::kRoleAwareFilter) == "Judge: {{intention}}");
  CHECK(loaded.source(Stage::kFeatureExtraction) ==
        PromptTemplates::defaults().source(Stage::kFeatureExtraction));
}

TEST_CASE("stage names") {
  CHECK(stage_name(Stage::kRoleAwareFilter) == "RoleAwareFilter");
  CHECK(parse_stage("featureextraction") == Stage::kFeatureExtraction);
  CHECK_FALSE(parse_stage("x").has_value());
}

TEST_CASE("feature prompt") {
  const Catalog c = mind::testing::fixture_catalog();
  const PromptForge forge;
  const auto b = forge.render_feature_prompt(c.product("P4"));
  CHECK(b.stage == Stage::kFeatureExtraction);
  CHECK(b.images == std::vector<std::string>{c.product("P4").image_refs[0]});
  CHECK(b.text.find("Stainless Steel Water Bottle") != std::string::npos);
  CHECK(b.text.find("750 ml") != std::string::npos);
  CHECK(b.text.find("{{") == std::string::npos);
  CHECK_FALSE(b.relation.has_value());

  Product no_image = c.product("P4");
  no_image.image_refs.clear();
  CHECK(code_of([&] { forge.render_feature_prompt(no_image); }) == ErrorCode::kMissingImage);
}

TEST_CASE("intention prompt carries the relation prefix") {
  const Catalog c = mind::testing::fixture_catalog();
  const PromptForge forge(PromptTemplates::defaults(), RelationTemplates::defaults(), GenParams{128, 0.5, 40});
  const Product a = annotated(c.product("P3"), "A daypack.");
  const Product b = annotated(c.product("P4"), "A bottle.");

  const auto used = forge.render_intention_prompt(a, b, Relation::kUsedFor);
  CHECK(used.text.find("\"they both are used for\"") != std::string::npos);
  CHECK(used.text.find("the potential co-buy intention could be they both are used for") != std::string::npos);
  CHECK(used.text.find("120 words") != std::string::npos);
  CHECK(used.images.size() == 2);
  CHECK(used.relation == Relation::kUsedFor);
  CHECK(used.relation_template == "they both are used for");
  CHECK(used.gen_params.seed == 40);
  CHECK(used.gen_params.max_tokens == 128);

  const auto open = forge.render_intention_prompt(a, b, Relation::kOpen, 3);
  CHECK(open.text.find("an open relation of your choice") != std::string::npos);
  CHECK(open.gen_params.seed == 43);
  CHECK(open.relation_template.empty());

  CHECK(forge.render_intention_prompt(a, b, Relation::kUsedFor).text == used.text);
  CHECK(code_of([&] { forge.render_intention_prompt(c.product("P3"), b, Relation::kUsedFor); }) ==
        ErrorCode::kFeaturesMissing);
}

TEST_CASE("substituted values are not rescanned") {
  const Catalog c = mind::testing::fixture_catalog();
  const PromptForge forge;
  const Product a = annotated(c.product("P1"), "has {{title_b}} in it");
  const Product b = annotated(c.product("P2"), "plain");
  const auto p = forge.render_intention_prompt(a, b, Relation::kIsA);
  CHECK(p.text.find("has {{title_b}} in it") != std::string::npos);
}

TEST_CASE("filter prompt") {
  const Catalog c = mind::testing::fixture_catalog();
  const PromptForge forge;
  const Product a = annotated(c.product("P5"), "Poles.");
  const Product b = annotated(c.product("P6"), "Boots.");
  const auto f = forge.render_filter_prompt(a, b, Relation::kUsedFor, "  they both are used for hiking  ");
  CHECK(f.stage == Stage::kRoleAwareFilter);
  CHECK(f.text.find("would be: they both are used for hiking\n") != std::string::npos);
  CHECK(f.text.find("Assume the role of an E-commerce customer") != std::string::npos);
  CHECK(f.text.find("Yes, ... or No, ...") != std::string::npos);
  CHECK(code_of([&] { forge.render_filter_prompt(a, b, Relation::kUsedFor, " \n "); }) ==
        ErrorCode::kEmptyIntention);
}

TEST_CASE("fingerprint tracks templates, phrasings and parameters") {
  const PromptForge base;
  CHECK(base.fingerprint() == PromptForge().fingerprint());
  CHECK(base.fingerprint().size() == 16);

  const PromptForge other_params(PromptTemplates::defaults(), RelationTemplates::defaults(),
                                 GenParams{256, 0.2, 1});
  CHECK(other_params.fingerprint() != base.fingerprint());

  PromptTemplates t = PromptTemplates::defaults();
  t.set(Stage::kRoleAwareFilter, "Is this right? {{intention}}");
  CHECK(PromptForge(t, RelationTemplates::defaults()).fingerprint() != base.fingerprint());

  std::string tsv = RelationTemplates::defaults().to_tsv();
  tsv.replace(tsv.find("they both can"), 13, "both can");
  CHECK(PromptForge(PromptTemplates::defaults(), RelationTemplates::parse(tsv)).fingerprint() !=
        base.fingerprint());
}
