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

#include "mind/catalog.hpp"
#include "mind/error.hpp"
#include "test_support.hpp"

using namespace mind;
using mind::testing::TempDir;
using mind::testing::code_of;
using mind::testing::write_text;

namespace {

ImageResolver accept_all() {
  return [](const std::string&) { return true; };
}

}  // namespace

TEST_CASE("fixture catalog ingests six products and five pairs") {
  const Catalog c = mind::testing::fixture_catalog();
  CHECK(c.products().size() == 6);
  CHECK(c.cobuys().size() == 5);
  CHECK(c.stats() == CatalogStats{6, 0, 5, 0});
  const auto [a, b] = c.get_pair("C1");
  CHECK(a.title == "Wireless Optical Mouse");
  CHECK(b.id == "P2");
  REQUIRE(a.image_refs.size() == 1);
  CHECK(std::filesystem::path(a.image_refs[0]).is_absolute());
  CHECK(c.paired_product_ids().size() == 6);
  CHECK(a.attributes.front() == std::pair<std::string, std::string>{"color", "black"});
}

TEST_CASE("Amazon metadata aliases") {
  const auto p = parse_product_record(
      R"({"asin":"B01","title":"  Trail   Shoes ","main_cat":"Shoes","description":["Light","and grippy"],)"
      R"("feature":["breathable"],"details":{"weight":"300 g"},"imageURLHighRes":["https://img/x.jpg"]})",
      1);
  CHECK(p.id == "B01");
  CHECK(p.title == "Trail Shoes");
  CHECK(p.domain == "Shoes");
  CHECK(p.description == "Light and grippy");
  CHECK(p.image_refs == std::vector<std::string>{"https://img/x.jpg"});
  REQUIRE(p.attributes.size() == 2);
  CHECK(p.attributes[1].first == "feature");
}

TEST_CASE("malformed product lines name the line") {
  CHECK(code_of([] { parse_product_record("not json", 3); }) == ErrorCode::kMalformed);
  CHECK(code_of([] { parse_product_record(R"({"title":"x"})", 1); }) == ErrorCode::kMalformed);
  CHECK(code_of([] { parse_product_record(R"({"id":"a","title":""})", 1); }) == ErrorCode::kMalformed);
  CHECK(code_of([] { parse_product_record(R"({"id":"a","title":"t","images":5})", 1); }) ==
        ErrorCode::kMalformed);
  try {
    parse_product_record("[1]", 7);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 7") != std::string::npos);
  }
}

TEST_CASE("products without a resolvable image are dropped") {
  TempDir dir;
  write_text(dir / "p.jsonl",
             R"({"id":"A","title":"a","images":["data:image/png;base64,AA=="]})" "\n"
             R"({"id":"B","title":"b","images":["missing.png"]})" "\n"
             R"({"id":"C","title":"c"})" "\n"
             R"({"id":"D","title":"d","images":["missing.png","data:image/png;base64,AA=="]})" "\n");
  Catalog c;
  const auto s = c.ingest_products(dir / "p.jsonl", true, default_image_resolver());
  CHECK(s.products_total == 2);
  CHECK(s.products_dropped_no_image == 2);
  CHECK(c.product("D").image_refs.size() == 1);
  CHECK(c.find_product("B") == nullptr);
}

TEST_CASE("duplicate product ids leave the catalog unchanged") {
  TempDir dir;
  write_text(dir / "p.jsonl",
             R"({"id":"A","title":"a","images":["x"]})" "\n"
             R"({"id":"A","title":"again","images":["x"]})" "\n");
  Catalog c;
  CHECK(code_of([&] { c.ingest_products(dir / "p.jsonl", true, accept_all()); }) ==
        ErrorCode::kDuplicateId);
  CHECK(c.products().empty());
}

TEST_CASE("co-buy validation") {
  TempDir dir;
  write_text(dir / "p.jsonl",
             R"({"id":"A","title":"a","images":["x"]})" "\n"
             R"({"id":"B","title":"b","images":["x"]})" "\n"
             R"({"id":"C","title":"c","images":["x"]})" "\n");
  write_text(dir / "c.jsonl",
             R"({"id":"1","a":"A","b":"B"})" "\n"
             R"({"id":"2","a":"B","b":"A"})" "\n"   // unordered duplicate
             R"({"id":"3","a":"A","b":"A"})" "\n"   // self pair
             R"({"id":"4","a":"A","b":"Z"})" "\n"   // unknown product
             R"({"id":"5","a":"C","b":"B"})" "\n");
  Catalog c;
  c.ingest_products(dir / "p.jsonl", false);
  const auto s = c.ingest_cobuys(dir / "c.jsonl");
  CHECK(s.cobuys_total == 2);
  CHECK(s.cobuys_dropped == 3);
  CHECK(code_of([&] { c.cobuy("2"); }) == ErrorCode::kNotFound);
  CHECK(code_of([&] { c.product("Z"); }) == ErrorCode::kNotFound);
  CHECK(code_of([] { parse_cobuy_record(R"({"id":"x","a":"A"})", 1); }) == ErrorCode::kMalformed);
}

TEST_CASE("save and load round trip without re-probing") {
  TempDir dir;
  const Catalog c = mind::testing::fixture_catalog();
  c.save(dir.path());
  const Catalog back = Catalog::load(dir.path());
  CHECK(back.products().size() == 6);
  CHECK(back.cobuys().size() == 5);
  CHECK(back.stats() == c.stats());
  for (std::size_t i = 0; i < 6; ++i) {
    CHECK(product_to_json_line(back.products()[i]) == product_to_json_line(c.products()[i]));
  }
  TempDir empty;
  CHECK(code_of([&] { Catalog::load(empty.path()); }) == ErrorCode::kNotFound);
}
