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

#include "mind/catalog.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "mind/error.hpp"
#include "mind/http.hpp"
#include "mind/jsonl.hpp"
#include "mind/text.hpp"

namespace mind {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void malformed(std::size_t line_no, const std::string& what) {
  fail(ErrorCode::kMalformed, "line " + std::to_string(line_no) + ": " + what);
}

json parse_object(std::string_view line, std::size_t line_no) {
  json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) malformed(line_no, "invalid JSON");
  if (!j.is_object()) malformed(line_no, "expected a JSON object");
  return j;
}

const json* field(const json& j, std::initializer_list<const char*> names) {
  for (const char* name : names) {
    auto it = j.find(name);
    if (it != j.end() && !it->is_null()) return &*it;
  }
  return nullptr;
}

std::string as_text(const json& v, std::size_t line_no, const char* name) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_array()) {
    // Amazon dumps carry description/feature as string arrays.
    std::string joined;
    for (const auto& part : v) {
      if (!part.is_string()) malformed(line_no, std::string(name) + ": expected strings");
      if (!joined.empty()) joined.push_back(' ');
      joined += part.get<std::string>();
    }
    return joined;
  }
  if (v.is_number()) return v.dump();
  malformed(line_no, std::string(name) + ": expected text");
}

bool is_local_ref(const std::string& ref) {
  return ref.find("://") == std::string::npos && ref.rfind("data:", 0) != 0;
}

std::string absolutize(const std::string& ref, const std::filesystem::path& base_dir) {
  if (!is_local_ref(ref) || base_dir.empty()) return ref;
  std::filesystem::path p(ref);
  if (p.is_absolute()) return ref;
  return (std::filesystem::absolute(base_dir) / p).lexically_normal().string();
}

}  // namespace

ImageResolver default_image_resolver(std::chrono::milliseconds timeout) {
  return [timeout](const std::string& ref) -> bool {
    if (ref.rfind("data:", 0) == 0) return true;
    if (ref.rfind("http://", 0) == 0 || ref.rfind("https://", 0) == 0) {
      return http::probe(ref, timeout);
    }
    std::string path = ref;
    if (path.rfind("file://", 0) == 0) path = path.substr(7);
    std::error_code ec;
    return std::filesystem::is_regular_file(path, ec);
  };
}

Product parse_product_record(std::string_view line, std::size_t line_no,
                             const std::filesystem::path& base_dir) {
  const json j = parse_object(line, line_no);
  Product p;

  const json* id = field(j, {"id", "asin"});
  if (!id || !id->is_string() || id->get<std::string>().empty()) {
    malformed(line_no, "missing id");
  }
  p.id = id->get<std::string>();

  const json* title = field(j, {"title"});
  if (!title) malformed(line_no, "missing title");
  p.title = text::collapse_whitespace(as_text(*title, line_no, "title"));
  if (p.title.empty()) malformed(line_no, "empty title");

  if (const json* d = field(j, {"domain", "main_cat"})) p.domain = as_text(*d, line_no, "domain");
  if (const json* d = field(j, {"description"})) p.description = as_text(*d, line_no, "description");

  auto add_attributes = [&](const json& a) {
    if (a.is_object()) {
      for (const auto& [k, v] : a.items()) p.attributes.emplace_back(k, as_text(v, line_no, "attributes"));
    } else if (a.is_array()) {
      for (const auto& kv : a) {
        if (!kv.is_array() || kv.size() != 2 || !kv[0].is_string()) {
          malformed(line_no, "attributes: expected [key, value] pairs");
        }
        p.attributes.emplace_back(kv[0].get<std::string>(), as_text(kv[1], line_no, "attributes"));
      }
    } else {
      malformed(line_no, "attributes: expected object or pair list");
    }
  };
  if (const json* a = field(j, {"attributes", "details"})) add_attributes(*a);
  if (const json* f = field(j, {"feature"})) {
    p.attributes.emplace_back("feature", as_text(*f, line_no, "feature"));
  }

  if (const json* imgs = field(j, {"images", "imageURLHighRes", "imageURL"})) {
    if (imgs->is_string()) {
      p.image_refs.push_back(imgs->get<std::string>());
    } else if (imgs->is_array()) {
      for (const auto& r : *imgs) {
        if (!r.is_string()) malformed(line_no, "images: expected strings");
        if (!r.get<std::string>().empty()) p.image_refs.push_back(r.get<std::string>());
      }
    } else {
      malformed(line_no, "images: expected string or list");
    }
  }
  for (auto& ref : p.image_refs) ref = absolutize(ref, base_dir);

  if (const json* f = field(j, {"extracted_features"}); f && f->is_string()) {
    p.extracted_features = f->get<std::string>();
  }
  return p;
}

CoBuyRecord parse_cobuy_record(std::string_view line, std::size_t line_no) {
  const json j = parse_object(line, line_no);
  CoBuyRecord r;
  auto required = [&](const char* name) {
    const json* v = field(j, {name});
    if (!v || !v->is_string() || v->get<std::string>().empty()) {
      malformed(line_no, std::string("missing ") + name);
    }
    return v->get<std::string>();
  };
  r.id = required("id");
  r.product_a = required("a");
  r.product_b = required("b");
  return r;
}

std::string product_to_json_line(const Product& p) {
  json j;
  j["id"] = p.id;
  j["title"] = p.title;
  j["domain"] = p.domain;
  j["description"] = p.description;
  json attrs = json::array();
  for (const auto& [k, v] : p.attributes) attrs.push_back(json::array({k, v}));
  j["attributes"] = std::move(attrs);
  j["images"] = p.image_refs;
  return j.dump();
}

std::string cobuy_to_json_line(const CoBuyRecord& r) {
  json j;
  j["id"] = r.id;
  j["a"] = r.product_a;
  j["b"] = r.product_b;
  return j.dump();
}

CatalogStats Catalog::ingest_products(const std::filesystem::path& path,
                                      bool resolve_images,
                                      const ImageResolver& resolver) {
  const ImageResolver resolve = resolver ? resolver : default_image_resolver();
  std::vector<Product> accepted;
  std::unordered_set<std::string> seen;
  for (const auto& p : products_) seen.insert(p.id);
  std::size_t dropped = 0;

  io::for_each_line(path, [&](std::string_view line, std::size_t line_no) {
    Product p = parse_product_record(line, line_no, path.parent_path());
    if (!seen.insert(p.id).second) fail(ErrorCode::kDuplicateId, p.id);
    if (resolve_images) {
      std::erase_if(p.image_refs, [&](const std::string& ref) { return !resolve(ref); });
    }
    if (p.image_refs.empty()) {
      ++dropped;
      return;
    }
    accepted.push_back(std::move(p));
  });

  for (auto& p : accepted) {
    product_index_.emplace(p.id, products_.size());
    products_.push_back(std::move(p));
  }
  stats_.products_total = products_.size();
  stats_.products_dropped_no_image += dropped;
  return stats_;
}

CatalogStats Catalog::ingest_cobuys(const std::filesystem::path& path) {
  std::vector<CoBuyRecord> accepted;
  std::set<std::pair<std::string, std::string>> pairs;
  std::unordered_set<std::string> ids;
  for (const auto& c : cobuys_) {
    pairs.insert(std::minmax(c.product_a, c.product_b));
    ids.insert(c.id);
  }
  std::size_t dropped = 0;

  io::for_each_line(path, [&](std::string_view line, std::size_t line_no) {
    CoBuyRecord r = parse_cobuy_record(line, line_no);
    if (!ids.insert(r.id).second) fail(ErrorCode::kDuplicateId, r.id);
    const bool valid = r.product_a != r.product_b && find_product(r.product_a) &&
                       find_product(r.product_b) &&
                       pairs.insert(std::minmax(r.product_a, r.product_b)).second;
    if (!valid) {
      ++dropped;
      return;
    }
    accepted.push_back(std::move(r));
  });

  for (auto& r : accepted) {
    cobuy_index_.emplace(r.id, cobuys_.size());
    cobuys_.push_back(std::move(r));
  }
  stats_.cobuys_total = cobuys_.size();
  stats_.cobuys_dropped += dropped;
  return stats_;
}

std::pair<const Product&, const Product&> Catalog::get_pair(std::string_view cobuy_id) const {
  const CoBuyRecord& r = cobuy(cobuy_id);
  return {product(r.product_a), product(r.product_b)};
}

const CoBuyRecord& Catalog::cobuy(std::string_view cobuy_id) const {
  auto it = cobuy_index_.find(std::string(cobuy_id));
  if (it == cobuy_index_.end()) fail(ErrorCode::kNotFound, "co-buy " + std::string(cobuy_id));
  return cobuys_[it->second];
}

const Product& Catalog::product(std::string_view product_id) const {
  const Product* p = find_product(product_id);
  if (!p) fail(ErrorCode::kNotFound, "product " + std::string(product_id));
  return *p;
}

const Product* Catalog::find_product(std::string_view product_id) const {
  auto it = product_index_.find(std::string(product_id));
  return it == product_index_.end() ? nullptr : &products_[it->second];
}

std::vector<std::string> Catalog::paired_product_ids() const {
  std::unordered_set<std::string> used;
  for (const auto& c : cobuys_) {
    used.insert(c.product_a);
    used.insert(c.product_b);
  }
  std::vector<std::string> ids;
  for (const auto& p : products_) {
    if (used.contains(p.id)) ids.push_back(p.id);
  }
  return ids;
}

void Catalog::save(const std::filesystem::path& dir) const {
  std::string products;
  for (const auto& p : products_) products += product_to_json_line(p) + "\n";
  std::string cobuys;
  for (const auto& c : cobuys_) cobuys += cobuy_to_json_line(c) + "\n";
  json stats;
  stats["products_total"] = stats_.products_total;
  stats["products_dropped_no_image"] = stats_.products_dropped_no_image;
  stats["cobuys_total"] = stats_.cobuys_total;
  stats["cobuys_dropped"] = stats_.cobuys_dropped;
  io::write_file_atomic(dir / "products.jsonl", products);
  io::write_file_atomic(dir / "cobuys.jsonl", cobuys);
  io::write_file_atomic(dir / "stats.json", stats.dump(2) + "\n");
}

Catalog Catalog::load(const std::filesystem::path& dir) {
  if (!std::filesystem::exists(dir / "products.jsonl")) {
    fail(ErrorCode::kNotFound, "no ingested catalog under " + dir.string());
  }
  Catalog c;
  c.ingest_products(dir / "products.jsonl", /*resolve_images=*/false);
  c.ingest_cobuys(dir / "cobuys.jsonl");
  if (std::filesystem::exists(dir / "stats.json")) {
    const json s = json::parse(io::read_file(dir / "stats.json"), nullptr, false);
    if (s.is_object()) {
      c.stats_.products_dropped_no_image = s.value("products_dropped_no_image", std::size_t{0});
      c.stats_.cobuys_dropped = s.value("cobuys_dropped", std::size_t{0});
    }
  }
  return c;
}

}  // namespace mind
