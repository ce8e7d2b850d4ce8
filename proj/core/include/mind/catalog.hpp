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

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace mind {

struct Product {
  std::string id;
  std::string title;
  std::string domain;
  std::string description;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<std::string> image_refs;
  std::optional<std::string> extracted_features;  // filled by the feature stage
};

struct CoBuyRecord {
  std::string id;
  std::string product_a;
  std::string product_b;
};

struct CatalogStats {
  std::size_t products_total = 0;
  std::size_t products_dropped_no_image = 0;
  std::size_t cobuys_total = 0;
  std::size_t cobuys_dropped = 0;

  bool operator==(const CatalogStats&) const = default;
};

// Returns true when an image reference is reachable.
using ImageResolver = std::function<bool(const std::string& ref)>;

// http(s) refs are probed over the network, file:// and bare refs must name
// an existing regular file, data: URIs always resolve.
ImageResolver default_image_resolver(
    std::chrono::milliseconds timeout = std::chrono::milliseconds(5000));

// Parses one products-file line. Accepts the native field names
// {id,title,domain,description,attributes,images} and the Amazon metadata
// aliases {asin,main_cat,feature,details,imageURLHighRes,imageURL}.
// Relative local image refs are made absolute against base_dir.
Product parse_product_record(std::string_view line, std::size_t line_no,
                             const std::filesystem::path& base_dir = {});
CoBuyRecord parse_cobuy_record(std::string_view line, std::size_t line_no);

std::string product_to_json_line(const Product& product);
std::string cobuy_to_json_line(const CoBuyRecord& record);

// Products and co-buy records loaded from line-delimited files. Populated by
// a single writer; const access is safe from any number of threads.
class Catalog {
 public:
  // Drops products whose image refs all fail to resolve. Unresolvable refs
  // are removed from surviving products. On error the catalog is unchanged.
  CatalogStats ingest_products(const std::filesystem::path& path,
                               bool resolve_images,
                               const ImageResolver& resolver = {});

  // Drops self-pairs, pairs naming unknown products, and unordered
  // duplicates. Requires products to be ingested first.
  CatalogStats ingest_cobuys(const std::filesystem::path& path);

  std::pair<const Product&, const Product&> get_pair(std::string_view cobuy_id) const;
  const CoBuyRecord& cobuy(std::string_view cobuy_id) const;
  const Product& product(std::string_view product_id) const;
  const Product* find_product(std::string_view product_id) const;

  const std::vector<Product>& products() const { return products_; }
  const std::vector<CoBuyRecord>& cobuys() const { return cobuys_; }
  const CatalogStats& stats() const { return stats_; }

  // Ids of products that appear in at least one stored co-buy, in catalog order.
  std::vector<std::string> paired_product_ids() const;

  // Persists the validated catalog as products.jsonl and cobuys.jsonl.
  void save(const std::filesystem::path& dir) const;
  // Reloads a saved catalog without re-probing images.
  static Catalog load(const std::filesystem::path& dir);

 private:
  std::vector<Product> products_;
  std::vector<CoBuyRecord> cobuys_;
  std::unordered_map<std::string, std::size_t> product_index_;
  std::unordered_map<std::string, std::size_t> cobuy_index_;
  CatalogStats stats_;
};

}  // namespace mind
