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
#include <thread>

#include "mind/error.hpp"
#include "mind/jsonl.hpp"
#include "mind/text.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace mind;
using mind::testing::TempDir;

TEST_CASE("whitespace helpers") {
  CHECK(text::trim("  a b \n") == "a b");
  CHECK(text::collapse_whitespace(" a\t\tb \n c ") == "a b c");
  CHECK(text::word_count("  one two\tthree\n") == 3);
  CHECK(text::word_count("") == 0);
  CHECK(text::iequals("Because", "bEcAuSe"));
  CHECK_FALSE(text::iequals("Because", "Becaus"));
  CHECK(text::istarts_with("Because of rain", "because"));
}

TEST_CASE("tokenize keeps apostrophes and inner hyphens") {
  const auto t = text::tokenize("Kid's well-made -- Hiking-Boots, 30L!");
  CHECK(t == std::vector<std::string>{"kid's", "well-made", "hiking-boots", "30l"});
}

TEST_CASE("fnv1a64 matches the reference vectors and the oracle") {
  CHECK(text::fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(text::fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(text::fnv1a64("foobar") == 0x85944171f73967e8ULL);
  for (std::string s : {"x", "FeatureExtraction\x1f" "7\x1fhello", "mind"}) {
    CHECK(text::fnv1a64(s) == oracle::fnv1a64(s));
  }
  CHECK(text::to_hex(0xabcULL, 6) == "000abc");
}

TEST_CASE("sample_indices is seeded, distinct and in range") {
  const auto a = text::sample_indices(50, 10, 42);
  const auto b = text::sample_indices(50, 10, 42);
  CHECK(a == b);
  CHECK(text::sample_indices(50, 10, 43) != a);
  std::set<std::size_t> uniq(a.begin(), a.end());
  CHECK(uniq.size() == 10);
  for (auto i : a) CHECK(i < 50);
  CHECK(text::sample_indices(3, 10, 1).size() == 3);
}

TEST_CASE("base64") {
  CHECK(text::base64_encode("") == "");
  CHECK(text::base64_encode("f") == "Zg==");
  CHECK(text::base64_encode("fo") == "Zm8=");
  CHECK(text::base64_encode("foobar") == "Zm9vYmFy");
}

TEST_CASE("utc timestamp shape") {
  const auto ts = text::utc_now_iso8601();
  REQUIRE(ts.size() == 20);
  CHECK(ts[4] == '-');
  CHECK(ts[10] == 'T');
  CHECK(ts.back() == 'Z');
}

TEST_CASE("error codes map to exit classes") {
  CHECK(exit_code_for(ErrorCode::kUsage) == 2);
  CHECK(exit_code_for(ErrorCode::kInvalidConfig) == 2);
  CHECK(exit_code_for(ErrorCode::kMalformed) == 3);
  CHECK(exit_code_for(ErrorCode::kEmptyExport) == 3);
  CHECK(exit_code_for(ErrorCode::kAuthFailed) == 4);
  CHECK(exit_code_for(ErrorCode::kExhaustedRetries) == 4);
  CHECK(exit_code_for(ErrorCode::kRunAborted) == 4);
  CHECK(to_string(ErrorCode::kPayloadTooLarge) == "PayloadTooLarge");
}

TEST_CASE("line files") {
  TempDir dir;
  const auto p = dir / "a.jsonl";
  io::write_file_atomic(p, "one\n\n  \r\ntwo\r\nthree");
  std::vector<std::pair<std::string, std::size_t>> seen;
  io::for_each_line(p, [&](std::string_view l, std::size_t n) { seen.emplace_back(std::string(l), n); });
  REQUIRE(seen.size() == 3);
  CHECK(seen[0] == std::pair<std::string, std::size_t>{"one", 1});
  CHECK(seen[1] == std::pair<std::string, std::size_t>{"two", 4});
  CHECK(seen[2] == std::pair<std::string, std::size_t>{"three", 5});
  CHECK_FALSE(std::filesystem::exists(dir / "a.jsonl.tmp"));
  CHECK_THROWS_AS(io::read_file(dir / "missing"), Error);
}

TEST_CASE("durable appender writes whole lines from many threads") {
  TempDir dir;
  const auto p = dir / "sub" / "log.jsonl";
  {
    io::DurableAppender out(p, false);
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
      threads.emplace_back([&, t] {
        for (int i = 0; i < 50; ++i) out.append_line("t" + std::to_string(t) + "-" + std::to_string(i));
      });
    }
    for (auto& th : threads) th.join();
  }
  std::set<std::string> lines;
  io::for_each_line(p, [&](std::string_view l, std::size_t) { lines.insert(std::string(l)); });
  CHECK(lines.size() == 200);
  CHECK(lines.count("t3-49") == 1);
}
