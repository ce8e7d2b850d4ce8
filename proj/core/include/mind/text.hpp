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

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mind::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);

// Replaces every run of ASCII whitespace by one space and trims both ends.
std::string collapse_whitespace(std::string_view s);

std::vector<std::string_view> split_words(std::string_view s);
std::size_t word_count(std::string_view s);

bool iequals(std::string_view a, std::string_view b);
bool istarts_with(std::string_view s, std::string_view prefix);

// Lowercased runs of [a-z0-9], apostrophes and inner hyphens kept.
std::vector<std::string> tokenize(std::string_view s);

// 64-bit FNV-1a. Stable across platforms and runs.
std::uint64_t fnv1a64(std::string_view data,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);
std::string to_hex(std::uint64_t value, int digits = 16);

// k distinct indices from [0, n), chosen uniformly with a seeded
// partial Fisher-Yates shuffle. Result order is the draw order.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k,
                                        std::uint64_t seed);

std::string base64_encode(std::string_view bytes);

// ISO-8601 UTC, second resolution.
std::string utc_now_iso8601();

}  // namespace mind::text
