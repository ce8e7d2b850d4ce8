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

#include <array>
#include <cctype>

#include "mind/gateway.hpp"
#include "mind/text.hpp"

namespace mind {
namespace {

constexpr std::array<std::string_view, 8> kAdjectives = {
    "sleek", "durable", "lightweight", "compact",
    "rugged", "elegant", "ergonomic", "water-resistant"};

constexpr std::array<std::string_view, 8> kActivities = {
    "outdoor activities", "daily commuting", "a home office setup", "a weekend trip",
    "a themed party", "cold weather conditions", "fitness training", "a smart home system"};

constexpr std::array<std::string_view, 8> kBenefits = {
    "staying comfortable", "saving time", "looking stylish", "keeping things organized",
    "protecting their gear", "enjoying music", "working efficiently", "staying warm"};

constexpr std::string_view kLeadIn = "the potential co-buy intention could be ";

template <std::size_t N>
std::string_view pick(const std::array<std::string_view, N>& list, std::uint64_t h, int shift) {
  return list[(h >> shift) % N];
}

std::uint64_t mock_hash(const PromptBundle& b) {
  std::string key(stage_name(b.stage));
  key += '\x1f';
  key += std::to_string(b.gen_params.seed);
  key += '\x1f';
  key += b.text;
  return text::fnv1a64(key);
}

std::string clause(std::uint64_t h) {
  return std::string(pick(kActivities, h, 16)) + " and " + std::string(pick(kBenefits, h, 24));
}

std::string feature_reply(std::uint64_t h) {
  return "The product has a " + std::string(pick(kAdjectives, h, 8)) + " design with " +
         std::string(pick(kAdjectives, h, 12)) + " build quality and suits " +
         std::string(pick(kActivities, h, 16)) + ".";
}

std::string intention_reply(const PromptBundle& b, std::uint64_t h, MockScenario s) {
  const std::string& tmpl = b.relation_template;
  if (s == MockScenario::kMissingPrefix) {
    return "These products are great for " + clause(h) + ".";
  }
  std::string body = tmpl.empty() ? "the customer wants them for " + clause(h)
                                  : tmpl + " " + clause(h);
  if (s == MockScenario::kOverLongIntention) {
    for (int i = 0; i < 150; ++i) {
      body += " ";
      body += pick(kAdjectives, h + static_cast<std::uint64_t>(i), 0);
    }
    return body + ".";
  }
  if ((h >> 4) & 1) return std::string(kLeadIn) + body + ".";
  if ((h >> 5) & 1) body[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(body[0])));
  return body + ".";
}

std::string verdict_reply(std::uint64_t h, MockScenario s) {
  const std::string activity(pick(kActivities, h, 16));
  switch (s) {
    case MockScenario::kAmbiguousVerdict:
      return "Maybe, if the customer is planning for " + activity + ".";
    case MockScenario::kAlwaysReject:
      return "No, the intention is too generic to motivate buying both products.";
    default:
      break;
  }
  if (h % 2 == 0) {
    return "Yes, an intention centred on " + activity + " would motivate buying both products.";
  }
  return "No, the intention is too generic to motivate buying both products.";
}

}  // namespace

std::string_view scenario_name(MockScenario s) {
  switch (s) {
    case MockScenario::kWellFormed: return "WellFormed";
    case MockScenario::kMissingPrefix: return "MissingPrefix";
    case MockScenario::kOverLongIntention: return "OverLongIntention";
    case MockScenario::kAmbiguousVerdict: return "AmbiguousVerdict";
    case MockScenario::kAlwaysReject: return "AlwaysReject";
  }
  return "";
}

std::optional<MockScenario> parse_scenario(std::string_view name) {
  for (auto s : {MockScenario::kWellFormed, MockScenario::kMissingPrefix,
                 MockScenario::kOverLongIntention, MockScenario::kAmbiguousVerdict,
                 MockScenario::kAlwaysReject}) {
    if (text::iequals(scenario_name(s), name)) return s;
  }
  return std::nullopt;
}

ModelResponse mock_complete(const PromptBundle& bundle, MockScenario scenario) {
  const std::uint64_t h = mock_hash(bundle);
  ModelResponse r;
  r.backend_id = "mock:" + std::string(scenario_name(scenario));
  r.attempt = 1;
  switch (bundle.stage) {
    case Stage::kFeatureExtraction:
      r.text = feature_reply(h);
      break;
    case Stage::kIntentionGeneration:
      r.text = intention_reply(bundle, h, scenario);
      break;
    case Stage::kRoleAwareFilter:
      r.text = verdict_reply(h, scenario);
      break;
  }
  return r;
}

ModelResponse MockClient::complete(const PromptBundle& bundle) {
  ++calls_;
  return mock_complete(bundle, scenario_);
}

std::string MockClient::backend_id() const {
  return "mock:" + std::string(scenario_name(scenario_));
}

}  // namespace mind
