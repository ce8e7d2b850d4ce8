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

#include <random>

#include <benchmark/benchmark.h>

#include "mind/annotation.hpp"
#include "mind/parsers.hpp"
#include "mind/pipeline.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace mind;

static void BM_FleissKappa(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto m = oracle::random_rating_matrix(rng, static_cast<std::size_t>(state.range(0)), 3, 4);
  for (auto _ : state) benchmark::DoNotOptimize(fleiss_kappa(m, 3));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FleissKappa)->Arg(50)->Arg(5000);

static void BM_ParseIntention(benchmark::State& state) {
  const std::string raw =
      "The potential co-buy intention could be they both are used for hiking in the mountains "
      "with friends on a cold winter weekend.";
  for (auto _ : state) benchmark::DoNotOptimize(parse_intention(raw, Relation::kUsedFor));
}
BENCHMARK(BM_ParseIntention);

static void BM_ParseVerdict(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(parse_verdict("Yes, the backpack suits a day hike."));
}
BENCHMARK(BM_ParseVerdict);

static void BM_MockPipeline(benchmark::State& state) {
  const Catalog catalog = testing::fixture_catalog();
  const PromptForge forge(PromptTemplates::defaults(), RelationTemplates::defaults(), GenParams{256, 0.2, 1});
  PipelineOptions opts;
  opts.workers = static_cast<int>(state.range(0));
  opts.clock = [] { return std::string("1970-01-01T00:00:00Z"); };
  for (auto _ : state) {
    testing::TempDir dir;
    MockClient client(MockScenario::kWellFormed);
    auto cp = Checkpoint::create(dir / "runs", "bench", run_fingerprint(forge, opts), false);
    auto kb = IntentionKb::open(dir / "kb", false);
    Pipeline p(catalog, client, forge, cp, opts);
    benchmark::DoNotOptimize(p.run({1, 2, 3}, &kb));
  }
}
BENCHMARK(BM_MockPipeline)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
