// Copyright 2026 The meshsim Authors
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

#include <benchmark/benchmark.h>

#include "meshsim/harness/config.hpp"
#include "meshsim/harness/run.hpp"
#include "meshsim/radio/phy.hpp"
#include "meshsim/sim/engine.hpp"

namespace {

using namespace meshsim;

// Schedule N events at pseudo-random times and drain the queue.
void BM_EventQueue(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    sim::Simulator s;
    std::uint64_t x = 0x9E3779B97F4A7C15ull;
    std::uint64_t fired = 0;
    for (std::size_t i = 0; i < n; ++i) {
      x ^= x << 13;
      x ^= x >> 7;
      x ^= x << 17;
      s.schedule(x % 10'000'000, sim::kGlobalTarget, sim::EventKind::Timer, [&fired] { ++fired; });
    }
    s.run(sim::kForever);
    benchmark::DoNotOptimize(fired);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_EventQueue)->Arg(1'000)->Arg(100'000);

void BM_Airtime(benchmark::State& state) {
  std::uint64_t acc = 0;
  for (auto _ : state) {
    for (std::uint32_t n = 1; n <= 255; ++n) {
      std::uint32_t bytes = n;
      benchmark::DoNotOptimize(bytes);
      acc += radio::airtime(bytes, radio::PhyMode::Uncoded1M);
    }
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_Airtime);

void BM_GroupScenario(benchmark::State& state) {
  harness::ScenarioConfig cfg = harness::make_config("group_unicast_vs_group", 1, "group");
  cfg.traffic.iterations = 10;
  for (auto _ : state) {
    auto report = harness::run_scenario(cfg);
    benchmark::DoNotOptimize(report.rows.data());
  }
}
BENCHMARK(BM_GroupScenario)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
