// Copyright 2026 The wafersim Authors
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

// Serial reference (golden_run) against the parallel kernel at several
// worker counts, on the same random scenario.
#include <benchmark/benchmark.h>

#include "wafersim/golden.hpp"
#include "wafersim/kernel.hpp"

#include "support.hpp"

namespace
{

const wafersim::testing::Scenario &scenario()
{
    static const wafersim::testing::Scenario s = [] {
        auto sc = wafersim::testing::random_scenario(42, {5000, 50000, 16, 8, 100});
        return sc;
    }();
    return s;
}

void BM_golden(benchmark::State &state)
{
    const auto &s = scenario();
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(wafersim::golden_run(s.network, s.stimulus, s.steps));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * s.steps));
}
BENCHMARK(BM_golden)->Unit(benchmark::kMillisecond);

void BM_kernel(benchmark::State &state)
{
    const auto &s = scenario();
    wafersim::RunOptions opt;
    opt.workers = static_cast<unsigned>(state.range(0));
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(wafersim::run(s.cfg, s.network, s.stimulus, s.steps, 1, opt));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * s.steps));
}
BENCHMARK(BM_kernel)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

// Synaptic fan-out dominated load: every chiplet busy each step.
void BM_kernel_dense(benchmark::State &state)
{
    static const wafersim::testing::Scenario s = [] {
        auto sc = wafersim::testing::random_scenario(7, {5000, 200000, 64, 8, 50});
        return sc;
    }();
    wafersim::RunOptions opt;
    opt.workers = static_cast<unsigned>(state.range(0));
    for (auto _ : state)
    {
        benchmark::DoNotOptimize(wafersim::run(s.cfg, s.network, s.stimulus, s.steps, 1, opt));
    }
}
BENCHMARK(BM_kernel_dense)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
