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

#include "doctest.h"

#include <algorithm>

#include "support.hpp"
#include "wafersim/error.hpp"
#include "wafersim/golden.hpp"
#include "wafersim/kernel.hpp"
#include "wafersim/report.hpp"

using namespace wafersim;

namespace
{

WaferConfig grid(std::uint32_t w, std::uint32_t h)
{
    WaferConfig cfg = default_config();
    cfg.grid_width = w;
    cfg.grid_height = h;
    cfg.sync_domains = default_sync_domains(w, h);
    return cfg;
}

} // namespace

TEST_CASE("empty network runs vacuously")
{
    const WaferConfig cfg = default_config();
    Network net = NetworkBuilder().build();
    net.placement = make_placement(net, 8, 8, {}, {});
    const RunResult r = run(cfg, net, {}, 10, 1);
    CHECK(r.trace.empty());
    CHECK(r.report.total_sops == 0);
    CHECK(r.report.total_spikes == 0);
    CHECK(r.report.step_records.size() == 10);
    CHECK(r.report.steps == 10);
}

TEST_CASE("one spike crosses one link")
{
    const WaferConfig cfg = grid(2, 1);
    NetworkBuilder b;
    b.add_neurons(2);
    b.add_synapse(0, 1, 1);
    Network net = b.build();
    net.placement = make_placement(net, 2, 1, {{0, 0}, {1, 0}}, {0, 0});
    const Stimulus stim{{0, {0, 0}, 0, 150}};
    const RunResult r = run(cfg, net, stim, 3, 0);
    REQUIRE(r.trace.size() == 1);
    CHECK(r.trace[0] == SpikeRecord{0, {0, 0}, 0});
    CHECK(r.report.total_sops == 1);
    CHECK(r.report.events_injected == 1);
    CHECK(r.report.events_delivered == 1);
    CHECK(r.report.chiplets[1].sops == 1);
    CHECK(golden_run(net, stim, 3) == r.trace);
}

TEST_CASE("compute cycles")
{
    const WaferConfig cfg = default_config();
    CHECK(compute_cycles(cfg, 0, 0) == 0);
    CHECK(compute_cycles(cfg, 1, 1) == 2);
    CHECK(compute_cycles(cfg, 1024, 3003) == 2);
    CHECK(compute_cycles(cfg, 1025, 3004) == 4);
}

TEST_CASE("step length is the larger of budget and actual")
{
    const auto s = testing::random_scenario(11, {300, 3000, 6, 4, 20});
    const RunResult r = run(s.cfg, s.network, s.stimulus, s.steps, 1);
    Cycle total = 0;
    for (const StepRecord &rec : r.report.step_records)
    {
        total += std::max(rec.budget, rec.actual);
    }
    CHECK(total == r.report.elapsed_cycles);
    CHECK(r.report.events_injected == r.report.events_delivered);
}

TEST_CASE("kernel matches the golden model")
{
    for (std::uint64_t seed = 100; seed < 110; ++seed)
    {
        const auto s = testing::random_scenario(seed, {800, 8000, 16, 8, 30});
        const RunResult r = run(s.cfg, s.network, s.stimulus, s.steps, seed);
        CHECK(r.trace == golden_run(s.network, s.stimulus, s.steps));
    }
}

TEST_CASE("empty stimulus at rest gives an empty trace")
{
    auto s = testing::random_scenario(4, {300, 3000, 6, 4, 20});
    NetworkBuilder b;
    b.add_neurons(static_cast<std::uint32_t>(s.network.size()));
    for (std::uint32_t n = 0; n < s.network.size(); ++n)
    {
        for (std::uint64_t k = s.network.offsets[n]; k < s.network.offsets[n + 1]; ++k)
        {
            b.add_synapse(n, s.network.targets[k], s.network.weights[k]);
        }
    }
    Network rest = b.build();
    rest.placement = s.network.placement;
    CHECK(run(s.cfg, rest, {}, 20, 0).trace.empty());
    CHECK(golden_run(rest, {}, 20).empty());
}

TEST_CASE("independent sub-networks compose")
{
    const WaferConfig cfg = grid(2, 2);
    NetworkBuilder b;
    b.add_neurons(4);
    b.add_synapse(0, 1, 120);
    b.add_synapse(1, 0, 120);
    b.add_synapse(2, 3, 90);
    b.add_synapse(3, 2, 90);
    Network net = b.build();
    net.placement = make_placement(net, 2, 2, {{0, 0}, {1, 1}, {1, 0}, {0, 1}}, {0, 0, 0, 0});
    const Stimulus a{{0, {0, 0}, 0, 100}};
    const Stimulus c{{1, {1, 0}, 0, 200}};
    Stimulus both = a;
    both.insert(both.end(), c.begin(), c.end());
    const SpikeTrace ta = run(cfg, net, a, 12, 0).trace;
    const SpikeTrace tc = run(cfg, net, c, 12, 0).trace;
    SpikeTrace merged = ta;
    merged.insert(merged.end(), tc.begin(), tc.end());
    std::sort(merged.begin(), merged.end());
    CHECK(run(cfg, net, both, 12, 0).trace == merged);
    CHECK(ta.size() == 12);
}

TEST_CASE("worker count does not change results")
{
    const auto s = testing::random_scenario(21, {1500, 15000, 16, 8, 25});
    const RunResult one = run(s.cfg, s.network, s.stimulus, s.steps, 9, {1, false, true});
    for (unsigned workers : {2u, 8u})
    {
        const RunResult many = run(s.cfg, s.network, s.stimulus, s.steps, 9, {workers, false, true});
        CHECK(format_trace(many.trace) == format_trace(one.trace));
        CHECK(format_report(many.report) == format_report(one.report));
        CHECK(many.packets == one.packets);
    }
}

TEST_CASE("debug scans find no violations")
{
    const auto s = testing::random_scenario(31, {600, 6000, 16, 8, 15});
    const RunResult r = run(s.cfg, s.network, s.stimulus, s.steps, 2, {1, true, false});
    CHECK(r.report.barrier_violations == 0);
    CHECK(r.report.quiescence_violations == 0);
    CHECK(count_barrier_violations(r.phase_log) == 0);
    CHECK_FALSE(r.phase_log.empty());
}

TEST_CASE("phase log checker flags early phases")
{
    using K = PhaseLogEntry::Kind;
    std::vector<PhaseLogEntry> log{{K::neuron_phase, 0, 0, 0}, {K::neuron_phase, 1, 0, 5},
            {K::barrier_complete, 0, 0, 9}, {K::neuron_phase, 1, 1, 10}};
    CHECK(count_barrier_violations(log) == 1);
}

TEST_CASE("run rejects bad inputs")
{
    const WaferConfig cfg = grid(1, 1);
    NetworkBuilder b;
    b.add_neurons(3);
    Network net = b.build();
    CHECK_THROWS_AS(run(cfg, net, {}, 1, 0), ValidationError);
    net.placement = make_placement(net, 1, 1, {{0, 0}, {0, 0}, {0, 0}}, {0, 1, 2});
    WaferConfig tight = cfg;
    tight.neuron_capacity_per_chiplet = 2;
    CHECK_THROWS_AS(run(tight, net, {}, 1, 0), InfeasibleError);
    CHECK_THROWS_AS(run(cfg, net, {{0, {0, 0}, 7, 1}}, 1, 0), ValidationError);
    CHECK_THROWS_AS(run(cfg, net, {{0, {3, 0}, 0, 1}}, 1, 0), ValidationError);
}
