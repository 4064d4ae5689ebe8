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

#include <filesystem>
#include <set>

#include "support.hpp"
#include "wafersim/error.hpp"
#include "wafersim/mapper.hpp"

using namespace wafersim;

namespace
{

Network labeled_random(std::uint64_t seed, std::uint32_t regions, std::uint32_t max_region,
        std::uint64_t synapses)
{
    Rng rng(seed);
    NetworkBuilder b;
    for (std::uint32_t r = 0; r < regions; ++r)
    {
        const auto count = static_cast<std::uint32_t>(rng.between(1, max_region));
        const std::uint32_t first = b.add_neurons(count);
        b.add_region("r" + std::to_string(r), first, first + count);
    }
    Network shape = b.build();
    const auto n = static_cast<std::uint32_t>(shape.size());
    for (std::uint64_t k = 0; k < synapses; ++k)
    {
        // Mostly intra-region so refinement has structure to find.
        const auto src = static_cast<std::uint32_t>(rng.below(n));
        std::uint32_t dst = static_cast<std::uint32_t>(rng.below(n));
        if (rng.below(4) != 0)
        {
            const std::uint32_t region = shape.region_of[src];
            std::uint32_t lo = src;
            while (lo > 0 && shape.region_of[lo - 1] == region)
            {
                --lo;
            }
            std::uint32_t hi = src + 1;
            while (hi < n && shape.region_of[hi] == region)
            {
                ++hi;
            }
            dst = lo + static_cast<std::uint32_t>(rng.below(hi - lo));
        }
        b.add_synapse(src, dst, 1);
    }
    return b.build();
}

WaferConfig small_chiplets(std::uint64_t neurons, std::uint64_t synapses)
{
    WaferConfig cfg = default_config();
    cfg.neuron_capacity_per_chiplet = neurons;
    cfg.synapse_capacity_per_chiplet = synapses;
    return cfg;
}

} // namespace

TEST_CASE("serpentine order walks rows back and forth")
{
    const auto order = serpentine_order(3, 2);
    const std::vector<ChipletCoord> expected{{0, 0}, {1, 0}, {2, 0}, {2, 1}, {1, 1}, {0, 1}};
    CHECK(order == expected);
}

TEST_CASE("single neuron lands on one chiplet")
{
    NetworkBuilder b;
    b.add_neurons(1);
    const Network net = b.build();
    const NetworkMapping m = map_network(net, default_config());
    CHECK(m.placement.occupied_chiplets() == 1);
    CHECK(m.placement.chiplet_neurons[0] == 1);
    CHECK(m.placement.local_of[0] == 0);
}

TEST_CASE("zebrafish-scale descriptor fits one chiplet, twice")
{
    const Connectome c = ingest_connectome(std::filesystem::path(WAFERSIM_DATA_DIR) / "zebrafish.conn");
    const RegionMapping one = map_connectome(c, default_config());
    CHECK(one.chiplets.size() == 1);

    Connectome twice = c;
    const std::size_t n = c.size();
    twice.regions.insert(twice.regions.end(), c.regions.begin(), c.regions.end());
    twice.weights = Matrix(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i)
    {
        for (std::size_t j = 0; j < n; ++j)
        {
            twice.weights.at(i, j) = c.weights.at(i, j);
            twice.weights.at(n + i, n + j) = c.weights.at(i, j);
        }
    }
    twice.total_synapses = 2 * c.total_synapses;
    const RegionMapping two = map_connectome(twice, default_config());
    REQUIRE(two.chiplets.size() == 1);
    CHECK(two.chiplet_neurons[0] == 140'000);
    CHECK(two.chiplet_neurons[0] <= 2'350'000);
    CHECK(two.chiplet_synapses[0] <= 100'000'000);
}

TEST_CASE("mouse-scale descriptor needs at least five chiplets at full utilization")
{
    const Connectome c = ingest_connectome(std::filesystem::path(WAFERSIM_DATA_DIR) / "mouse.conn");
    MappingOptions full;
    full.utilization = 1.0;
    const RegionMapping m = map_connectome(c, default_config(), full);
    CHECK(m.chiplets.size() >= 5);
    for (std::size_t k = 0; k < m.chiplets.size(); ++k)
    {
        CHECK(m.chiplet_neurons[k] <= 2'350'000);
        CHECK(m.chiplet_synapses[k] <= 100'000'000);
    }
    // Lower utilization spreads the same brain over more chiplets.
    CHECK(map_connectome(c, default_config()).chiplets.size() > m.chiplets.size());
}

TEST_CASE("random placements are valid and refinement never hurts")
{
    for (std::uint64_t seed = 1; seed <= 25; ++seed)
    {
        const Network net = labeled_random(seed, 8, 120, 3000);
        const WaferConfig cfg = small_chiplets(150, 900);
        MappingOptions options;
        const NetworkMapping m = map_network(net, cfg, options);
        CHECK(check_placement(net, m.placement, cfg, options.utilization).empty());

        std::set<std::pair<ChipletCoord, NeuronIndex>> slots;
        for (std::uint32_t g = 0; g < net.size(); ++g)
        {
            CHECK(slots.insert({m.placement.chiplet_of[g], m.placement.local_of[g]}).second);
        }
        for (std::size_t c = 0; c < m.placement.chiplet_neurons.size(); ++c)
        {
            const auto members = m.placement.members()[c];
            for (std::size_t k = 0; k < members.size(); ++k)
            {
                CHECK(m.placement.local_of[members[k]] == k);
            }
        }
        CHECK(m.regions.cut_after_refinement <= m.regions.cut_before_refinement);
        CHECK(static_cast<double>(inter_chiplet_synapses(net, m.placement)) ==
                m.regions.cut_after_refinement);

        options.refine_passes = 0;
        const NetworkMapping raw = map_network(net, cfg, options);
        CHECK(static_cast<double>(inter_chiplet_synapses(net, raw.placement)) ==
                m.regions.cut_before_refinement);
    }
}

TEST_CASE("mapping is deterministic")
{
    const Network net = labeled_random(77, 10, 90, 2000);
    const WaferConfig cfg = small_chiplets(100, 800);
    CHECK(map_network(net, cfg).placement == map_network(net, cfg).placement);
}

TEST_CASE("oversized regions are split into contiguous fragments")
{
    NetworkBuilder b;
    b.add_neurons(250);
    b.add_region("big", 0, 250);
    const Network net = b.build();
    MappingOptions full;
    full.utilization = 1.0;
    const NetworkMapping m = map_network(net, small_chiplets(100, 1000), full);
    REQUIRE(m.regions.fragments.size() == 3);
    CHECK(m.regions.fragments[0].begin == 0);
    CHECK(m.regions.fragments[0].end == 100);
    CHECK(m.regions.fragments[2].end == 250);
    CHECK(m.placement.occupied_chiplets() == 3);
}

TEST_CASE("too large for the wafer is infeasible")
{
    NetworkBuilder b;
    b.add_neurons(1000);
    const Network net = b.build();
    WaferConfig cfg = small_chiplets(10, 100);
    cfg.grid_width = 4;
    cfg.grid_height = 4;
    cfg.sync_domains = default_sync_domains(4, 4);
    CHECK_THROWS_AS(map_network(net, cfg), InfeasibleError);

    NetworkBuilder hub;
    hub.add_neurons(2);
    for (int k = 0; k < 200; ++k)
    {
        hub.add_synapse(0, 1, 1);
    }
    CHECK_THROWS_AS(map_network(hub.build(), small_chiplets(10, 100)), InfeasibleError);
    MappingOptions bad;
    bad.utilization = 0.0;
    CHECK_THROWS_AS(map_network(net, default_config(), bad), ValidationError);
}

TEST_CASE("reconstructed connectivity counts realised synapses")
{
    NetworkBuilder b;
    b.add_neurons(4);
    b.add_region("a", 0, 2);
    b.add_region("b", 2, 4);
    b.add_synapse(0, 2, 1);
    b.add_synapse(1, 3, 1);
    b.add_synapse(0, 3, 1);
    b.add_synapse(2, 1, 1);
    const Matrix w = reconstruct_connectivity(b.build());
    CHECK(w.values == std::vector<double>{0.0, 0.75, 0.25, 0.0});
}

TEST_CASE("reconstruction errors")
{
    NetworkBuilder empty;
    empty.add_neurons(2);
    empty.add_region("a", 0, 2);
    CHECK_THROWS_AS(reconstruct_connectivity(empty.build()), DegenerateError);
    NetworkBuilder unlabeled;
    unlabeled.add_neurons(2);
    unlabeled.add_synapse(0, 1, 1);
    CHECK_THROWS_AS(reconstruct_connectivity(unlabeled.build()), ValidationError);
}
