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

// Random scenario generation shared by the unit, acceptance and benchmark
// targets.
#ifndef WAFERSIM_TESTS_SUPPORT_HPP_
#define WAFERSIM_TESTS_SUPPORT_HPP_

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wafersim/config.hpp"
#include "wafersim/network.hpp"
#include "wafersim/rng.hpp"

namespace wafersim::testing
{

struct Scenario
{
    WaferConfig cfg;
    Network network;
    Stimulus stimulus;
    StepIndex steps{0};
};

struct ScenarioLimits
{
    std::uint32_t max_neurons{5000};
    std::uint64_t max_synapses{50000};
    std::uint32_t max_chiplets{16};
    std::uint32_t max_grid{8};
    StepIndex steps{100};
};

inline NeuronParams random_params(Rng &rng)
{
    NeuronParams p;
    p.threshold = static_cast<Potential>(rng.between(20, 200));
    p.reset = static_cast<Potential>(rng.between(-20, 10));
    p.leak_den = static_cast<std::uint32_t>(rng.between(1, 32));
    p.leak_num = static_cast<std::uint32_t>(rng.between(0, p.leak_den));
    p.refractory_period = static_cast<std::uint32_t>(rng.between(0, 3));
    p.v_init = static_cast<Potential>(rng.between(-50, 50));
    return p;
}

// Random network on a random grid, neurons scattered over at most
// max_chiplets chiplets, with a random stimulus.
inline Scenario random_scenario(std::uint64_t seed, const ScenarioLimits &limits = {})
{
    Rng rng(seed);
    Scenario s;
    s.steps = limits.steps;
    s.cfg = default_config();
    s.cfg.grid_width = static_cast<std::uint32_t>(rng.between(1, limits.max_grid));
    s.cfg.grid_height = static_cast<std::uint32_t>(rng.between(1, limits.max_grid));
    s.cfg.sync_domains = default_sync_domains(s.cfg.grid_width, s.cfg.grid_height);

    const auto n = static_cast<std::uint32_t>(rng.between(1, limits.max_neurons));
    const auto synapses = static_cast<std::uint64_t>(
            rng.between(0, static_cast<std::int64_t>(limits.max_synapses)));
    NetworkBuilder builder;
    builder.add_neurons(n);
    for (std::uint32_t i = 0; i < n; ++i)
    {
        if (rng.below(5) == 0)
        {
            builder.set_params(i, random_params(rng));
        }
    }
    builder.reserve_synapses(synapses);
    for (std::uint64_t k = 0; k < synapses; ++k)
    {
        const auto src = static_cast<std::uint32_t>(rng.below(n));
        const auto dst = static_cast<std::uint32_t>(rng.below(n));
        builder.add_synapse(src, dst, static_cast<Weight>(rng.between(-30, 60)));
    }
    s.network = builder.build();

    std::vector<ChipletCoord> all;
    for (std::uint32_t y = 0; y < s.cfg.grid_height; ++y)
    {
        for (std::uint32_t x = 0; x < s.cfg.grid_width; ++x)
        {
            all.push_back({x, y});
        }
    }
    const std::size_t k = static_cast<std::size_t>(
            rng.between(1, std::min<std::int64_t>(limits.max_chiplets, all.size())));
    for (std::size_t i = 0; i < k; ++i)
    {
        std::swap(all[i], all[i + rng.below(all.size() - i)]);
    }
    all.resize(k);
    std::vector<ChipletCoord> chiplet_of(n);
    std::vector<NeuronIndex> local_of(n);
    std::vector<NeuronIndex> next_local(k, 0);
    for (std::uint32_t g = 0; g < n; ++g)
    {
        const std::size_t c = rng.below(k);
        chiplet_of[g] = all[c];
        local_of[g] = next_local[c]++;
    }
    s.network.placement = make_placement(s.network, s.cfg.grid_width, s.cfg.grid_height,
            std::move(chiplet_of), std::move(local_of));

    const auto entries = static_cast<std::size_t>(rng.between(0, std::min<std::int64_t>(2 * n, 4000)));
    for (std::size_t e = 0; e < entries && s.steps > 0; ++e)
    {
        const auto g = static_cast<std::uint32_t>(rng.below(n));
        s.stimulus.push_back({rng.below(s.steps), s.network.placement->chiplet_of[g],
                s.network.placement->local_of[g], static_cast<std::int32_t>(rng.between(40, 300))});
    }
    std::sort(s.stimulus.begin(), s.stimulus.end());
    return s;
}

inline std::filesystem::path scratch_dir(const std::string &name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("wafersim_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace wafersim::testing

#endif
