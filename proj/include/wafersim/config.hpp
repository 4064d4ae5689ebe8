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

// config.hpp - static description of the simulated wafer.
//
// The config file is YAML. Every key is optional; omitted keys take the
// defaults below. A minimal file overriding only the grid:
//
//   grid: {width: 2, height: 1}
//   sync_domains:
//     - {id: 0, global_master: true, members: [[0, 0], [1, 0]]}
//
// When sync_domains is omitted the grid is split into (up to) four
// quadrant domains, domain 0 holding the global master.
#ifndef WAFERSIM_CONFIG_HPP_
#define WAFERSIM_CONFIG_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "wafersim/types.hpp"

namespace wafersim
{

struct SyncDomain
{
    std::uint32_t id{0};
    std::vector<ChipletCoord> members;
    bool global_master{false};

    bool operator==(const SyncDomain &) const = default;
};

struct StepPolicy
{
    std::uint64_t initial_budget{10'000};
    double smoothing{0.5};
    std::uint64_t min_budget{1'000};
    std::uint64_t max_budget{10'000'000};

    bool operator==(const StepPolicy &) const = default;
};

struct WaferConfig
{
    std::uint32_t grid_width{8};
    std::uint32_t grid_height{8};
    std::uint64_t neuron_capacity_per_chiplet{2'350'000};
    std::uint64_t synapse_capacity_per_chiplet{100'000'000};
    double clock_hz{333e6};
    // 1 TSOPS per chiplet at 333 MHz.
    std::uint64_t sops_per_cycle_per_chiplet{3003};
    // Neuron-update lanes per chiplet for the compute-time model.
    std::uint64_t parallelism{1024};
    std::uint64_t link_phase_cycles{1};
    std::uint32_t link_fifo_depth{4};
    std::uint32_t relay_threshold_hops{4};
    // Relaying fires when the preferred output holds more than this many
    // events.
    std::uint32_t relay_occupancy_trigger{2};
    std::vector<SyncDomain> sync_domains;
    double energy_per_sop_pj{4.9};
    double static_power_w{0.0};
    StepPolicy step_policy;

    bool operator==(const WaferConfig &) const = default;

    [[nodiscard]] std::size_t chiplet_count() const noexcept
    {
        return static_cast<std::size_t>(grid_width) * grid_height;
    }
    [[nodiscard]] bool contains(const ChipletCoord &c) const noexcept
    {
        return c.x < grid_width && c.y < grid_height;
    }
    [[nodiscard]] std::uint64_t total_neuron_capacity() const noexcept
    {
        return neuron_capacity_per_chiplet * chiplet_count();
    }
    [[nodiscard]] std::uint64_t total_synapse_capacity() const noexcept
    {
        return synapse_capacity_per_chiplet * chiplet_count();
    }
};

// Quadrant partition of a grid; domain 0 is the global master.
std::vector<SyncDomain> default_sync_domains(
        std::uint32_t grid_width, std::uint32_t grid_height);

WaferConfig default_config();

// Each entry names the offending field and the rule it breaks.
std::vector<std::string> validate_config(const WaferConfig &cfg);

WaferConfig parse_config(const std::string &text,
        const std::string &source_name = "<config>");
// Throws ParseError on malformed text and ValidationError (listing every
// violation) when the result fails validate_config.
WaferConfig load_config(const std::filesystem::path &path);

std::string format_config(const WaferConfig &cfg);
void save_config(const WaferConfig &cfg, const std::filesystem::path &path);

} // namespace wafersim

#endif
