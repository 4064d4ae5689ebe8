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

// network.hpp - concrete spiking networks, their chiplet placement and
// the external stimulus applied to them.
//
// Network file (text, '#' starts a comment):
//
//   wafersim-network 1
//   neurons <count>
//   defaults threshold=100 reset=0 leak=15/16 refractory=0 v0=0
//   region <name> <first> <end>          neurons [first, end)
//   param <neuron> threshold=... ...     per-neuron override
//   place <first> <end> <x> <y>          neurons [first, end) on chiplet (x, y);
//                                        local indices continue per chiplet
//   syn <src> <dst_x> <dst_y> <dst_local> <weight>    placed synapse
//   edge <src> <dst> <weight>            synapse of an unplaced network
//
// A file uses either syn lines (requires place lines) or edge lines.
#ifndef WAFERSIM_NETWORK_HPP_
#define WAFERSIM_NETWORK_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wafersim/config.hpp"
#include "wafersim/neuron.hpp"
#include "wafersim/types.hpp"

namespace wafersim
{

struct Placement
{
    std::uint32_t grid_width{0};
    std::uint32_t grid_height{0};
    std::vector<ChipletCoord> chiplet_of;
    std::vector<NeuronIndex> local_of;
    // Row-major per-chiplet tallies. Synapses are counted at their source.
    std::vector<std::uint64_t> chiplet_neurons;
    std::vector<std::uint64_t> chiplet_synapses;

    bool operator==(const Placement &) const = default;

    // Global neuron ids of each chiplet, ordered by local index.
    [[nodiscard]] std::vector<std::vector<std::uint32_t>> members() const;
    [[nodiscard]] std::size_t occupied_chiplets() const;
};

struct Network
{
    NeuronParams defaults;
    std::vector<NeuronParams> params;
    std::vector<std::string> region_names;
    // Region label per neuron; empty when the network is unlabeled.
    std::vector<std::uint32_t> region_of;
    // Outgoing synapses of neuron n: [offsets[n], offsets[n+1]).
    std::vector<std::uint64_t> offsets{0};
    std::vector<std::uint32_t> targets;
    std::vector<Weight> weights;
    std::optional<Placement> placement;

    bool operator==(const Network &) const = default;

    [[nodiscard]] std::size_t size() const noexcept { return params.size(); }
    [[nodiscard]] std::uint64_t synapse_count() const noexcept { return targets.size(); }
    [[nodiscard]] std::uint64_t out_degree(std::uint32_t n) const
    {
        return offsets[n + 1] - offsets[n];
    }

    // Structural problems (CSR shape, bad ids, bad parameters).
    [[nodiscard]] std::vector<std::string> check() const;
};

// Collects synapses in any order and emits CSR with per-source insertion
// order preserved.
class NetworkBuilder
{
public:
    explicit NetworkBuilder(NeuronParams defaults = {});

    std::uint32_t add_neurons(std::uint32_t count);
    std::uint32_t add_neurons(std::uint32_t count, const NeuronParams &params);
    void set_params(std::uint32_t neuron, const NeuronParams &params);
    std::uint32_t add_region(const std::string &name, std::uint32_t first, std::uint32_t end);
    void add_synapse(std::uint32_t src, std::uint32_t dst, Weight weight);
    void reserve_synapses(std::size_t count) { edges_.reserve(count); }

    [[nodiscard]] Network build() const;

private:
    struct Edge
    {
        std::uint32_t src;
        std::uint32_t dst;
        Weight weight;
    };
    NeuronParams defaults_;
    std::vector<NeuronParams> params_;
    std::vector<std::string> region_names_;
    std::vector<std::uint32_t> region_of_;
    std::vector<Edge> edges_;
};

// Recomputes tallies from chiplet_of/local_of.
Placement make_placement(const Network &network, std::uint32_t grid_width,
        std::uint32_t grid_height, std::vector<ChipletCoord> chiplet_of,
        std::vector<NeuronIndex> local_of);

// Violations of the placement contract against `cfg` scaled by
// `utilization` (1.0 = raw capacity).
std::vector<std::string> check_placement(const Network &network,
        const Placement &placement, const WaferConfig &cfg, double utilization = 1.0);

std::string format_network(const Network &network);
Network parse_network(const std::string &text, const std::string &source_name = "<network>");
Network load_network(const std::filesystem::path &path);
void save_network(const Network &network, const std::filesystem::path &path);

// Placement table: one "neuron x y local" line per neuron.
std::string format_placement(const Placement &placement);

struct StimulusEntry
{
    StepIndex step{0};
    ChipletCoord chiplet;
    NeuronIndex neuron{0};
    std::int32_t weight{0};

    auto operator<=>(const StimulusEntry &) const = default;
};
using Stimulus = std::vector<StimulusEntry>;

// Stimulus file: one "step x y neuron weight" line per input.
Stimulus parse_stimulus(const std::string &text, const std::string &source_name = "<stimulus>");
Stimulus load_stimulus(const std::filesystem::path &path);
std::string format_stimulus(const Stimulus &stimulus);

// Shared helper for the text formats: whole file into a string, throwing
// ValidationError naming the path when it cannot be read.
std::string read_text_file(const std::filesystem::path &path, const char *what);
void write_text_file(const std::filesystem::path &path, const std::string &text);

} // namespace wafersim

#endif
