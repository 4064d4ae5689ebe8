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

// mapper.hpp - capacity-constrained placement of networks onto chiplets
// and realised-connectivity reconstruction.
//
// Packing is region-contiguous first fit: regions in descending size
// order go whole into the first chiplet with room, and a region larger
// than one chiplet's effective capacity (capacity x utilization) is cut
// into chiplet-sized fragments. A swap/move pass over fragments then
// lowers the number of synapses that cross chiplets. Chiplets are taken
// in serpentine row order so consecutive chiplets are mesh neighbours.
#ifndef WAFERSIM_MAPPER_HPP_
#define WAFERSIM_MAPPER_HPP_

#include <cstdint>
#include <vector>

#include "wafersim/config.hpp"
#include "wafersim/connectome.hpp"
#include "wafersim/network.hpp"

namespace wafersim
{

struct MappingOptions
{
    double utilization{0.8};
    // 0 disables the refinement pass.
    std::size_t refine_passes{16};
};

// A contiguous slice [begin, end) of one region's neurons.
struct Fragment
{
    std::uint32_t region{0};
    std::uint64_t begin{0};
    std::uint64_t end{0};
    std::uint64_t synapses{0};
    std::size_t chiplet{0};

    [[nodiscard]] std::uint64_t neurons() const noexcept { return end - begin; }
};

struct RegionMapping
{
    std::vector<Fragment> fragments;
    // Coordinates of the chiplets in use, indexed by Fragment::chiplet.
    std::vector<ChipletCoord> chiplets;
    std::vector<std::uint64_t> chiplet_neurons;
    std::vector<std::uint64_t> chiplet_synapses;
    // Synapses crossing chiplets before and after refinement.
    double cut_before_refinement{0.0};
    double cut_after_refinement{0.0};
};

struct NetworkMapping
{
    Placement placement;
    RegionMapping regions;
};

// Serpentine chiplet order for a grid.
std::vector<ChipletCoord> serpentine_order(std::uint32_t width, std::uint32_t height);

// Throws InfeasibleError when the network exceeds the wafer at the given
// utilization. Unlabeled networks are treated as a single region.
NetworkMapping map_network(const Network &network, const WaferConfig &cfg,
        const MappingOptions &options = {});

// Region-level mapping of a connectome without materialising synapses;
// per-neuron out-degree is spread evenly over each region.
RegionMapping map_connectome(const Connectome &connectome, const WaferConfig &cfg,
        const MappingOptions &options = {});

// Synapses whose endpoints sit on different chiplets.
std::uint64_t inter_chiplet_synapses(const Network &network, const Placement &placement);

// W'[i][j] = realised synapses from region i to region j over all synapses.
// Throws ValidationError for unlabeled networks and DegenerateError when
// there are no synapses.
Matrix reconstruct_connectivity(const Network &network);

} // namespace wafersim

#endif
