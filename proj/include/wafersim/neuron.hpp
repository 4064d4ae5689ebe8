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

// neuron.hpp - per-chiplet spiking core: LIF state, synapse table and the
// three primitive operations (update, deliver, fan out).
//
// Time-step convention: inputs delivered during step t are integrated by
// step_neurons at step t+1. External stimulus for step t is added just
// before step_neurons(t).
#ifndef WAFERSIM_NEURON_HPP_
#define WAFERSIM_NEURON_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wafersim/aer.hpp"
#include "wafersim/types.hpp"

namespace wafersim
{

struct NeuronParams
{
    Potential threshold{100};
    Potential reset{0};
    std::uint32_t leak_num{15};
    std::uint32_t leak_den{16};
    std::uint32_t refractory_period{0};
    Potential v_init{0};

    bool operator==(const NeuronParams &) const = default;
};

// Empty when the parameters are usable.
std::vector<std::string> check_neuron_params(const NeuronParams &params);

struct NeuronState
{
    Potential v_mem{0};
    Potential v_threshold{100};
    Potential v_reset{0};
    std::uint32_t leak_num{15};
    std::uint32_t leak_den{16};
    std::uint32_t refractory_remaining{0};
    std::uint32_t refractory_period{0};

    static NeuronState from_params(const NeuronParams &params) noexcept
    {
        return NeuronState{params.v_init, params.threshold, params.reset,
                params.leak_num, params.leak_den, 0, params.refractory_period};
    }
};

// floor(v * num / den), exact for negative v.
[[nodiscard]] std::int64_t leak(Potential v, std::uint32_t num, std::uint32_t den) noexcept;

struct SynapseEntry
{
    std::uint8_t dst_x{0};
    std::uint8_t dst_y{0};
    Weight weight{0};
    NeuronIndex dst_neuron{0};

    [[nodiscard]] ChipletCoord destination() const noexcept { return {dst_x, dst_y}; }
};
static_assert(sizeof(SynapseEntry) == 8);

// Compressed-row adjacency: row n spans entries[row_offsets[n], row_offsets[n+1]).
struct SynapseTable
{
    std::vector<std::uint64_t> row_offsets{0};
    std::vector<SynapseEntry> entries;

    [[nodiscard]] std::span<const SynapseEntry> row(NeuronIndex n) const
    {
        return {entries.data() + row_offsets[n],
                static_cast<std::size_t>(row_offsets[n + 1] - row_offsets[n])};
    }
    [[nodiscard]] std::size_t rows() const noexcept { return row_offsets.size() - 1; }
};

struct CoreState
{
    ChipletCoord coord;
    std::vector<NeuronState> neurons;
    SynapseTable synapses;
    // Pending input for the next neuron update.
    std::vector<std::int64_t> accumulator;
    std::uint64_t sops{0};
    std::uint64_t spikes{0};
    std::uint64_t saturations{0};

    CoreState() = default;
    CoreState(ChipletCoord c, std::vector<NeuronState> states, SynapseTable table);
};

// Updates every neuron, clears the accumulator and returns the indices that
// fired, ascending. Saturation at the Potential range is counted in
// core.saturations.
std::vector<NeuronIndex> step_neurons(CoreState &core, StepIndex step);

// One synaptic operation. Throws ProtocolError (routing integrity) when the
// index is not a neuron of this chiplet.
void deliver_event(CoreState &core, NeuronIndex dst, std::int64_t weight);

// External stimulus; does not count as a synaptic operation.
void inject_input(CoreState &core, NeuronIndex dst, std::int64_t weight);

// Local targets are delivered immediately; remote ones are appended to
// `outbound` as XY events tagged with `step`. Returns the number of local
// deliveries.
std::size_t fanout(CoreState &core, NeuronIndex neuron, StepIndex step,
        std::vector<AerEvent> &outbound);

} // namespace wafersim

#endif
