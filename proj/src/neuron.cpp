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

#include "wafersim/neuron.hpp"

#include <limits>
#include <string>

#include "wafersim/error.hpp"

namespace wafersim
{

std::vector<std::string> check_neuron_params(const NeuronParams &params)
{
    std::vector<std::string> problems;
    if (params.leak_den == 0)
    {
        problems.emplace_back("leak denominator must be > 0");
    }
    if (params.leak_num > params.leak_den)
    {
        problems.emplace_back("leak must lie in [0, 1] (num <= den)");
    }
    if (!(params.reset < params.threshold))
    {
        problems.emplace_back("reset must be below threshold");
    }
    return problems;
}

std::int64_t leak(Potential v, std::uint32_t num, std::uint32_t den) noexcept
{
    const std::int64_t product = static_cast<std::int64_t>(v) * num;
    const std::int64_t d = den;
    std::int64_t q = product / d;
    if ((product % d != 0) && (product < 0))
    {
        --q;
    }
    return q;
}

CoreState::CoreState(ChipletCoord c, std::vector<NeuronState> states, SynapseTable table)
        : coord(c)
        , neurons(std::move(states))
        , synapses(std::move(table))
        , accumulator(neurons.size(), 0)
{
}

std::vector<NeuronIndex> step_neurons(CoreState &core, StepIndex /*step*/)
{
    constexpr std::int64_t lo = std::numeric_limits<Potential>::min();
    constexpr std::int64_t hi = std::numeric_limits<Potential>::max();

    std::vector<NeuronIndex> fired;
    const std::size_t n = core.neurons.size();
    for (std::size_t i = 0; i < n; ++i)
    {
        NeuronState &s = core.neurons[i];
        const std::int64_t input = core.accumulator[i];
        core.accumulator[i] = 0;
        if (s.refractory_remaining > 0)
        {
            --s.refractory_remaining;
            continue;
        }
        std::int64_t v = leak(s.v_mem, s.leak_num, s.leak_den) + input;
        if (v < lo || v > hi)
        {
            v = v < lo ? lo : hi;
            ++core.saturations;
        }
        if (v >= s.v_threshold)
        {
            s.v_mem = s.v_reset;
            s.refractory_remaining = s.refractory_period;
            fired.push_back(static_cast<NeuronIndex>(i));
        }
        else
        {
            s.v_mem = static_cast<Potential>(v);
        }
    }
    core.spikes += fired.size();
    return fired;
}

void deliver_event(CoreState &core, NeuronIndex dst, std::int64_t weight)
{
    if (dst >= core.accumulator.size())
    {
        throw ProtocolError("routing integrity: neuron " + std::to_string(dst) +
                " delivered to chiplet (" + std::to_string(core.coord.x) + "," +
                std::to_string(core.coord.y) + ") which has " +
                std::to_string(core.accumulator.size()) + " neurons");
    }
    core.accumulator[dst] += weight;
    ++core.sops;
}

void inject_input(CoreState &core, NeuronIndex dst, std::int64_t weight)
{
    if (dst >= core.accumulator.size())
    {
        throw ValidationError("stimulus targets neuron " + std::to_string(dst) +
                " on chiplet (" + std::to_string(core.coord.x) + "," +
                std::to_string(core.coord.y) + ") which has " +
                std::to_string(core.accumulator.size()) + " neurons");
    }
    core.accumulator[dst] += weight;
}

std::size_t fanout(CoreState &core, NeuronIndex neuron, StepIndex step,
        std::vector<AerEvent> &outbound)
{
    std::size_t local = 0;
    const std::uint16_t tag = step_tag_of(step);
    for (const SynapseEntry &entry : core.synapses.row(neuron))
    {
        if (entry.dst_x == core.coord.x && entry.dst_y == core.coord.y)
        {
            deliver_event(core, entry.dst_neuron, entry.weight);
            ++local;
            continue;
        }
        AerEvent event;
        event.dx = static_cast<std::int32_t>(entry.dst_x) -
                static_cast<std::int32_t>(core.coord.x);
        event.dy = static_cast<std::int32_t>(entry.dst_y) -
                static_cast<std::int32_t>(core.coord.y);
        event.dst_neuron = entry.dst_neuron;
        event.weight = entry.weight;
        event.step_tag = tag;
        outbound.push_back(event);
    }
    return local;
}

} // namespace wafersim
