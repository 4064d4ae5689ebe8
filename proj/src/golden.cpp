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

#include "wafersim/golden.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "wafersim/error.hpp"

namespace wafersim
{

SpikeTrace golden_run(const Network &network, const Stimulus &stimulus, StepIndex steps)
{
    if (const auto problems = network.check(); !problems.empty())
    {
        throw ValidationError("invalid network: " + problems.front());
    }
    if (!network.placement)
    {
        throw ValidationError("network has no chiplet placement");
    }
    const Placement &placement = *network.placement;
    const std::size_t n = network.size();

    std::map<std::pair<ChipletCoord, NeuronIndex>, std::uint32_t> neuron_at;
    for (std::uint32_t g = 0; g < n; ++g)
    {
        neuron_at[{placement.chiplet_of[g], placement.local_of[g]}] = g;
    }
    std::vector<std::vector<std::pair<std::uint32_t, std::int64_t>>> inputs(steps);
    for (const StimulusEntry &s : stimulus)
    {
        const auto it = neuron_at.find({s.chiplet, s.neuron});
        if (it == neuron_at.end())
        {
            throw ValidationError("stimulus targets a neuron that is not placed");
        }
        if (s.step < steps)
        {
            inputs[s.step].emplace_back(it->second, s.weight);
        }
    }

    std::vector<std::int64_t> v(n);
    std::vector<std::uint32_t> refractory(n, 0);
    for (std::size_t g = 0; g < n; ++g)
    {
        v[g] = network.params[g].v_init;
    }
    std::vector<std::int64_t> input(n, 0);
    std::vector<std::uint32_t> fired;
    SpikeTrace trace;

    for (StepIndex t = 0; t < steps; ++t)
    {
        for (const auto &[g, w] : inputs[t])
        {
            input[g] += w;
        }
        fired.clear();
        for (std::uint32_t g = 0; g < n; ++g)
        {
            const NeuronParams &p = network.params[g];
            const std::int64_t in = input[g];
            input[g] = 0;
            if (refractory[g] > 0)
            {
                --refractory[g];
                continue;
            }
            // floor division of v * num by den
            const std::int64_t num = v[g] * p.leak_num;
            std::int64_t leaked = num / p.leak_den;
            if (num % p.leak_den != 0 && num < 0)
            {
                --leaked;
            }
            const std::int64_t next = std::clamp<std::int64_t>(leaked + in,
                    std::numeric_limits<Potential>::min(),
                    std::numeric_limits<Potential>::max());
            if (next >= p.threshold)
            {
                v[g] = p.reset;
                refractory[g] = p.refractory_period;
                fired.push_back(g);
            }
            else
            {
                v[g] = next;
            }
        }
        for (const std::uint32_t g : fired)
        {
            trace.push_back(SpikeRecord{t, placement.chiplet_of[g], placement.local_of[g]});
            for (std::uint64_t s = network.offsets[g]; s < network.offsets[g + 1]; ++s)
            {
                input[network.targets[s]] += network.weights[s];
            }
        }
    }
    std::sort(trace.begin(), trace.end());
    return trace;
}

} // namespace wafersim
