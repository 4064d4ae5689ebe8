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

#include "wafersim/mapper.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "wafersim/error.hpp"

namespace wafersim
{

std::vector<ChipletCoord> serpentine_order(std::uint32_t width, std::uint32_t height)
{
    std::vector<ChipletCoord> order;
    order.reserve(static_cast<std::size_t>(width) * height);
    for (std::uint32_t y = 0; y < height; ++y)
    {
        for (std::uint32_t i = 0; i < width; ++i)
        {
            const std::uint32_t x = (y % 2 == 0) ? i : width - 1 - i;
            order.push_back({x, y});
        }
    }
    return order;
}

namespace
{

struct RegionLoad
{
    std::uint64_t neurons{0};
    // Out-synapses of the first k neurons of the region.
    std::function<std::uint64_t(std::uint64_t)> prefix;
};

struct Capacity
{
    std::uint64_t neurons;
    std::uint64_t synapses;
};

Capacity effective_capacity(const WaferConfig &cfg, double utilization)
{
    if (!(utilization > 0.0 && utilization <= 1.0))
    {
        throw ValidationError("target utilization must lie in (0, 1]");
    }
    const Capacity cap{static_cast<std::uint64_t>(std::floor(
                               static_cast<double>(cfg.neuron_capacity_per_chiplet) * utilization)),
            static_cast<std::uint64_t>(std::floor(
                    static_cast<double>(cfg.synapse_capacity_per_chiplet) * utilization))};
    if (cap.neurons == 0 || cap.synapses == 0)
    {
        throw InfeasibleError("effective chiplet capacity is zero at this utilization");
    }
    return cap;
}

std::vector<Fragment> pack(const std::vector<RegionLoad> &loads, const Capacity &cap,
        std::size_t chiplet_limit)
{
    std::vector<std::uint32_t> order(loads.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&loads](std::uint32_t a, std::uint32_t b) {
        return loads[a].neurons > loads[b].neurons;
    });

    std::vector<Capacity> bins;
    std::vector<Fragment> fragments;
    auto place = [&](Fragment f) {
        std::size_t bin = 0;
        while (bin < bins.size() &&
                (bins[bin].neurons + f.neurons() > cap.neurons ||
                        bins[bin].synapses + f.synapses > cap.synapses))
        {
            ++bin;
        }
        if (bin == bins.size())
        {
            if (bins.size() == chiplet_limit)
            {
                throw InfeasibleError("network needs more than the " +
                        std::to_string(chiplet_limit) + " chiplets on the wafer at this utilization");
            }
            bins.push_back({0, 0});
        }
        bins[bin].neurons += f.neurons();
        bins[bin].synapses += f.synapses;
        f.chiplet = bin;
        fragments.push_back(f);
    };

    for (const std::uint32_t r : order)
    {
        const RegionLoad &load = loads[r];
        const std::uint64_t total_syn = load.prefix(load.neurons);
        if (load.neurons <= cap.neurons && total_syn <= cap.synapses)
        {
            place(Fragment{r, 0, load.neurons, total_syn, 0});
            continue;
        }
        std::uint64_t begin = 0;
        while (begin < load.neurons)
        {
            const std::uint64_t base = load.prefix(begin);
            // Largest k whose synapses still fit one chiplet.
            std::uint64_t lo = 0;
            std::uint64_t hi = std::min(cap.neurons, load.neurons - begin);
            while (lo < hi)
            {
                const std::uint64_t mid = lo + (hi - lo + 1) / 2;
                if (load.prefix(begin + mid) - base <= cap.synapses)
                {
                    lo = mid;
                }
                else
                {
                    hi = mid - 1;
                }
            }
            if (lo == 0)
            {
                throw InfeasibleError("a single neuron exceeds the per-chiplet synapse capacity");
            }
            place(Fragment{r, begin, begin + lo, load.prefix(begin + lo) - base, 0});
            begin += lo;
        }
    }
    return fragments;
}

double cut_of(const std::vector<Fragment> &fragments, const std::vector<double> &sym)
{
    const std::size_t f = fragments.size();
    double cut = 0.0;
    for (std::size_t a = 0; a < f; ++a)
    {
        for (std::size_t b = a + 1; b < f; ++b)
        {
            if (fragments[a].chiplet != fragments[b].chiplet)
            {
                cut += sym[a * f + b];
            }
        }
    }
    return cut;
}

// Change in cut when fragment `which` moves to chiplet `to`.
double move_delta(const std::vector<Fragment> &fragments, const std::vector<double> &sym,
        std::size_t which, std::size_t to)
{
    const std::size_t f = fragments.size();
    const std::size_t from = fragments[which].chiplet;
    double delta = 0.0;
    for (std::size_t h = 0; h < f; ++h)
    {
        if (h == which)
        {
            continue;
        }
        const double w = sym[which * f + h];
        const std::size_t at = fragments[h].chiplet;
        delta += w * (static_cast<double>(at != to) - static_cast<double>(at != from));
    }
    return delta;
}

// Greedy move/swap descent. Only strictly improving steps are applied, so
// the cut never increases.
void refine(std::vector<Fragment> &fragments, const std::vector<double> &cut_counts,
        const Capacity &cap, std::size_t passes)
{
    const std::size_t f = fragments.size();
    std::vector<double> sym(f * f, 0.0);
    for (std::size_t a = 0; a < f; ++a)
    {
        for (std::size_t b = 0; b < f; ++b)
        {
            if (a != b)
            {
                sym[a * f + b] = cut_counts[a * f + b] + cut_counts[b * f + a];
            }
        }
    }
    std::size_t bins = 0;
    for (const Fragment &fr : fragments)
    {
        bins = std::max(bins, fr.chiplet + 1);
    }
    std::vector<Capacity> load(bins, {0, 0});
    for (const Fragment &fr : fragments)
    {
        load[fr.chiplet].neurons += fr.neurons();
        load[fr.chiplet].synapses += fr.synapses;
    }
    auto fits = [&](std::size_t bin, std::int64_t dn, std::int64_t ds) {
        return static_cast<std::int64_t>(load[bin].neurons) + dn <=
                static_cast<std::int64_t>(cap.neurons) &&
                static_cast<std::int64_t>(load[bin].synapses) + ds <=
                static_cast<std::int64_t>(cap.synapses);
    };
    auto relocate = [&](std::size_t which, std::size_t to) {
        Fragment &fr = fragments[which];
        load[fr.chiplet].neurons -= fr.neurons();
        load[fr.chiplet].synapses -= fr.synapses;
        fr.chiplet = to;
        load[to].neurons += fr.neurons();
        load[to].synapses += fr.synapses;
    };
    constexpr double eps = 1e-9;

    for (std::size_t pass = 0; pass < passes; ++pass)
    {
        bool improved = false;
        for (std::size_t a = 0; a < f; ++a)
        {
            for (std::size_t to = 0; to < bins; ++to)
            {
                const Fragment &fr = fragments[a];
                if (to == fr.chiplet ||
                        !fits(to, static_cast<std::int64_t>(fr.neurons()),
                                static_cast<std::int64_t>(fr.synapses)))
                {
                    continue;
                }
                if (move_delta(fragments, sym, a, to) < -eps)
                {
                    relocate(a, to);
                    improved = true;
                }
            }
        }
        for (std::size_t a = 0; a < f; ++a)
        {
            for (std::size_t b = a + 1; b < f; ++b)
            {
                const std::size_t ca = fragments[a].chiplet;
                const std::size_t cb = fragments[b].chiplet;
                if (ca == cb)
                {
                    continue;
                }
                const auto dn = static_cast<std::int64_t>(fragments[b].neurons()) -
                        static_cast<std::int64_t>(fragments[a].neurons());
                const auto ds = static_cast<std::int64_t>(fragments[b].synapses) -
                        static_cast<std::int64_t>(fragments[a].synapses);
                if (!fits(ca, dn, ds) || !fits(cb, -dn, -ds))
                {
                    continue;
                }
                const double first = move_delta(fragments, sym, a, cb);
                fragments[a].chiplet = cb;
                const double second = move_delta(fragments, sym, b, ca);
                fragments[a].chiplet = ca;
                if (first + second < -eps)
                {
                    relocate(a, cb);
                    relocate(b, ca);
                    improved = true;
                }
            }
        }
        if (!improved)
        {
            break;
        }
    }
}

RegionMapping finish(std::vector<Fragment> fragments, const std::vector<double> &cut_counts,
        const Capacity &cap, const WaferConfig &cfg, const MappingOptions &options)
{
    const std::size_t f = fragments.size();
    std::vector<double> sym(f * f, 0.0);
    for (std::size_t a = 0; a < f; ++a)
    {
        for (std::size_t b = 0; b < f; ++b)
        {
            if (a != b)
            {
                sym[a * f + b] = cut_counts[a * f + b] + cut_counts[b * f + a];
            }
        }
    }
    RegionMapping mapping;
    mapping.cut_before_refinement = cut_of(fragments, sym);
    refine(fragments, cut_counts, cap, options.refine_passes);
    mapping.cut_after_refinement = cut_of(fragments, sym);

    // Drop chiplets emptied by refinement, keeping their order.
    std::size_t bins = 0;
    for (const Fragment &fr : fragments)
    {
        bins = std::max(bins, fr.chiplet + 1);
    }
    std::vector<std::size_t> renumber(bins, SIZE_MAX);
    for (const Fragment &fr : fragments)
    {
        renumber[fr.chiplet] = 0;
    }
    std::size_t used = 0;
    for (auto &slot : renumber)
    {
        if (slot == 0)
        {
            slot = used++;
        }
    }
    const auto order = serpentine_order(cfg.grid_width, cfg.grid_height);
    mapping.chiplets.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(used));
    mapping.chiplet_neurons.assign(used, 0);
    mapping.chiplet_synapses.assign(used, 0);
    for (Fragment &fr : fragments)
    {
        fr.chiplet = renumber[fr.chiplet];
        mapping.chiplet_neurons[fr.chiplet] += fr.neurons();
        mapping.chiplet_synapses[fr.chiplet] += fr.synapses;
    }
    mapping.fragments = std::move(fragments);
    return mapping;
}

} // namespace

NetworkMapping map_network(const Network &network, const WaferConfig &cfg,
        const MappingOptions &options)
{
    if (const auto problems = network.check(); !problems.empty())
    {
        throw ValidationError("invalid network: " + problems.front());
    }
    const Capacity cap = effective_capacity(cfg, options.utilization);
    const std::size_t n = network.size();
    const std::size_t region_count = network.region_of.empty() ? 1 : network.region_names.size();

    std::vector<std::vector<std::uint32_t>> members(region_count);
    for (std::uint32_t g = 0; g < n; ++g)
    {
        members[network.region_of.empty() ? 0 : network.region_of[g]].push_back(g);
    }
    std::vector<std::vector<std::uint64_t>> prefix(region_count);
    std::vector<RegionLoad> loads;
    for (std::size_t r = 0; r < region_count; ++r)
    {
        auto &p = prefix[r];
        p.assign(members[r].size() + 1, 0);
        for (std::size_t k = 0; k < members[r].size(); ++k)
        {
            p[k + 1] = p[k] + network.out_degree(members[r][k]);
        }
        loads.push_back({members[r].size(), [&p](std::uint64_t k) { return p[k]; }});
    }
    // Empty regions occupy nothing.
    std::vector<RegionLoad> nonempty;
    std::vector<std::uint32_t> region_id;
    for (std::size_t r = 0; r < region_count; ++r)
    {
        if (loads[r].neurons > 0)
        {
            nonempty.push_back(loads[r]);
            region_id.push_back(static_cast<std::uint32_t>(r));
        }
    }

    std::vector<Fragment> fragments = pack(nonempty, cap, cfg.chiplet_count());
    for (Fragment &fr : fragments)
    {
        fr.region = region_id[fr.region];
    }

    std::vector<std::uint32_t> fragment_of(n, 0);
    for (std::size_t i = 0; i < fragments.size(); ++i)
    {
        const Fragment &fr = fragments[i];
        for (std::uint64_t k = fr.begin; k < fr.end; ++k)
        {
            fragment_of[members[fr.region][k]] = static_cast<std::uint32_t>(i);
        }
    }
    const std::size_t f = fragments.size();
    std::vector<double> cut_counts(f * f, 0.0);
    for (std::uint32_t src = 0; src < n; ++src)
    {
        const std::size_t row = static_cast<std::size_t>(fragment_of[src]) * f;
        for (std::uint64_t s = network.offsets[src]; s < network.offsets[src + 1]; ++s)
        {
            cut_counts[row + fragment_of[network.targets[s]]] += 1.0;
        }
    }

    NetworkMapping result;
    result.regions = finish(std::move(fragments), cut_counts, cap, cfg, options);

    std::vector<std::vector<std::uint32_t>> on_chiplet(result.regions.chiplets.size());
    for (const Fragment &fr : result.regions.fragments)
    {
        auto &list = on_chiplet[fr.chiplet];
        list.insert(list.end(), members[fr.region].begin() + static_cast<std::ptrdiff_t>(fr.begin),
                members[fr.region].begin() + static_cast<std::ptrdiff_t>(fr.end));
    }
    std::vector<ChipletCoord> chiplet_of(n);
    std::vector<NeuronIndex> local_of(n);
    for (std::size_t c = 0; c < on_chiplet.size(); ++c)
    {
        auto &list = on_chiplet[c];
        std::sort(list.begin(), list.end());
        for (std::size_t k = 0; k < list.size(); ++k)
        {
            chiplet_of[list[k]] = result.regions.chiplets[c];
            local_of[list[k]] = static_cast<NeuronIndex>(k);
        }
    }
    result.placement = make_placement(
            network, cfg.grid_width, cfg.grid_height, std::move(chiplet_of), std::move(local_of));
    return result;
}

RegionMapping map_connectome(const Connectome &connectome, const WaferConfig &cfg,
        const MappingOptions &options)
{
    if (const auto problems = connectome.check(); !problems.empty())
    {
        throw ValidationError("invalid connectome: " + problems.front());
    }
    const Capacity cap = effective_capacity(cfg, options.utilization);
    const std::size_t n = connectome.size();
    const std::vector<std::uint64_t> counts = pair_synapse_counts(connectome);
    std::vector<std::uint64_t> out(n, 0);
    for (std::size_t i = 0; i < n; ++i)
    {
        for (std::size_t j = 0; j < n; ++j)
        {
            out[i] += counts[i * n + j];
        }
    }
    std::vector<RegionLoad> loads;
    for (std::size_t r = 0; r < n; ++r)
    {
        const std::uint64_t neurons = connectome.regions[r].neurons;
        const std::uint64_t syn = out[r];
        // floor(k * syn / neurons) without 64-bit overflow.
        loads.push_back({neurons, [neurons, syn](std::uint64_t k) {
                             return static_cast<std::uint64_t>(
                                     (static_cast<unsigned __int128>(k) * syn) / neurons);
                         }});
    }
    std::vector<Fragment> fragments = pack(loads, cap, cfg.chiplet_count());
    const std::size_t f = fragments.size();
    std::vector<double> cut_counts(f * f, 0.0);
    for (std::size_t a = 0; a < f; ++a)
    {
        const Fragment &fa = fragments[a];
        const double share_a = static_cast<double>(fa.neurons()) /
                static_cast<double>(connectome.regions[fa.region].neurons);
        for (std::size_t b = 0; b < f; ++b)
        {
            const Fragment &fb = fragments[b];
            const double share_b = static_cast<double>(fb.neurons()) /
                    static_cast<double>(connectome.regions[fb.region].neurons);
            cut_counts[a * f + b] = static_cast<double>(counts[fa.region * n + fb.region]) *
                    share_a * share_b;
        }
    }
    return finish(std::move(fragments), cut_counts, cap, cfg, options);
}

std::uint64_t inter_chiplet_synapses(const Network &network, const Placement &placement)
{
    std::uint64_t cut = 0;
    for (std::uint32_t src = 0; src < network.size(); ++src)
    {
        const ChipletCoord from = placement.chiplet_of[src];
        for (std::uint64_t s = network.offsets[src]; s < network.offsets[src + 1]; ++s)
        {
            cut += placement.chiplet_of[network.targets[s]] != from ? 1 : 0;
        }
    }
    return cut;
}

Matrix reconstruct_connectivity(const Network &network)
{
    if (network.region_of.empty() && network.size() > 0)
    {
        throw ValidationError("network has unlabeled neurons; regions are required");
    }
    const std::size_t r = network.region_names.size();
    Matrix m(r, r);
    std::uint64_t total = 0;
    for (std::uint32_t src = 0; src < network.size(); ++src)
    {
        const std::uint32_t from = network.region_of[src];
        for (std::uint64_t s = network.offsets[src]; s < network.offsets[src + 1]; ++s)
        {
            m.at(from, network.region_of[network.targets[s]]) += 1.0;
            ++total;
        }
    }
    if (total == 0)
    {
        throw DegenerateError("network has no synapses; connectivity cannot be normalised");
    }
    for (double &v : m.values)
    {
        v /= static_cast<double>(total);
    }
    return m;
}

} // namespace wafersim
