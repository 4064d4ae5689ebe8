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

#include "wafersim/kernel.hpp"

#include <algorithm>
#include <exception>
#include <sstream>

#include "wafersim/error.hpp"
#include "wafersim/neuron.hpp"
#include "wafersim/noc.hpp"

namespace wafersim
{

namespace
{

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) noexcept
{
    return a == 0 ? 0 : (a + b - 1) / b;
}

std::vector<CoreState> build_cores(const WaferConfig &cfg, const Network &network)
{
    const Placement &placement = *network.placement;
    const auto members = placement.members();
    std::vector<CoreState> cores;
    cores.reserve(cfg.chiplet_count());
    for (std::size_t idx = 0; idx < cfg.chiplet_count(); ++idx)
    {
        const auto &gids = members[idx];
        std::vector<NeuronState> states;
        states.reserve(gids.size());
        SynapseTable table;
        table.row_offsets.reserve(gids.size() + 1);
        std::uint64_t total = 0;
        for (const std::uint32_t g : gids)
        {
            states.push_back(NeuronState::from_params(network.params[g]));
            total += network.out_degree(g);
        }
        table.entries.reserve(total);
        for (const std::uint32_t g : gids)
        {
            for (std::uint64_t s = network.offsets[g]; s < network.offsets[g + 1]; ++s)
            {
                const std::uint32_t dst = network.targets[s];
                const ChipletCoord c = placement.chiplet_of[dst];
                table.entries.push_back(SynapseEntry{static_cast<std::uint8_t>(c.x),
                        static_cast<std::uint8_t>(c.y), network.weights[s],
                        placement.local_of[dst]});
            }
            table.row_offsets.push_back(table.entries.size());
        }
        cores.emplace_back(chiplet_at(idx, cfg.grid_width), std::move(states), std::move(table));
    }
    return cores;
}

} // namespace

Cycle compute_cycles(const WaferConfig &cfg, std::uint64_t neurons,
        std::uint64_t synaptic_work) noexcept
{
    return ceil_div(neurons, cfg.parallelism) +
            ceil_div(synaptic_work, cfg.sops_per_cycle_per_chiplet);
}

std::size_t count_barrier_violations(const std::vector<PhaseLogEntry> &log)
{
    // Highest step whose barrier has completed so far, plus one.
    StepIndex released = 0;
    std::size_t violations = 0;
    for (const PhaseLogEntry &e : log)
    {
        if (e.kind == PhaseLogEntry::Kind::barrier_complete)
        {
            released = std::max(released, e.step + 1);
        }
        else if (e.step > released)
        {
            ++violations;
        }
    }
    return violations;
}

RunResult run(const WaferConfig &cfg, const Network &network, const Stimulus &stimulus,
        StepIndex steps, std::uint64_t seed, const RunOptions &options)
{
    if (const auto violations = validate_config(cfg); !violations.empty())
    {
        throw ValidationError("invalid config: " + violations.front());
    }
    if (const auto problems = network.check(); !problems.empty())
    {
        throw ValidationError("invalid network: " + problems.front());
    }
    if (!network.placement)
    {
        throw ValidationError("network has no chiplet placement");
    }
    if (const auto problems = check_placement(network, *network.placement, cfg);
            !problems.empty())
    {
        throw InfeasibleError("placement violates capacity: " + problems.front());
    }

    const std::size_t chiplets = cfg.chiplet_count();
    std::vector<CoreState> cores = build_cores(cfg, network);

    std::vector<Stimulus> stimulus_by_step(steps);
    for (const StimulusEntry &s : stimulus)
    {
        if (!cfg.contains(s.chiplet))
        {
            std::ostringstream msg;
            msg << "stimulus at step " << s.step << " targets chiplet " << s.chiplet
                << " outside the grid";
            throw ValidationError(msg.str());
        }
        if (s.neuron >= cores[chiplet_index(s.chiplet, cfg.grid_width)].neurons.size())
        {
            std::ostringstream msg;
            msg << "stimulus at step " << s.step << " targets neuron " << s.neuron
                << " missing on chiplet " << s.chiplet;
            throw ValidationError(msg.str());
        }
        if (s.step < steps)
        {
            stimulus_by_step[s.step].push_back(s);
        }
    }

    std::vector<std::uint32_t> domain_of(chiplets, 0);
    std::vector<LocalController> locals;
    locals.reserve(cfg.sync_domains.size());
    for (std::size_t d = 0; d < cfg.sync_domains.size(); ++d)
    {
        const SyncDomain &domain = cfg.sync_domains[d];
        locals.emplace_back(domain.id, domain.members);
        for (const ChipletCoord &c : domain.members)
        {
            domain_of[chiplet_index(c, cfg.grid_width)] = static_cast<std::uint32_t>(d);
        }
    }
    GlobalController global(cfg.step_policy, locals.size());

    MeshParams mesh_params;
    mesh_params.width = cfg.grid_width;
    mesh_params.height = cfg.grid_height;
    mesh_params.phase_cycles = cfg.link_phase_cycles;
    mesh_params.fifo_depth = cfg.link_fifo_depth;
    mesh_params.relay = RelayRule{cfg.relay_threshold_hops, cfg.relay_occupancy_trigger};
    mesh_params.arbitration_seed = seed;
    Mesh mesh(mesh_params);
    EventQueue queue;

    RunResult result;
    SimReport &report = result.report;
    report.steps = steps;

    std::vector<std::vector<AerEvent>> outbox(chiplets);
    std::vector<std::vector<NeuronIndex>> fired(chiplets);
    std::vector<Cycle> busy(chiplets, 0);
    std::vector<std::exception_ptr> failures(chiplets);
    std::vector<Delivery> deliveries;
    const int workers = static_cast<int>(std::max(1u, options.workers));

    Cycle step_start = 0;
    for (StepIndex t = 0; t < steps; ++t)
    {
        const std::uint16_t tag = step_tag_of(t);
        for (const StimulusEntry &s : stimulus_by_step[t])
        {
            inject_input(cores[chiplet_index(s.chiplet, cfg.grid_width)], s.neuron, s.weight);
        }

        for (std::size_t i = 0; i < chiplets; ++i)
        {
            queue.push(step_start, EventKind::neuron_phase, static_cast<std::uint32_t>(i));
        }
        // All neuron phases of a step share one cycle and run as a batch.
        while (!queue.empty() && queue.top().kind == EventKind::neuron_phase)
        {
            const SimEvent e = queue.pop();
            if (options.debug)
            {
                result.phase_log.push_back({PhaseLogEntry::Kind::neuron_phase, t, e.target, e.cycle});
            }
        }

#pragma omp parallel for num_threads(workers) schedule(static)
        for (std::size_t i = 0; i < chiplets; ++i)
        {
            try
            {
                CoreState &core = cores[i];
                outbox[i].clear();
                fired[i] = step_neurons(core, t);
                std::size_t local = 0;
                for (const NeuronIndex n : fired[i])
                {
                    local += fanout(core, n, t, outbox[i]);
                }
                busy[i] = compute_cycles(cfg, core.neurons.size(), local + outbox[i].size());
            }
            catch (...)
            {
                failures[i] = std::current_exception();
            }
        }
        for (std::size_t i = 0; i < chiplets; ++i)
        {
            if (failures[i])
            {
                std::rethrow_exception(failures[i]);
            }
        }

        for (std::size_t i = 0; i < chiplets; ++i)
        {
            const ChipletCoord c = cores[i].coord;
            for (const NeuronIndex n : fired[i])
            {
                result.trace.push_back(SpikeRecord{t, c, n});
            }
            queue.push(step_start + busy[i], EventKind::controller_msg,
                    static_cast<std::uint32_t>(i));
        }

        Cycle now = step_start;
        Cycle max_busy = 0;
        while (!global.try_complete(locals))
        {
            if (queue.empty())
            {
                throw ProtocolError("step " + std::to_string(t) +
                        ": event queue drained before the barrier completed");
            }
            const SimEvent e = queue.pop();
            now = e.cycle;
            if (e.kind == EventKind::controller_msg)
            {
                const std::size_t i = e.target;
                const ChipletCoord c = cores[i].coord;
                LocalController &local = locals[domain_of[i]];
                for (const AerEvent &ev : outbox[i])
                {
                    mesh.inject(c, ev, now, queue);
                    global.track_event(+1);
                    local.note_injected();
                }
                report.events_injected += outbox[i].size();
                local.report_member_done(c, busy[i]);
                max_busy = std::max(max_busy, busy[i]);
                continue;
            }

            deliveries.clear();
            mesh.handle(e, queue, deliveries);
            for (const Delivery &d : deliveries)
            {
                const AerEvent &ev = d.packet.event;
                if (ev.step_tag != tag)
                {
                    ++report.barrier_violations;
                    throw ProtocolError("step " + std::to_string(t) +
                            ": delivered a packet tagged " + std::to_string(ev.step_tag));
                }
                const std::size_t idx = chiplet_index(d.at, cfg.grid_width);
                deliver_event(cores[idx], ev.dst_neuron, ev.weight);
                global.track_event(-1);
                locals[domain_of[idx]].note_delivered(now);
                ++report.events_delivered;
                if (options.record_packets)
                {
                    result.packets.push_back(PacketRecord{ev.step_tag, d.packet.source,
                            d.packet.destination, ev.hop_count, now - d.packet.injected_at,
                            ev.relayed});
                }
            }
        }

        if (options.debug)
        {
            report.quiescence_violations += mesh.count_tagged(tag);
            report.quiescence_violations += mesh.empty() ? 0 : 1;
            result.phase_log.push_back({PhaseLogEntry::Kind::barrier_complete, t, 0, now});
        }
        // Only stale router wake-ups can remain once nothing is in flight.
        while (!queue.empty())
        {
            if (queue.pop().kind != EventKind::router_wake)
            {
                throw ProtocolError("step " + std::to_string(t) +
                        ": work left in the event queue after the barrier");
            }
        }
        mesh.reset_wakes();

        const Cycle actual = now - step_start;
        std::vector<std::uint64_t> completion;
        completion.reserve(locals.size());
        for (const LocalController &local : locals)
        {
            Cycle done = local.max_compute_cycles();
            if (local.last_delivery() > step_start)
            {
                done = std::max(done, local.last_delivery() - step_start);
            }
            completion.push_back(done);
        }
        StepRecord record = global.advance_step(locals, actual, actual - std::min(actual, max_busy),
                std::move(completion));
        const Cycle length = std::max<Cycle>(record.budget, actual);
        step_start += length;
        report.step_records.push_back(std::move(record));
    }

    report.elapsed_cycles = step_start;
    report.events_relayed = mesh.relayed();
    report.chiplets.reserve(chiplets);
    const Placement &placement = *network.placement;
    for (std::size_t i = 0; i < chiplets; ++i)
    {
        const CoreState &core = cores[i];
        report.chiplets.push_back(ChipletStats{core.coord, core.neurons.size(),
                placement.chiplet_synapses[i], core.sops, core.spikes});
        report.total_sops += core.sops;
        report.total_spikes += core.spikes;
        report.saturation_count += core.saturations;
    }
    std::sort(result.trace.begin(), result.trace.end());
    return result;
}

} // namespace wafersim
