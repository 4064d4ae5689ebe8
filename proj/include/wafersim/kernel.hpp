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

// kernel.hpp - the time-stepped wafer simulation.
//
// Per step: apply stimulus, update neurons and fan out on every chiplet
// (in parallel, one chiplet per work item), inject remote spikes into the
// mesh as each chiplet finishes computing, then run the event queue until
// the sync barrier completes. Results never depend on the worker count.
#ifndef WAFERSIM_KERNEL_HPP_
#define WAFERSIM_KERNEL_HPP_

#include <cstdint>
#include <optional>
#include <vector>

#include "wafersim/config.hpp"
#include "wafersim/network.hpp"
#include "wafersim/sync.hpp"
#include "wafersim/types.hpp"

namespace wafersim
{

struct SpikeRecord
{
    StepIndex step{0};
    ChipletCoord chiplet;
    NeuronIndex neuron{0};

    auto operator<=>(const SpikeRecord &) const = default;
};
// Sorted lexicographically, duplicate-free.
using SpikeTrace = std::vector<SpikeRecord>;

struct ChipletStats
{
    ChipletCoord coord;
    std::uint64_t neurons{0};
    std::uint64_t synapses{0};
    std::uint64_t sops{0};
    std::uint64_t spikes{0};

    bool operator==(const ChipletStats &) const = default;
};

struct EnergyMetrics
{
    double dynamic_energy_j{0.0};
    double static_energy_j{0.0};
    double total_energy_j{0.0};
    double model_time_s{0.0};
    double throughput_sops{0.0};
    double average_power_w{0.0};
    double efficiency_sops_per_w{0.0};

    bool operator==(const EnergyMetrics &) const = default;
};

struct SimReport
{
    StepIndex steps{0};
    std::uint64_t total_sops{0};
    std::uint64_t total_spikes{0};
    std::uint64_t events_injected{0};
    std::uint64_t events_delivered{0};
    std::uint64_t events_relayed{0};
    Cycle elapsed_cycles{0};
    std::uint64_t saturation_count{0};
    std::vector<ChipletStats> chiplets;
    std::vector<StepRecord> step_records;
    // Filled by compute_metrics.
    std::optional<EnergyMetrics> metrics;
    // Debug-mode scans; always zero for a correct kernel.
    std::uint64_t barrier_violations{0};
    std::uint64_t quiescence_violations{0};

    bool operator==(const SimReport &) const = default;
};

struct PacketRecord
{
    std::uint16_t step_tag{0};
    ChipletCoord source;
    ChipletCoord destination;
    std::uint32_t hops{0};
    Cycle cycles_in_flight{0};
    bool relayed{false};

    bool operator==(const PacketRecord &) const = default;
};

struct PhaseLogEntry
{
    enum class Kind : std::uint8_t
    {
        neuron_phase,
        barrier_complete,
    };
    Kind kind{Kind::neuron_phase};
    StepIndex step{0};
    std::uint32_t chiplet{0};
    Cycle cycle{0};
};

struct RunOptions
{
    unsigned workers{1};
    // Exhaustive quiescence scan and phase log.
    bool debug{false};
    bool record_packets{false};
};

struct RunResult
{
    SimReport report;
    SpikeTrace trace;
    std::vector<PacketRecord> packets;
    std::vector<PhaseLogEntry> phase_log;
};

// Per-chiplet compute time of one step: neuron updates plus synaptic work.
[[nodiscard]] Cycle compute_cycles(const WaferConfig &cfg, std::uint64_t neurons,
        std::uint64_t synaptic_work) noexcept;

// The network must carry a placement that fits cfg. `seed` sets the
// router arbitration offsets; spike traces do not depend on it.
RunResult run(const WaferConfig &cfg, const Network &network, const Stimulus &stimulus,
        StepIndex steps, std::uint64_t seed, const RunOptions &options = {});

// Number of barrier-safety violations in a debug phase log: neuron phases
// of step t+1 that precede the barrier of step t.
std::size_t count_barrier_violations(const std::vector<PhaseLogEntry> &log);

} // namespace wafersim

#endif
