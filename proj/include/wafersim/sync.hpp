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

// sync.hpp - hierarchical time-step barrier.
//
// Each sync domain has a local controller that collects "done" reports
// from its member chiplets. The global controller tracks every packet in
// flight wafer-wide; once all locals are draining and nothing is in
// flight, the locals report and the master may advance the step and
// broadcast the next step budget.
#ifndef WAFERSIM_SYNC_HPP_
#define WAFERSIM_SYNC_HPP_

#include <algorithm>
#include <cstdint>
#include <vector>

#include "wafersim/config.hpp"
#include "wafersim/types.hpp"

namespace wafersim
{

enum class LocalPhase : std::uint8_t
{
    computing,
    draining,
    reported,
};

const char *phase_name(LocalPhase phase) noexcept;

class LocalController
{
public:
    LocalController(std::uint32_t domain_id, std::vector<ChipletCoord> members);

    // Throws ProtocolError for a foreign chiplet, a duplicate report or a
    // report outside the computing phase.
    void report_member_done(const ChipletCoord &chiplet, Cycle compute_cycles);

    void note_injected() noexcept { ++outstanding_; }
    void note_delivered(Cycle at) noexcept
    {
        --outstanding_;
        last_delivery_ = std::max(last_delivery_, at);
    }
    // draining -> reported; only the global controller calls this.
    void mark_reported();
    // reported -> computing for the next step.
    void begin_step();

    [[nodiscard]] std::uint32_t domain_id() const noexcept { return domain_id_; }
    [[nodiscard]] LocalPhase phase() const noexcept { return phase_; }
    [[nodiscard]] const std::vector<ChipletCoord> &members() const noexcept { return members_; }
    [[nodiscard]] std::int64_t outstanding() const noexcept { return outstanding_; }
    [[nodiscard]] Cycle max_compute_cycles() const noexcept { return max_compute_; }
    [[nodiscard]] Cycle last_delivery() const noexcept { return last_delivery_; }
    [[nodiscard]] std::size_t reports() const noexcept { return reports_; }

private:
    std::uint32_t domain_id_;
    std::vector<ChipletCoord> members_;
    std::vector<bool> done_;
    std::size_t reports_{0};
    LocalPhase phase_{LocalPhase::computing};
    Cycle max_compute_{0};
    // Absolute cycle of the last packet delivered into this domain.
    Cycle last_delivery_{0};
    // Packets injected by members minus packets delivered to members.
    std::int64_t outstanding_{0};
};

// clamp(min, max, round(alpha * actual + (1 - alpha) * current)).
[[nodiscard]] std::uint64_t next_budget(
        const StepPolicy &policy, std::uint64_t current, std::uint64_t actual_max);

struct StepRecord
{
    StepIndex step{0};
    std::uint64_t budget{0};
    std::uint64_t actual{0};
    std::uint64_t drain{0};
    std::vector<std::uint64_t> domain_completion;

    bool operator==(const StepRecord &) const = default;
};

class GlobalController
{
public:
    GlobalController(StepPolicy policy, std::size_t domain_count);

    // +1 on injection, -1 on delivery. Throws ProtocolError on underflow.
    void track_event(int delta);

    // Marks every draining local as reported once nothing is in flight.
    // Returns true when the barrier for the current step is complete.
    bool try_complete(std::vector<LocalController> &locals);

    // Requires a completed barrier. Records the step, moves to the next
    // one with an adjusted budget and releases every local.
    StepRecord advance_step(std::vector<LocalController> &locals,
            std::uint64_t actual_max, std::uint64_t drain,
            std::vector<std::uint64_t> domain_completion);

    [[nodiscard]] StepIndex step() const noexcept { return step_; }
    [[nodiscard]] std::uint64_t in_flight() const noexcept { return in_flight_; }
    [[nodiscard]] std::uint64_t budget() const noexcept { return budget_; }
    [[nodiscard]] bool barrier_complete() const noexcept { return complete_; }

private:
    StepPolicy policy_;
    std::vector<bool> reported_;
    StepIndex step_{0};
    std::uint64_t in_flight_{0};
    std::uint64_t budget_;
    bool complete_{false};
};

} // namespace wafersim

#endif
