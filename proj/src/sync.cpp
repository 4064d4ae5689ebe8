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

#include "wafersim/sync.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "wafersim/error.hpp"

namespace wafersim
{

const char *phase_name(LocalPhase phase) noexcept
{
    switch (phase)
    {
    case LocalPhase::computing:
        return "COMPUTING";
    case LocalPhase::draining:
        return "DRAINING";
    case LocalPhase::reported:
        return "REPORTED";
    }
    return "?";
}

LocalController::LocalController(std::uint32_t domain_id, std::vector<ChipletCoord> members)
        : domain_id_(domain_id)
        , members_(std::move(members))
        , done_(members_.size(), false)
{
    if (members_.empty())
    {
        phase_ = LocalPhase::draining;
    }
}

void LocalController::report_member_done(const ChipletCoord &chiplet, Cycle compute_cycles)
{
    const auto it = std::find(members_.begin(), members_.end(), chiplet);
    if (it == members_.end())
    {
        std::ostringstream msg;
        msg << "sync: chiplet " << chiplet << " is not a member of domain "
            << domain_id_;
        throw ProtocolError(msg.str());
    }
    if (phase_ != LocalPhase::computing)
    {
        std::ostringstream msg;
        msg << "sync: report from " << chiplet << " while domain " << domain_id_
            << " is " << phase_name(phase_);
        throw ProtocolError(msg.str());
    }
    const auto slot = static_cast<std::size_t>(it - members_.begin());
    if (done_[slot])
    {
        std::ostringstream msg;
        msg << "sync: duplicate report from " << chiplet << " in domain "
            << domain_id_;
        throw ProtocolError(msg.str());
    }
    done_[slot] = true;
    max_compute_ = std::max(max_compute_, compute_cycles);
    if (++reports_ == members_.size())
    {
        phase_ = LocalPhase::draining;
    }
}

void LocalController::mark_reported()
{
    if (phase_ != LocalPhase::draining)
    {
        throw ProtocolError("sync: domain " + std::to_string(domain_id_) +
                " cannot report from phase " + phase_name(phase_));
    }
    phase_ = LocalPhase::reported;
}

void LocalController::begin_step()
{
    if (phase_ != LocalPhase::reported)
    {
        throw ProtocolError("sync: domain " + std::to_string(domain_id_) +
                " released from phase " + phase_name(phase_));
    }
    std::fill(done_.begin(), done_.end(), false);
    reports_ = 0;
    max_compute_ = 0;
    last_delivery_ = 0;
    outstanding_ = 0;
    phase_ = members_.empty() ? LocalPhase::draining : LocalPhase::computing;
}

std::uint64_t next_budget(
        const StepPolicy &policy, std::uint64_t current, std::uint64_t actual_max)
{
    const double blended = policy.smoothing * static_cast<double>(actual_max) +
            (1.0 - policy.smoothing) * static_cast<double>(current);
    const auto rounded = static_cast<std::uint64_t>(std::llround(blended));
    return std::clamp(rounded, policy.min_budget, policy.max_budget);
}

GlobalController::GlobalController(StepPolicy policy, std::size_t domain_count)
        : policy_(policy)
        , reported_(domain_count, false)
        , budget_(policy.initial_budget)
{
}

void GlobalController::track_event(int delta)
{
    if (delta < 0 && in_flight_ < static_cast<std::uint64_t>(-delta))
    {
        throw ProtocolError("sync: in-flight counter underflow at step " +
                std::to_string(step_));
    }
    in_flight_ = static_cast<std::uint64_t>(static_cast<std::int64_t>(in_flight_) + delta);
}

bool GlobalController::try_complete(std::vector<LocalController> &locals)
{
    if (complete_)
    {
        return true;
    }
    if (in_flight_ != 0)
    {
        return false;
    }
    for (const LocalController &local : locals)
    {
        if (local.phase() == LocalPhase::computing)
        {
            return false;
        }
    }
    std::int64_t balance = 0;
    for (std::size_t d = 0; d < locals.size(); ++d)
    {
        balance += locals[d].outstanding();
        if (locals[d].phase() == LocalPhase::draining)
        {
            locals[d].mark_reported();
        }
        reported_[d] = true;
    }
    if (balance != 0)
    {
        throw ProtocolError("sync: domain counters do not reconcile with the "
                            "global in-flight counter at step " +
                std::to_string(step_));
    }
    complete_ = true;
    return true;
}

StepRecord GlobalController::advance_step(std::vector<LocalController> &locals,
        std::uint64_t actual_max, std::uint64_t drain,
        std::vector<std::uint64_t> domain_completion)
{
    if (!complete_ || in_flight_ != 0)
    {
        throw ProtocolError("sync: advance_step called before the barrier of step " +
                std::to_string(step_) + " completed");
    }
    StepRecord record{step_, budget_, actual_max, drain, std::move(domain_completion)};
    budget_ = next_budget(policy_, budget_, actual_max);
    ++step_;
    complete_ = false;
    std::fill(reported_.begin(), reported_.end(), false);
    for (LocalController &local : locals)
    {
        local.begin_step();
    }
    return record;
}

} // namespace wafersim
