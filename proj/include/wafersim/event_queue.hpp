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

// event_queue.hpp - deterministic discrete-event queue.
//
// Events fire in (cycle, sequence) order. The sequence number is the
// global insertion count, so two runs that insert the same events in the
// same order pop them in the same order.
#ifndef WAFERSIM_EVENT_QUEUE_HPP_
#define WAFERSIM_EVENT_QUEUE_HPP_

#include <cstdint>
#include <queue>
#include <vector>

#include "wafersim/types.hpp"

namespace wafersim
{

enum class EventKind : std::uint8_t
{
    neuron_phase,
    link_arrival,
    controller_msg,
    router_wake,
};

struct SimEvent
{
    Cycle cycle{0};
    std::uint64_t sequence{0};
    EventKind kind{EventKind::router_wake};
    // Kind-specific: chiplet index, link index or router index.
    std::uint32_t target{0};
};

class EventQueue
{
public:
    void push(Cycle cycle, EventKind kind, std::uint32_t target)
    {
        heap_.push(SimEvent{cycle, next_sequence_++, kind, target});
    }
    [[nodiscard]] bool empty() const noexcept { return heap_.empty(); }
    [[nodiscard]] std::size_t size() const noexcept { return heap_.size(); }
    [[nodiscard]] const SimEvent &top() const { return heap_.top(); }
    SimEvent pop()
    {
        SimEvent event = heap_.top();
        heap_.pop();
        return event;
    }
    void clear() { heap_ = {}; }

private:
    struct Later
    {
        bool operator()(const SimEvent &a, const SimEvent &b) const noexcept
        {
            return a.cycle != b.cycle ? a.cycle > b.cycle : a.sequence > b.sequence;
        }
    };
    std::priority_queue<SimEvent, std::vector<SimEvent>, Later> heap_;
    std::uint64_t next_sequence_{0};
};

} // namespace wafersim

#endif
