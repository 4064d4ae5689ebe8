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

// noc.hpp - handshake links, mesh routers and the wafer-wide mesh.
//
// Routing is dimension-ordered on two virtual channels. XY packets
// travel along x first, YX packets along y first. A congested router may
// move a long XY packet that has not turned yet onto YX exactly once;
// because packets never move back from YX to XY the channel dependency
// graph stays acyclic and the mesh cannot deadlock.
//
// Port directions: east +x, west -x, north +y, south -y.
#ifndef WAFERSIM_NOC_HPP_
#define WAFERSIM_NOC_HPP_

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "wafersim/aer.hpp"
#include "wafersim/event_queue.hpp"
#include "wafersim/types.hpp"

namespace wafersim
{

enum class Port : std::uint8_t
{
    local = 0,
    north = 1,
    south = 2,
    east = 3,
    west = 4,
};
constexpr std::size_t port_count = 5;

const char *port_name(Port port) noexcept;

// A packet is the AER event plus simulator bookkeeping that never
// influences routing. destination is kept only to verify delivery.
struct Packet
{
    AerEvent event;
    std::uint64_t id{0};
    ChipletCoord source;
    ChipletCoord destination;
    Cycle injected_at{0};
};

// One directed inter-chiplet link. The per-VC FIFOs are the receive
// buffers at the downstream router; a transfer may only start when a
// slot there is free (credit), otherwise the packet waits upstream.
class LinkModel
{
public:
    LinkModel(std::uint64_t phase_cycles, std::uint32_t depth)
            : phase_cycles_(phase_cycles)
            , depth_(depth)
    {
    }

    [[nodiscard]] std::uint64_t phase_cycles() const noexcept { return phase_cycles_; }
    [[nodiscard]] std::uint32_t depth() const noexcept { return depth_; }
    // Buffered plus in-flight packets on this VC.
    [[nodiscard]] std::uint32_t occupancy(Vc vc) const noexcept
    {
        const auto v = static_cast<std::size_t>(vc);
        return static_cast<std::uint32_t>(fifo_[v].size()) + reserved_[v];
    }
    [[nodiscard]] bool can_accept(Vc vc) const noexcept
    {
        return occupancy(vc) < depth_;
    }
    [[nodiscard]] Cycle free_at() const noexcept { return free_at_; }

    // Four-phase req/ack transfer. Returns the arrival cycle, or nullopt
    // when the receive FIFO is full (backpressure: the caller keeps the
    // packet). The link carries one transfer at a time.
    std::optional<Cycle> handshake_transfer(const Packet &packet, Cycle depart);

    // Completes the oldest transfer; returns the packet now buffered.
    const Packet &land();
    [[nodiscard]] bool in_flight_empty() const noexcept { return in_flight_.empty(); }
    [[nodiscard]] Cycle next_arrival() const { return in_flight_.front().arrival; }

    [[nodiscard]] const Packet *head(Vc vc) const
    {
        const auto &q = fifo_[static_cast<std::size_t>(vc)];
        return q.empty() ? nullptr : &q.front();
    }
    Packet &head_mut(Vc vc) { return fifo_[static_cast<std::size_t>(vc)].front(); }
    Packet pop(Vc vc);

    // Counts buffered and in-flight packets carrying the given step tag.
    [[nodiscard]] std::size_t count_tagged(std::uint16_t tag) const;
    [[nodiscard]] bool empty() const noexcept
    {
        return in_flight_.empty() && fifo_[0].empty() && fifo_[1].empty();
    }

private:
    struct Transfer
    {
        Packet packet;
        Cycle arrival;
    };
    std::uint64_t phase_cycles_;
    std::uint32_t depth_;
    std::array<std::deque<Packet>, 2> fifo_;
    std::array<std::uint32_t, 2> reserved_{0, 0};
    std::deque<Transfer> in_flight_;
    Cycle free_at_{0};
};

struct HopDecision
{
    Port port{Port::local};
    AerEvent event;
};

// Pure routing function: picks the output port and returns the header as
// it leaves this router. Only dx, dy and hop_count change.
HopDecision route_hop(const AerEvent &event);

struct RelayRule
{
    std::uint32_t threshold_hops{4};
    std::uint32_t occupancy_trigger{2};
};

// Switches a long, not-yet-turned XY event to YX when its preferred output
// holds more than the trigger. The switch fires at most once per event.
AerEvent maybe_relay(const AerEvent &event, std::uint32_t preferred_occupancy,
        const RelayRule &rule);

struct Delivery
{
    Packet packet;
    ChipletCoord at;
    Cycle cycle{0};
};

struct MeshParams
{
    std::uint32_t width{1};
    std::uint32_t height{1};
    std::uint64_t phase_cycles{1};
    std::uint32_t fifo_depth{4};
    RelayRule relay;
    // Starting round-robin offset for router arbitration.
    std::uint64_t arbitration_seed{0};
};

// The wafer mesh. Owners drive it through a shared EventQueue: every
// link_arrival and router_wake event popped from the queue must be passed
// to handle(), which appends any local deliveries to `out`.
class Mesh
{
public:
    explicit Mesh(const MeshParams &params);

    // Queues a packet at the source router's injection port. Throws
    // ProtocolError when source + offset leaves the grid.
    void inject(const ChipletCoord &source, const AerEvent &event, Cycle now,
            EventQueue &queue);
    void handle(const SimEvent &event, EventQueue &queue, std::vector<Delivery> &out);

    [[nodiscard]] bool empty() const noexcept;
    // Forget pending wake-ups after the owner discarded its queue.
    void reset_wakes();
    [[nodiscard]] std::size_t count_tagged(std::uint16_t tag) const;
    [[nodiscard]] std::uint64_t injected() const noexcept { return injected_; }
    [[nodiscard]] std::uint64_t delivered() const noexcept { return delivered_; }
    [[nodiscard]] std::uint64_t relayed() const noexcept { return relayed_; }
    [[nodiscard]] const MeshParams &params() const noexcept { return params_; }

private:
    static constexpr std::uint32_t no_link = 0xFFFFFFFFu;
    // 1 injection queue + 4 incoming links, two VCs each.
    static constexpr std::size_t input_count = port_count * 2;

    [[nodiscard]] std::size_t router_count() const noexcept
    {
        return static_cast<std::size_t>(params_.width) * params_.height;
    }
    void wake(std::uint32_t router, Cycle now, EventQueue &queue);
    void arbitrate(std::uint32_t router, Cycle now, EventQueue &queue,
            std::vector<Delivery> &out);

    MeshParams params_;
    std::vector<LinkModel> links_;
    // out_link_[router * port_count + port], port != local.
    std::vector<std::uint32_t> out_link_;
    std::vector<std::uint32_t> in_link_;
    std::vector<std::uint32_t> link_source_;
    std::vector<std::uint32_t> link_target_;
    std::vector<std::array<std::deque<Packet>, 2>> injection_;
    std::vector<std::uint32_t> round_robin_;
    std::vector<Cycle> wake_at_;
    std::uint64_t injected_{0};
    std::uint64_t delivered_{0};
    std::uint64_t relayed_{0};
    std::uint64_t next_id_{0};
};

} // namespace wafersim

#endif
