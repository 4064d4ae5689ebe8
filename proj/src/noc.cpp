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

#include "wafersim/noc.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "wafersim/error.hpp"

namespace wafersim
{

const char *port_name(Port port) noexcept
{
    switch (port)
    {
    case Port::local:
        return "local";
    case Port::north:
        return "north";
    case Port::south:
        return "south";
    case Port::east:
        return "east";
    case Port::west:
        return "west";
    }
    return "?";
}

std::optional<Cycle> LinkModel::handshake_transfer(const Packet &packet, Cycle depart)
{
    const Vc vc = packet.event.vc;
    if (!can_accept(vc))
    {
        return std::nullopt;
    }
    // req up, ack up, req down, ack down.
    const Cycle start = std::max(depart, free_at_);
    const Cycle arrival = start + 4 * phase_cycles_;
    free_at_ = arrival;
    ++reserved_[static_cast<std::size_t>(vc)];
    in_flight_.push_back(Transfer{packet, arrival});
    return arrival;
}

const Packet &LinkModel::land()
{
    Transfer transfer = std::move(in_flight_.front());
    in_flight_.pop_front();
    const auto v = static_cast<std::size_t>(transfer.packet.event.vc);
    --reserved_[v];
    fifo_[v].push_back(std::move(transfer.packet));
    return fifo_[v].back();
}

Packet LinkModel::pop(Vc vc)
{
    auto &q = fifo_[static_cast<std::size_t>(vc)];
    Packet packet = std::move(q.front());
    q.pop_front();
    return packet;
}

std::size_t LinkModel::count_tagged(std::uint16_t tag) const
{
    std::size_t count = 0;
    for (const auto &q : fifo_)
    {
        count += static_cast<std::size_t>(std::count_if(q.begin(), q.end(),
                [tag](const Packet &p) { return p.event.step_tag == tag; }));
    }
    count += static_cast<std::size_t>(std::count_if(in_flight_.begin(),
            in_flight_.end(),
            [tag](const Transfer &t) { return t.packet.event.step_tag == tag; }));
    return count;
}

HopDecision route_hop(const AerEvent &event)
{
    HopDecision decision{Port::local, event};
    AerEvent &out = decision.event;
    const bool x_first = event.vc == Vc::xy;
    const bool move_x = event.dx != 0 && (x_first || event.dy == 0);
    const bool move_y = !move_x && event.dy != 0;
    if (move_x)
    {
        decision.port = event.dx > 0 ? Port::east : Port::west;
        out.dx += event.dx > 0 ? -1 : 1;
        ++out.hop_count;
    }
    else if (move_y)
    {
        decision.port = event.dy > 0 ? Port::north : Port::south;
        out.dy += event.dy > 0 ? -1 : 1;
        ++out.hop_count;
    }
    return decision;
}

AerEvent maybe_relay(const AerEvent &event, std::uint32_t preferred_occupancy,
        const RelayRule &rule)
{
    const auto remaining = static_cast<std::uint64_t>(std::abs(event.dx)) +
            static_cast<std::uint64_t>(std::abs(event.dy));
    // While dx != 0 an XY packet is still on its first leg.
    const bool not_turned = event.dx != 0;
    if (event.vc == Vc::xy && !event.relayed && not_turned &&
            remaining > rule.threshold_hops &&
            preferred_occupancy > rule.occupancy_trigger)
    {
        AerEvent switched = event;
        switched.vc = Vc::yx;
        switched.relayed = true;
        return switched;
    }
    return event;
}

namespace
{

Port opposite(Port port)
{
    switch (port)
    {
    case Port::north:
        return Port::south;
    case Port::south:
        return Port::north;
    case Port::east:
        return Port::west;
    case Port::west:
        return Port::east;
    case Port::local:
        break;
    }
    return Port::local;
}

constexpr Cycle no_wake = std::numeric_limits<Cycle>::max();

} // namespace

Mesh::Mesh(const MeshParams &params)
        : params_(params)
{
    if (params_.width == 0 || params_.height == 0)
    {
        throw ValidationError("mesh grid must be at least 1x1");
    }
    const std::size_t routers = router_count();
    out_link_.assign(routers * port_count, no_link);
    in_link_.assign(routers * port_count, no_link);
    injection_.resize(routers);
    round_robin_.resize(routers);
    wake_at_.assign(routers, no_wake);

    for (std::size_t r = 0; r < routers; ++r)
    {
        const ChipletCoord c = chiplet_at(r, params_.width);
        round_robin_[r] = static_cast<std::uint32_t>(
                (params_.arbitration_seed + r * 7) % input_count);
        const struct
        {
            Port port;
            int dx;
            int dy;
        } neighbours[] = {{Port::north, 0, 1}, {Port::south, 0, -1},
                {Port::east, 1, 0}, {Port::west, -1, 0}};
        for (const auto &n : neighbours)
        {
            const std::int64_t nx = static_cast<std::int64_t>(c.x) + n.dx;
            const std::int64_t ny = static_cast<std::int64_t>(c.y) + n.dy;
            if (nx < 0 || ny < 0 || nx >= params_.width || ny >= params_.height)
            {
                continue;
            }
            const std::size_t target = chiplet_index(
                    {static_cast<std::uint32_t>(nx), static_cast<std::uint32_t>(ny)},
                    params_.width);
            const auto id = static_cast<std::uint32_t>(links_.size());
            links_.emplace_back(params_.phase_cycles, params_.fifo_depth);
            link_source_.push_back(static_cast<std::uint32_t>(r));
            link_target_.push_back(static_cast<std::uint32_t>(target));
            out_link_[r * port_count + static_cast<std::size_t>(n.port)] = id;
            in_link_[target * port_count + static_cast<std::size_t>(opposite(n.port))] = id;
        }
    }
}

void Mesh::inject(const ChipletCoord &source, const AerEvent &event, Cycle now,
        EventQueue &queue)
{
    const std::int64_t dst_x = static_cast<std::int64_t>(source.x) + event.dx;
    const std::int64_t dst_y = static_cast<std::int64_t>(source.y) + event.dy;
    if (source.x >= params_.width || source.y >= params_.height || dst_x < 0 ||
            dst_y < 0 || dst_x >= params_.width || dst_y >= params_.height)
    {
        std::ostringstream msg;
        msg << "packet from " << source << " with offset (" << event.dx << ","
            << event.dy << ") leaves the " << params_.width << "x"
            << params_.height << " mesh";
        throw ProtocolError(msg.str());
    }
    Packet packet;
    packet.event = event;
    packet.event.hop_count = 0;
    packet.id = next_id_++;
    packet.source = source;
    packet.destination = {static_cast<std::uint32_t>(dst_x),
            static_cast<std::uint32_t>(dst_y)};
    packet.injected_at = now;
    const auto r = static_cast<std::uint32_t>(chiplet_index(source, params_.width));
    injection_[r][static_cast<std::size_t>(event.vc)].push_back(std::move(packet));
    ++injected_;
    wake(r, now, queue);
}

void Mesh::wake(std::uint32_t router, Cycle now, EventQueue &queue)
{
    if (wake_at_[router] == now)
    {
        return;
    }
    wake_at_[router] = now;
    queue.push(now, EventKind::router_wake, router);
}

void Mesh::handle(const SimEvent &event, EventQueue &queue, std::vector<Delivery> &out)
{
    switch (event.kind)
    {
    case EventKind::link_arrival:
    {
        LinkModel &link = links_.at(event.target);
        link.land();
        arbitrate(link_target_[event.target], event.cycle, queue, out);
        break;
    }
    case EventKind::router_wake:
        if (wake_at_.at(event.target) == event.cycle)
        {
            wake_at_[event.target] = no_wake;
        }
        arbitrate(event.target, event.cycle, queue, out);
        break;
    default:
        throw ProtocolError("mesh received a non-network event");
    }
}

void Mesh::arbitrate(std::uint32_t router, Cycle now, EventQueue &queue,
        std::vector<Delivery> &out)
{
    const ChipletCoord here = chiplet_at(router, params_.width);
    const std::size_t base = static_cast<std::size_t>(router) * port_count;
    bool progress = true;
    while (progress)
    {
        progress = false;
        for (std::size_t k = 0; k < input_count; ++k)
        {
            const std::size_t input = (round_robin_[router] + k) % input_count;
            const std::size_t port = input / 2;
            const Vc vc = (input % 2) == 0 ? Vc::xy : Vc::yx;

            Packet *head = nullptr;
            std::uint32_t from_link = no_link;
            if (port == 0)
            {
                auto &q = injection_[router][static_cast<std::size_t>(vc)];
                head = q.empty() ? nullptr : &q.front();
            }
            else
            {
                from_link = in_link_[base + port];
                if (from_link != no_link && links_[from_link].head(vc) != nullptr)
                {
                    head = &links_[from_link].head_mut(vc);
                }
            }
            if (head == nullptr)
            {
                continue;
            }

            HopDecision decision = route_hop(head->event);
            if (decision.port != Port::local)
            {
                const std::uint32_t preferred =
                        out_link_[base + static_cast<std::size_t>(decision.port)];
                if (preferred != no_link)
                {
                    const AerEvent relayed = maybe_relay(head->event,
                            links_[preferred].occupancy(Vc::xy), params_.relay);
                    if (relayed.relayed && !head->event.relayed)
                    {
                        ++relayed_;
                        head->event = relayed;
                        decision = route_hop(head->event);
                    }
                }
            }

            auto take = [&]() {
                Packet packet;
                if (port == 0)
                {
                    auto &q = injection_[router][static_cast<std::size_t>(vc)];
                    packet = std::move(q.front());
                    q.pop_front();
                }
                else
                {
                    packet = links_[from_link].pop(vc);
                    // Credit returned upstream.
                    wake(link_source_[from_link], now, queue);
                }
                return packet;
            };

            if (decision.port == Port::local)
            {
                if (head->destination != here)
                {
                    std::ostringstream msg;
                    msg << "packet " << head->id << " from " << head->source
                        << " reached zero offset at " << here << " but belongs to "
                        << head->destination;
                    throw ProtocolError(msg.str());
                }
                Packet packet = take();
                out.push_back(Delivery{std::move(packet), here, now});
                ++delivered_;
                progress = true;
                continue;
            }

            const std::uint32_t out_link =
                    out_link_[base + static_cast<std::size_t>(decision.port)];
            if (out_link == no_link)
            {
                std::ostringstream msg;
                msg << "packet " << head->id << " at " << here << " routed "
                    << port_name(decision.port) << " off the mesh edge";
                throw ProtocolError(msg.str());
            }
            if (!links_[out_link].can_accept(decision.event.vc))
            {
                continue;
            }
            Packet packet = take();
            packet.event = decision.event;
            const auto arrival = links_[out_link].handshake_transfer(packet, now);
            queue.push(*arrival, EventKind::link_arrival, out_link);
            progress = true;
        }
    }
    round_robin_[router] = (round_robin_[router] + 1) % input_count;
}

bool Mesh::empty() const noexcept
{
    for (const auto &link : links_)
    {
        if (!link.empty())
        {
            return false;
        }
    }
    for (const auto &q : injection_)
    {
        if (!q[0].empty() || !q[1].empty())
        {
            return false;
        }
    }
    return true;
}

void Mesh::reset_wakes()
{
    std::fill(wake_at_.begin(), wake_at_.end(), no_wake);
}

std::size_t Mesh::count_tagged(std::uint16_t tag) const
{
    std::size_t count = 0;
    for (const auto &link : links_)
    {
        count += link.count_tagged(tag);
    }
    for (const auto &q : injection_)
    {
        for (const auto &vcq : q)
        {
            count += static_cast<std::size_t>(std::count_if(vcq.begin(), vcq.end(),
                    [tag](const Packet &p) { return p.event.step_tag == tag; }));
        }
    }
    return count;
}

} // namespace wafersim
