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

#include "doctest.h"

#include <map>

#include "wafersim/error.hpp"
#include "wafersim/noc.hpp"
#include "wafersim/rng.hpp"

using namespace wafersim;

namespace
{

std::vector<Delivery> drain(Mesh &mesh, EventQueue &queue)
{
    std::vector<Delivery> out;
    while (!queue.empty())
    {
        mesh.handle(queue.pop(), queue, out);
    }
    return out;
}

AerEvent offset(std::int32_t dx, std::int32_t dy, NeuronIndex neuron = 0)
{
    AerEvent e;
    e.dx = dx;
    e.dy = dy;
    e.dst_neuron = neuron;
    return e;
}

} // namespace

TEST_CASE("XY hop decrements x first")
{
    const HopDecision d = route_hop(offset(3, 1));
    CHECK(d.port == Port::east);
    CHECK(d.event.dx == 2);
    CHECK(d.event.dy == 1);
    CHECK(d.event.hop_count == 1);
}

TEST_CASE("zero offset delivers locally")
{
    const HopDecision d = route_hop(offset(0, 0));
    CHECK(d.port == Port::local);
    CHECK(d.event == offset(0, 0));
}

TEST_CASE("YX hop moves along y first")
{
    AerEvent e = offset(2, -2);
    e.vc = Vc::yx;
    const HopDecision d = route_hop(e);
    CHECK(d.port == Port::south);
    CHECK(d.event.dx == 2);
    CHECK(d.event.dy == -1);
}

TEST_CASE("west and north ports")
{
    CHECK(route_hop(offset(-1, 0)).port == Port::west);
    CHECK(route_hop(offset(0, 1)).port == Port::north);
}

TEST_CASE("relay rule")
{
    const RelayRule rule{4, 2};
    SUBCASE("long congested event switches once")
    {
        const AerEvent e = maybe_relay(offset(5, 1), 3, rule);
        CHECK(e.vc == Vc::yx);
        CHECK(e.relayed);
        CHECK(e.dx == 5);
        CHECK(e.dy == 1);
        CHECK(maybe_relay(e, 10, rule) == e);
    }
    SUBCASE("short event never relays")
    {
        CHECK(maybe_relay(offset(3, 1), 100, rule) == offset(3, 1));
    }
    SUBCASE("uncongested event keeps XY")
    {
        CHECK(maybe_relay(offset(6, 1), 2, rule) == offset(6, 1));
    }
    SUBCASE("event already on its y leg is left alone")
    {
        CHECK(maybe_relay(offset(0, 7), 100, rule) == offset(0, 7));
    }
}

TEST_CASE("link timing")
{
    Packet p;
    SUBCASE("idle link takes four phases")
    {
        LinkModel link(1, 4);
        CHECK(link.handshake_transfer(p, 10) == Cycle{14});
        LinkModel slow(3, 4);
        CHECK(slow.handshake_transfer(p, 10) == Cycle{22});
    }
    SUBCASE("same-cycle transfers serialize")
    {
        LinkModel link(2, 4);
        const auto a = link.handshake_transfer(p, 5);
        const auto b = link.handshake_transfer(p, 5);
        REQUIRE(a);
        REQUIRE(b);
        CHECK(*b - *a == 8);
    }
    SUBCASE("full receive FIFO applies backpressure")
    {
        LinkModel link(1, 1);
        CHECK(link.handshake_transfer(p, 0).has_value());
        CHECK_FALSE(link.handshake_transfer(p, 0).has_value());
        link.land();
        CHECK_FALSE(link.can_accept(Vc::xy));
        CHECK(link.can_accept(Vc::yx));
        link.pop(Vc::xy);
        CHECK(link.handshake_transfer(p, 8).has_value());
    }
}

TEST_CASE("single event crosses the mesh")
{
    Mesh mesh(MeshParams{4, 4, 1, 4, {}, 0});
    EventQueue queue;
    mesh.inject({0, 0}, offset(3, 1, 42), 0, queue);
    const auto out = drain(mesh, queue);
    REQUIRE(out.size() == 1);
    CHECK(out[0].at == ChipletCoord{3, 1});
    CHECK(out[0].packet.event.dst_neuron == 42);
    CHECK(out[0].packet.event.hop_count == 4);
    CHECK(out[0].packet.destination == ChipletCoord{3, 1});
    // Four link traversals of four phases each.
    CHECK(out[0].cycle == 16);
    CHECK(mesh.empty());
    CHECK(mesh.injected() == 1);
    CHECK(mesh.delivered() == 1);
}

TEST_CASE("local event is delivered without links")
{
    Mesh mesh(MeshParams{2, 2, 1, 4, {}, 0});
    EventQueue queue;
    mesh.inject({1, 1}, offset(0, 0, 7), 5, queue);
    const auto out = drain(mesh, queue);
    REQUIRE(out.size() == 1);
    CHECK(out[0].at == ChipletCoord{1, 1});
    CHECK(out[0].cycle == 5);
}

TEST_CASE("off-grid destination is a protocol error")
{
    Mesh mesh(MeshParams{2, 2, 1, 4, {}, 0});
    EventQueue queue;
    CHECK_THROWS_AS(mesh.inject({1, 1}, offset(1, 0), 0, queue), ProtocolError);
    CHECK_THROWS_AS(mesh.inject({0, 0}, offset(0, -1), 0, queue), ProtocolError);
}

TEST_CASE("congestion relays long events without changing endpoints")
{
    Mesh mesh(MeshParams{8, 8, 1, 2, {4, 1}, 0});
    EventQueue queue;
    for (NeuronIndex n = 0; n < 40; ++n)
    {
        mesh.inject({0, 0}, offset(7, 3, n), 0, queue);
    }
    const auto out = drain(mesh, queue);
    REQUIRE(out.size() == 40);
    CHECK(mesh.relayed() > 0);
    std::map<NeuronIndex, int> seen;
    for (const Delivery &d : out)
    {
        CHECK(d.at == ChipletCoord{7, 3});
        ++seen[d.packet.event.dst_neuron];
    }
    CHECK(seen.size() == 40);

    // Same event alone on an idle mesh lands at the same place.
    Mesh idle(MeshParams{8, 8, 1, 2, {4, 1}, 0});
    EventQueue q2;
    idle.inject({0, 0}, offset(7, 3, 5), 0, q2);
    const auto single = drain(idle, q2);
    REQUIRE(single.size() == 1);
    CHECK(single[0].at == ChipletCoord{7, 3});
    CHECK(idle.relayed() == 0);
}

TEST_CASE("all-to-all traffic delivers exactly once")
{
    Rng rng(5);
    Mesh mesh(MeshParams{5, 3, 1, 1, {1, 0}, 99});
    EventQueue queue;
    std::map<NeuronIndex, ChipletCoord> expected;
    NeuronIndex id = 0;
    for (std::uint32_t sy = 0; sy < 3; ++sy)
    {
        for (std::uint32_t sx = 0; sx < 5; ++sx)
        {
            for (int k = 0; k < 20; ++k)
            {
                const auto tx = static_cast<std::int32_t>(rng.below(5));
                const auto ty = static_cast<std::int32_t>(rng.below(3));
                mesh.inject({sx, sy},
                        offset(tx - static_cast<std::int32_t>(sx), ty - static_cast<std::int32_t>(sy), id),
                        0, queue);
                expected[id++] = {static_cast<std::uint32_t>(tx), static_cast<std::uint32_t>(ty)};
            }
        }
    }
    const auto out = drain(mesh, queue);
    CHECK(out.size() == expected.size());
    std::map<NeuronIndex, int> count;
    for (const Delivery &d : out)
    {
        CHECK(d.at == expected.at(d.packet.event.dst_neuron));
        ++count[d.packet.event.dst_neuron];
    }
    for (const auto &[n, c] : count)
    {
        CHECK(c == 1);
    }
    CHECK(mesh.empty());
}
