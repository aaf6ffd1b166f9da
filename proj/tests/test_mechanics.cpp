#include <doctest.h>

#include <cmath>
#include <map>

#include "physarum/mechanics.hpp"

using namespace physarum;

namespace {

TubeNetwork arc_net(Vec2 a, Vec2 b, double bulge, int site_node_out[2]) {
    TubeNetwork net;
    int na = net.add_node(NodeKind::Site, a, 0);
    int nb = net.add_node(NodeKind::BodyAttachment, b, -1, 1);
    std::vector<Vec2> path;
    for (int i = 0; i <= 32; ++i) {
        double f = i / 32.0;
        Vec2 p = a * (1 - f) + b * f + (b - a).perp().normalized() * (bulge * std::sin(std::acos(-1.0) * f));
        path.push_back(p);
    }
    net.add_tube(na, nb, path);
    site_node_out[0] = na;
    site_node_out[1] = nb;
    return net;
}

}  // namespace

TEST_CASE("attach_tube registers the node and is idempotent") {
    FloatingBody body;
    body.id = 3;
    TubeNode node{11, NodeKind::BodyAttachment, {1, 2}, -1, 3};
    attach_tube(body, node);
    attach_tube(body, node);
    CHECK(body.attachments.size() == 1);
    CHECK(body.attachments.count(11) == 1);
    TubeNode wrong{12, NodeKind::BodyAttachment, {1, 2}, -1, 9};
    CHECK_THROWS_AS(attach_tube(body, wrong), ScenarioError);
}

TEST_CASE("attachment nodes on an anchored body never move") {
    std::map<int, FloatingBody> bodies;
    FloatingBody b;
    b.id = 0;
    b.anchored = true;
    b.position = {5.0, 5.0};
    bodies[0] = b;
    ForceAccumulator acc;
    acc.add(0, {100.0, -50.0});
    integrate_bodies(bodies, acc, 1.0, ArenaSpec::disc(45.0, 0.5));
    CHECK(bodies[0].position.x == 5.0);  // bit-identical
    CHECK(bodies[0].position.y == 5.0);
}

TEST_CASE("push force follows the linear falloff") {
    FloatingBody body;
    body.position = {4.0, 0.0};
    SUBCASE("zero at the cutoff range") {
        Vec2 f = push_from_tip({0.0, 0.0}, body, 2.0, 4.0);
        CHECK(f.norm() == 0.0);
    }
    SUBCASE("half range gives half magnitude away from the tip") {
        body.position = {2.0, 0.0};
        Vec2 f = push_from_tip({0.0, 0.0}, body, 2.0, 4.0);
        CHECK(f.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(f.x > 0.0);  // directed away from the tip
        CHECK(std::abs(f.y) < 1e-12);
    }
    SUBCASE("coincident tip and centroid push along the tip heading") {
        body.position = {0.0, 0.0};
        Vec2 f = push_from_tip({0.0, 0.0}, body, 2.0, 4.0, {0.0, 1.0});
        CHECK(f.y == doctest::Approx(2.0));
        CHECK(std::abs(f.x) < 1e-12);
    }
}

TEST_CASE("straight tubes exert no pull") {
    int ids[2];
    TubeNetwork net = arc_net({-10, 0}, {10, 0}, 0.0, ids);
    contract_step(net, 1e-9, 0.05);
    std::map<int, FloatingBody> bodies;
    FloatingBody b;
    b.id = 1;
    b.position = {10, 0};
    b.attachments = {ids[1]};
    bodies[1] = b;
    ForceAccumulator acc;
    pull_from_tension(net, bodies, acc);
    CHECK(acc.net(1).norm() < 1e-12);
}

TEST_CASE("a curved tube pulls its free endpoint back along the tangent") {
    // Bulged arc from an anchored site west to a free body east: the pull on
    // the body points into the tube, i.e. with a westward component.
    int ids[2];
    TubeNetwork net = arc_net({-10, 0}, {10, 0}, 4.0, ids);
    contract_step(net, 1e-9, 0.05);
    std::map<int, FloatingBody> bodies;
    FloatingBody b;
    b.id = 1;
    b.position = {10, 0};
    b.attachments = {ids[1]};
    bodies[1] = b;
    ForceAccumulator acc;
    pull_from_tension(net, bodies, acc);
    Vec2 f = acc.net(1);
    CHECK(f.norm() > 0.0);
    CHECK(f.x < 0.0);
    // Tangent at the endpoint leans toward the bulge side.
    CHECK(f.y > 0.0);
}

TEST_CASE("tensions from two tubes accumulate on one body") {
    TubeNetwork net;
    int na = net.add_node(NodeKind::Site, {-10, 5}, 0);
    int nb = net.add_node(NodeKind::Site, {-10, -5}, 1);
    int nc = net.add_node(NodeKind::BodyAttachment, {0, 0}, -1, 1);
    auto bent = [](Vec2 a, Vec2 b) {
        std::vector<Vec2> p;
        for (int i = 0; i <= 16; ++i) {
            double f = i / 16.0;
            p.push_back(a * (1 - f) + b * f +
                        (b - a).perp().normalized() * std::sin(std::acos(-1.0) * f));
        }
        return p;
    };
    auto upper = bent({-10, 5}, {0, 0});
    auto lower = upper;  // exact mirror so lateral components cancel
    for (Vec2& p : lower) p.y = -p.y;
    net.add_tube(na, nc, upper);
    net.add_tube(nb, nc, lower);
    contract_step(net, 1e-9, 0.05);
    std::map<int, FloatingBody> bodies;
    FloatingBody b;
    b.id = 1;
    b.position = {0, 0};
    b.attachments = {nc};
    bodies[1] = b;

    ForceAccumulator one;
    {
        TubeNetwork single = net;
        single.tubes.erase(single.tubes.begin()->first);
        pull_from_tension(single, bodies, one);
    }
    ForceAccumulator both;
    pull_from_tension(net, bodies, both);
    CHECK(both.net(1).norm() > one.net(1).norm());
    // Symmetric arcs: lateral components cancel, axial components add.
    CHECK(std::abs(both.net(1).y) < 1e-9);
    CHECK(both.net(1).x < 0.0);
}

TEST_CASE("free bodies follow the closed-form overdamped displacement") {
    std::map<int, FloatingBody> bodies;
    FloatingBody b;
    b.id = 0;
    b.position = {0.0, 0.0};
    b.drag = 2.0;
    bodies[0] = b;
    ForceAccumulator acc;
    const Vec2 F{0.3, -0.7};
    acc.add(0, F);
    const double dt = 0.25;
    const int n = 40;
    for (int i = 0; i < n; ++i) integrate_bodies(bodies, acc, dt, ArenaSpec::disc(45.0, 0.5));
    Vec2 expect = F * (n * dt / b.drag);
    CHECK(std::abs(bodies[0].position.x - expect.x) < 1e-12);
    CHECK(std::abs(bodies[0].position.y - expect.y) < 1e-12);
}

TEST_CASE("bodies are kept inside the arena") {
    std::map<int, FloatingBody> bodies;
    FloatingBody b;
    b.id = 0;
    b.position = {9.0, 0.0};
    b.radius = 1.0;
    bodies[0] = b;
    ForceAccumulator acc;
    acc.add(0, {100.0, 0.0});
    integrate_bodies(bodies, acc, 1.0, ArenaSpec::disc(10.0, 0.5));
    CHECK(bodies[0].position.norm() <= 9.0 + 1e-9);  // wall minus body radius
}

TEST_CASE("overlapping equal discs separate symmetrically") {
    std::map<int, FloatingBody> bodies;
    FloatingBody a, b;
    a.id = 0;
    a.position = {-0.5, 0.0};
    a.radius = 2.0;
    b.id = 1;
    b.position = {0.5, 0.0};
    b.radius = 2.0;
    bodies[0] = a;
    bodies[1] = b;
    ForceAccumulator none;
    integrate_bodies(bodies, none, 1.0, ArenaSpec::disc(45.0, 0.5));
    double gap = distance(bodies[0].position, bodies[1].position);
    CHECK(gap >= 4.0 - 1e-9);
    // Symmetric resolution along the centroid line.
    CHECK(bodies[0].position.x == doctest::Approx(-bodies[1].position.x).epsilon(1e-9));
    CHECK(std::abs(bodies[0].position.y) < 1e-12);
}
