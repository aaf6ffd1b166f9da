#include "physarum/mechanics.hpp"

#include <algorithm>
#include <cmath>

namespace physarum {

void attach_tube(FloatingBody& body, TubeNode& node) {
    if (node.kind != NodeKind::BodyAttachment || node.body_id != body.id)
        throw ScenarioError("attach_tube: node " + std::to_string(node.id) +
                            " does not reference body " + std::to_string(body.id));
    body.attachments.insert(node.id);  // idempotent
    node.position = body.position;
}

Vec2 push_from_tip(Vec2 tip_pos, const FloatingBody& body, double p_mag, double p_range,
                   Vec2 tip_heading) {
    if (p_mag < 0.0) throw ConfigError("push magnitude must be >= 0");
    if (!(p_range > 0.0)) throw ConfigError("push range must be > 0");
    Vec2 away = body.position - tip_pos;
    double d = away.norm();
    if (d >= p_range) return {0.0, 0.0};
    Vec2 dir = d < 1e-12 ? tip_heading.normalized() : away / d;
    return dir * (p_mag * (1.0 - d / p_range));
}

void pull_from_tension(const TubeNetwork& net, const std::map<int, FloatingBody>& bodies,
                       ForceAccumulator& acc) {
    for (const auto& [tid, tube] : net.tubes) {
        auto it = net.tensions.find(tid);
        if (it == net.tensions.end() || it->second <= 0.0) continue;
        double tension = it->second;
        if (tube.path.size() < 2) continue;
        for (int end = 0; end < 2; ++end) {
            int nid = end == 0 ? tube.node_a : tube.node_b;
            const TubeNode& node = net.nodes.at(nid);
            if (node.kind != NodeKind::BodyAttachment) continue;
            auto bit = bodies.find(node.body_id);
            if (bit == bodies.end() || bit->second.anchored) continue;
            Vec2 tangent = end == 0 ? (tube.path[1] - tube.path.front())
                                    : (tube.path[tube.path.size() - 2] - tube.path.back());
            acc.add(node.body_id, tangent.normalized() * tension);
        }
    }
}

void integrate_bodies(std::map<int, FloatingBody>& bodies, const ForceAccumulator& forces,
                      double dt, const ArenaSpec& arena) {
    if (!(dt > 0.0)) throw ScenarioError("integrate_bodies dt must be > 0");
    for (auto& [id, b] : bodies) {
        if (b.anchored) continue;
        b.position += forces.net(id) * (dt / b.drag);
        b.position = arena.clamp_inside(b.position, b.radius);
    }
    // Pairwise overlap resolution, body-id order.
    for (auto i = bodies.begin(); i != bodies.end(); ++i)
        for (auto j = std::next(i); j != bodies.end(); ++j) {
            FloatingBody& a = i->second;
            FloatingBody& c = j->second;
            double min_d = a.radius + c.radius;
            Vec2 delta = c.position - a.position;
            double d = delta.norm();
            if (d >= min_d) continue;
            Vec2 dir = d < 1e-12 ? Vec2{1.0, 0.0} : delta / d;
            double overlap = min_d - d;
            if (a.anchored && c.anchored) continue;
            if (a.anchored) {
                c.position += dir * overlap;
            } else if (c.anchored) {
                a.position -= dir * overlap;
            } else {
                a.position -= dir * (overlap / 2.0);
                c.position += dir * (overlap / 2.0);
            }
            if (!a.anchored) a.position = arena.clamp_inside(a.position, a.radius);
            if (!c.anchored) c.position = arena.clamp_inside(c.position, c.radius);
        }
}

}  // namespace physarum
