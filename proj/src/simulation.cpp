#include <algorithm>
#include <cmath>
#include <sstream>

#include "physarum/scenario.hpp"

namespace physarum {

namespace {

Vec2 seed_position_of(const Scenario& s) {
    if (s.seed.body_id >= 0) {
        for (const FloatingBody& b : s.bodies)
            if (b.id == s.seed.body_id) return b.position;
        throw ScenarioError("seed references missing body " + std::to_string(s.seed.body_id));
    }
    return s.seed.position;
}

}  // namespace

Simulation::Simulation(const Scenario& s)
    : scn(s),
      field(s.arena, s.field.diffusion, s.field.decay, s.field.dt),
      plasm(seed_at(s.arena, seed_position_of(s), s.seed.initial_mass, s.growth, s.mass_budget)),
      rng(s.rng_seed) {
    scn.validate();
    for (const FloatingBody& b : s.bodies) bodies[b.id] = b;
    for (const NutrientSource& src : s.sources)
        emit_weights_.push_back(color_weight(s.preference, src.color));
    storage = StorageGraph(5);
    storage.binding_exists = [this](const Binding& b) {
        if (b.kind == BindingKind::Site)
            return b.id >= 0 && b.id < static_cast<int>(scn.sources.size());
        return bodies.count(b.id) > 0;
    };
    record.scenario = scn;
    record.scenario_hash = scn.hash();
    sync_sources();
    record_metrics(false);
    record_snapshot();
}

PointSet Simulation::site_points() const {
    std::vector<Vec2> pts;
    for (const NutrientSource& s : scn.sources) pts.push_back(s.position);
    return PointSet(pts);
}

Vec2 Simulation::body_centroid(int id) const {
    auto it = bodies.find(id);
    if (it == bodies.end()) throw ScenarioError("unknown body " + std::to_string(id));
    return it->second.position;
}

void Simulation::sync_sources() {
    for (std::size_t i = 0; i < scn.sources.size(); ++i)
        if (scn.sources[i].host_body >= 0)
            scn.sources[i].position = body_centroid(scn.sources[i].host_body);
}

void Simulation::sync_attachments() {
    for (auto& [nid, node] : net.nodes)
        if (node.kind == NodeKind::BodyAttachment) {
            auto it = bodies.find(node.body_id);
            if (it != bodies.end()) node.position = it->second.position;
        }
    net.sync_endpoints();
}

void Simulation::rebuild_network() {
    substeps_since_rebuild_ = 0;
    net = prune_redundant(extract_network(plasm));
    for (auto& [id, b] : bodies) b.attachments.clear();

    // Hosted-source marks already came through as attachment nodes.
    for (auto& [nid, node] : net.nodes)
        if (node.kind == NodeKind::BodyAttachment) {
            auto it = bodies.find(node.body_id);
            if (it != bodies.end()) attach_tube(it->second, node);
        }

    for (auto& [tid, t] : net.tubes) t.stiffness = scn.mech.stiffness;
    capture_overlaps();
    sync_attachments();
}

// A tube passing over a free body is an occupation: split the tube there and
// bind the new attachment node to the body. A body hanging off the net as a
// leaf gets rerouted onto a passing trunk. Runs against the live (contracted)
// geometry every mechanics substep, so a straightening trunk can sweep up a
// drifting body. Idempotent, including the stiffness assignment.
void Simulation::capture_overlaps() {
    for (auto& [bid, body] : bodies) {
        if (body.anchored) continue;
        std::vector<int> own_nodes;
        std::vector<int> own_tubes;
        for (const auto& [nid, node] : net.nodes)
            if (node.kind == NodeKind::BodyAttachment && node.body_id == bid) {
                own_nodes.push_back(nid);
                for (int tid : net.tubes_at(nid)) own_tubes.push_back(tid);
            }
        if (own_tubes.size() >= 2) continue;  // already spanned through
        double capture = body.radius + 8.0 * scn.growth.tip_radius;
        int best_tube = -1;
        std::size_t best_idx = 0;
        double best_d = capture;
        for (const auto& [tid, t] : net.tubes) {
            if (t.contract_gain != 1.0) continue;  // leave maneuver arcs intact
            if (std::find(own_tubes.begin(), own_tubes.end(), tid) != own_tubes.end()) continue;
            for (std::size_t i = 1; i + 1 < t.path.size(); ++i) {
                double d = distance(t.path[i], body.position);
                if (d < best_d) {
                    best_d = d;
                    best_tube = tid;
                    best_idx = i;
                }
            }
        }
        if (best_tube < 0) continue;
        for (int tid : own_tubes) {
            net.tubes.erase(tid);
            net.tensions.erase(tid);
        }
        for (int nid : own_nodes) net.nodes.erase(nid);
        body.attachments.clear();
        Tube cut = net.tubes.at(best_tube);
        net.tubes.erase(best_tube);
        net.tensions.erase(best_tube);
        int attach = net.add_node(NodeKind::BodyAttachment, body.position, -1, bid);
        std::vector<Vec2> left(cut.path.begin(), cut.path.begin() + best_idx + 1);
        std::vector<Vec2> right(cut.path.begin() + best_idx, cut.path.end());
        left.push_back(body.position);
        right.front() = body.position;
        net.add_tube(cut.node_a, attach, std::move(left), cut.stiffness);
        net.add_tube(attach, cut.node_b, std::move(right), cut.stiffness);
        attach_tube(body, net.nodes.at(attach));
    }

    // Protoplasm migrates toward food once a span closes over a free body:
    // the leg running toward a food-bearing node keeps its contractile
    // strength, every other incident leg thins out.
    auto food_bearing = [&](int nid) {
        const TubeNode& n = net.nodes.at(nid);
        if (n.kind == NodeKind::Site && n.site_id >= 0) return true;
        if (n.kind == NodeKind::BodyAttachment) {
            auto it = bodies.find(n.body_id);
            return it != bodies.end() && it->second.carries_food;
        }
        return false;
    };
    for (const auto& [nid, node] : net.nodes) {
        if (node.kind != NodeKind::BodyAttachment) continue;
        auto bit = bodies.find(node.body_id);
        if (bit == bodies.end() || bit->second.anchored || bit->second.carries_food) continue;
        for (int tid : net.tubes_at(nid)) {
            Tube& t = net.tubes.at(tid);
            if (t.contract_gain != 1.0) continue;
            int other = t.node_a == nid ? t.node_b : t.node_a;
            t.stiffness = scn.mech.stiffness * (food_bearing(other) ? 5.0 : 0.02);
        }
    }
    sync_attachments();
}

void Simulation::growth_substep() {
    const double dt = scn.growth_substep * scn.field.dt;

    grow_step(plasm, field, scn.growth, rng, dt);

    auto events = engulf_check(plasm, scn.sources, scn.growth);
    for (const EngulfEvent& e : events) {
        std::ostringstream os;
        os << "source=" << e.source_id << " branch=" << e.branch_id;
        if (e.body_id >= 0) os << " body=" << e.body_id;
        record.events.push_back({tick_count_, time_min(), "engulf", os.str()});
    }
    if (record.completion_tick < 0 &&
        plasm.engulfed_sources.size() == scn.sources.size() && !scn.sources.empty())
        record.completion_tick = tick_count_;

    std::vector<int> removed;
    retract_unrewarded(plasm, plasm.now, scn.growth, &removed);
    for (int id : removed)
        record.events.push_back({tick_count_, time_min(), "retract", "branch=" + std::to_string(id)});

    // Re-extract on topology change, and hourly so the network tracks body
    // motion (re-captured overlaps, refreshed slack). Near the end of the
    // schedule the net is left alone so contraction can finish straightening.
    bool maneuver_active = false;
    for (const Maneuver& m : queue) maneuver_active |= !m.done;
    bool consolidating = scn.schedule.ticks > 0 &&
                         tick_count_ > scn.schedule.ticks - 3000 && !scn.bodies.empty();
    if (plasm.reward_version != last_reward_version_) {
        last_reward_version_ = plasm.reward_version;
        rebuild_network();
    } else if (plasm.reward_version > 0 && !maneuver_active && !consolidating &&
               ++substeps_since_rebuild_ >= 30) {
        rebuild_network();
    }

    mechanics_substep(dt);
    maneuver_substep(dt);
    sync_sources();
}

void Simulation::mechanics_substep(double dt) {
    sync_attachments();
    capture_overlaps();
    contract_step(net, dt, scn.mech.contract_lambda);

    forces.clear();
    pull_from_tension(net, bodies, forces);
    // Ripple pushes from every live tip onto nearby free bodies (body-id then
    // tip order keeps the sums deterministic).
    for (auto& [bid, body] : bodies) {
        if (body.anchored) continue;
        for (const Tip& tip : plasm.tips) {
            if (!tip.alive) continue;
            Vec2 f = push_from_tip(tip.position, body, scn.mech.push_magnitude, scn.mech.push_range,
                                   tip.heading);
            if (f.x != 0.0 || f.y != 0.0) forces.add(bid, f);
        }
    }
    for (Maneuver& m : queue)
        if (!m.done && m.kind == Maneuver::Kind::Push && m.probe_active) {
            auto nit = storage_bindings.find(m.node);
            if (nit != storage_bindings.end() && nit->second.kind == BindingKind::Body) {
                auto bit = bodies.find(nit->second.id);
                if (bit != bodies.end())
                    forces.add(bit->first, push_from_tip(m.probe_pos, bit->second,
                                                         scn.mech.push_magnitude,
                                                         scn.mech.push_range, m.direction));
            }
            break;  // one maneuver in flight at a time
        }

    integrate_bodies(bodies, forces, dt, scn.arena);
    sync_attachments();
}

void Simulation::maneuver_substep(double dt) {
    for (Maneuver& m : queue) {
        if (m.done) continue;
        m.elapsed += dt;
        if (m.kind == Maneuver::Kind::Push) {
            auto bind = storage_bindings.at(m.node);
            Vec2 target = body_centroid(bind.id);
            if (!m.probe_active) {
                const FloatingBody& b = bodies.at(bind.id);
                m.probe_pos = target - m.direction * (b.radius + scn.mech.push_range * 0.8);
                m.probe_active = true;
            } else {
                // The maneuver pseudopodium keeps advancing on the body.
                Vec2 to_body = target - m.probe_pos;
                double d = to_body.norm();
                double step = std::min(scn.growth.speed * dt, std::max(0.0, d - 0.5));
                if (d > 1e-9) m.probe_pos += to_body * (step / d);
            }
            if (m.elapsed >= m.duration) {
                m.done = true;
                m.probe_active = false;  // pseudopodium retracts
                op_trace.push_back({tick_count_, time_min(), "push", "completed node=" +
                                                                         std::to_string(m.node)});
            }
        } else {
            auto bind = storage_bindings.at(m.node);
            Vec2 pos = body_centroid(bind.id);
            auto tbind = storage_bindings.at(m.target_node);
            Vec2 tpos = tbind.kind == BindingKind::Body ? body_centroid(tbind.id)
                                                        : scn.sources.at(tbind.id).position;
            double body_r = bodies.at(bind.id).radius;
            if (distance(pos, tpos) < body_r || m.elapsed >= m.duration) {
                if (m.pull_tube >= 0 && net.tubes.count(m.pull_tube))
                    net.tubes.at(m.pull_tube).contract_gain = 1.0;
                m.done = true;
                op_trace.push_back({tick_count_, time_min(), "pull",
                                    "completed node=" + std::to_string(m.node) +
                                        " dist=" + std::to_string(distance(pos, tpos))});
            }
        }
        break;  // serialized queue
    }
}

void Simulation::enqueue_push(int storage_node, Vec2 direction, double duration) {
    Maneuver m;
    m.kind = Maneuver::Kind::Push;
    m.node = storage_node;
    m.direction = direction.normalized();
    m.duration = duration;
    queue.push_back(m);
}

void Simulation::enqueue_pull(int storage_node, int target_storage_node, double window) {
    Maneuver m;
    m.kind = Maneuver::Kind::Pull;
    m.node = storage_node;
    m.target_node = target_storage_node;
    m.duration = window;

    // Ensure a contractile tube between the bound body and the target: reuse
    // an existing attachment tube or lay a slack arc.
    const Binding& nb = storage_bindings.at(storage_node);
    const Binding& tb = storage_bindings.at(target_storage_node);
    Vec2 a = nb.kind == BindingKind::Body ? body_centroid(nb.id) : scn.sources.at(nb.id).position;
    Vec2 b = tb.kind == BindingKind::Body ? body_centroid(tb.id) : scn.sources.at(tb.id).position;
    int na = -1, nb_id = -1;
    for (const auto& [nid, node] : net.nodes) {
        if (nb.kind == BindingKind::Body && node.kind == NodeKind::BodyAttachment &&
            node.body_id == nb.id)
            na = nid;
        if (tb.kind == BindingKind::Site && node.kind == NodeKind::Site && node.site_id == tb.id)
            nb_id = nid;
        if (tb.kind == BindingKind::Body && node.kind == NodeKind::BodyAttachment &&
            node.body_id == tb.id)
            nb_id = nid;
    }
    if (na < 0) {
        na = net.add_node(NodeKind::BodyAttachment, a, -1, nb.kind == BindingKind::Body ? nb.id : -1);
        if (nb.kind == BindingKind::Body) attach_tube(bodies.at(nb.id), net.nodes.at(na));
    }
    if (nb_id < 0) nb_id = net.add_node(NodeKind::Site, b, tb.kind == BindingKind::Site ? tb.id : -1,
                                        tb.kind == BindingKind::Body ? tb.id : -1);
    int existing = -1;
    for (const auto& [tid, t] : net.tubes)
        if ((t.node_a == na && t.node_b == nb_id) || (t.node_a == nb_id && t.node_b == na))
            existing = tid;
    if (existing < 0) {
        // Circular arc with ~20% excess length.
        std::vector<Vec2> path;
        const int n = 32;
        Vec2 mid = (a + b) * 0.5;
        Vec2 bulge = (b - a).perp().normalized() * (0.35 * distance(a, b));
        for (int i = 0; i <= n; ++i) {
            double t = static_cast<double>(i) / n;
            Vec2 p = a * (1 - t) + b * t + bulge * (4.0 * t * (1.0 - t));
            path.push_back(p);
        }
        existing = net.add_tube(na, nb_id, std::move(path), scn.mech.stiffness);
    }
    net.tubes.at(existing).contract_gain = 3.0;
    m.pull_tube = existing;
    queue.push_back(m);
}

void Simulation::record_metrics(bool final_row) {
    Metrics m = spanning_metrics(net, site_points());
    record.metrics.push_back({tick_count_, time_min(), m, final_row});
    for (const auto& [bid, b] : bodies) {
        Vec2 f = forces.net(bid);
        record.bodies.push_back({tick_count_, bid, b.position.x, b.position.y, b.anchored, f.x, f.y});
    }
    if (final_row) record.final_metrics = m;
}

void Simulation::record_snapshot() {
    record.snapshots.push_back({tick_count_, render_svg(*this), render_pgm(field)});
}

void Simulation::tick() {
    emit_sources(field, scn.sources, emit_weights_, scn.field.dt);
    field.step();
    ++tick_count_;
    if (tick_count_ % scn.growth_substep == 0) growth_substep();
    if (scn.schedule.metric_every > 0 && tick_count_ % scn.schedule.metric_every == 0)
        record_metrics(false);
    if (scn.schedule.snapshot_every > 0 && tick_count_ % scn.schedule.snapshot_every == 0)
        record_snapshot();
}

void Simulation::finalize() {
    record_metrics(true);
    if (record.snapshots.empty() || record.snapshots.back().tick != tick_count_) record_snapshot();
    record.final_body_positions.clear();
    for (const auto& [bid, b] : bodies) record.final_body_positions[bid] = b.position;
    record.final_branch_count = static_cast<int>(plasm.branches.size());
}

RunRecord Simulation::run_all() {
    while (tick_count_ < scn.schedule.ticks) tick();
    finalize();
    return record;
}

RunRecord run(const Scenario& s) {
    Simulation sim(s);
    return sim.run_all();
}

}  // namespace physarum
