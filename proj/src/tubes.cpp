#include "physarum/tubes.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "physarum/plasmodium.hpp"

namespace physarum {

int TubeNetwork::add_node(NodeKind kind, Vec2 pos, int site_id, int body_id) {
    int id = next_node_++;
    nodes[id] = TubeNode{id, kind, pos, site_id, body_id};
    return id;
}

int TubeNetwork::add_tube(int a, int b, std::vector<Vec2> path, double stiffness) {
    int id = next_tube_++;
    Tube t;
    t.id = id;
    t.node_a = a;
    t.node_b = b;
    t.path = std::move(path);
    t.stiffness = stiffness;
    tubes[id] = std::move(t);
    return id;
}

int TubeNetwork::degree(int node) const {
    int d = 0;
    for (const auto& [id, t] : tubes)
        if (t.node_a == node || t.node_b == node) ++d;
    return d;
}

std::vector<int> TubeNetwork::tubes_at(int node) const {
    std::vector<int> out;
    for (const auto& [id, t] : tubes)
        if (t.node_a == node || t.node_b == node) out.push_back(id);
    return out;
}

bool TubeNetwork::connected() const {
    if (nodes.empty()) return true;
    std::set<int> seen{nodes.begin()->first};
    std::vector<int> stack{nodes.begin()->first};
    while (!stack.empty()) {
        int n = stack.back();
        stack.pop_back();
        for (const auto& [id, t] : tubes) {
            int other = t.node_a == n ? t.node_b : (t.node_b == n ? t.node_a : -1);
            if (other >= 0 && seen.insert(other).second) stack.push_back(other);
        }
    }
    return seen.size() == nodes.size();
}

void TubeNetwork::sync_endpoints() {
    for (auto& [id, t] : tubes) {
        if (t.path.size() < 2) continue;
        t.path.front() = nodes.at(t.node_a).position;
        t.path.back() = nodes.at(t.node_b).position;
    }
}

double tortuosity(const Tube& t) {
    if (t.path.size() < 2) throw QueryError("tube path has fewer than 2 points");
    double chord = distance(t.path.front(), t.path.back());
    if (chord < 1e-12) throw QueryError("tortuosity undefined: coincident tube endpoints");
    return polyline_length(t.path) / chord;
}

namespace {

// Remove interior points within `tol` of the local chord.
std::vector<Vec2> simplify_collinear(const std::vector<Vec2>& path, double tol) {
    if (path.size() <= 2) return path;
    std::vector<Vec2> out;
    out.push_back(path.front());
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        Vec2 a = out.back(), b = path[i], c = path[i + 1];
        Vec2 ac = c - a;
        double len = ac.norm();
        double dev = len < 1e-12 ? distance(a, b) : std::abs(ac.cross(b - a)) / len;
        if (dev > tol) out.push_back(b);
    }
    out.push_back(path.back());
    return out;
}

constexpr double kSimplifyTol = 0.05;  // mm

}  // namespace

TubeNetwork extract_network(const PlasmodiumState& state) {
    TubeNetwork net;

    std::vector<int> rewarded;
    for (const auto& [id, br] : state.branches)
        if (br.rewarded && br.parent >= 0) rewarded.push_back(id);
    std::sort(rewarded.begin(), rewarded.end());

    // Seed site node always exists.
    int seed_node = net.add_node(NodeKind::Site, state.seed_position, -1, -1);
    if (rewarded.empty()) return net;

    // Cut points on each rewarded branch: rewarded-child spawn points and
    // marks; keyed (branch, path index) -> node id.
    std::map<std::pair<int, int>, int> cut_nodes;
    auto root_it = std::min_element(state.branches.begin(), state.branches.end(),
                                    [](auto& a, auto& b) { return a.first < b.first; });
    int root_id = root_it->first;
    cut_nodes[{root_id, 0}] = seed_node;

    std::map<int, std::set<int>> cuts;  // branch -> sorted interior cut indices
    for (int id : rewarded) {
        const Branch& br = state.branches.at(id);
        // spawn point on the parent
        if (br.parent >= 0 && state.branches.at(br.parent).rewarded) {
            int si = std::min<int>(br.spawn_index,
                                   static_cast<int>(state.branches.at(br.parent).path.size()) - 1);
            cuts[br.parent].insert(si);
        }
        for (const BranchMark& m : br.marks) cuts[id].insert(m.path_index);
    }

    auto node_for = [&](int branch, int index) -> int {
        // Root-branch cuts collapse onto the seed node (its path is a point).
        if (branch == root_id) return seed_node;
        auto key = std::make_pair(branch, index);
        auto it = cut_nodes.find(key);
        if (it != cut_nodes.end()) return it->second;
        const Branch& br = state.branches.at(branch);
        NodeKind kind = NodeKind::Junction;
        int site = -1, body = -1;
        for (const BranchMark& m : br.marks)
            if (m.path_index == index) {
                if (m.body_id >= 0) {
                    kind = NodeKind::BodyAttachment;
                    body = m.body_id;
                    site = m.source_id;
                } else {
                    kind = NodeKind::Site;
                    site = m.source_id;
                }
            }
        Vec2 pos = br.path[static_cast<std::size_t>(std::min<int>(index, br.path.size() - 1))];
        int id = net.add_node(kind, pos, site, body);
        cut_nodes[key] = id;
        return id;
    };

    for (int id : rewarded) {
        const Branch& br = state.branches.at(id);
        int last_index = static_cast<int>(br.path.size()) - 1;
        std::vector<int> stops;
        stops.push_back(0);
        if (auto it = cuts.find(id); it != cuts.end())
            for (int c : it->second)
                if (c > 0 && c < last_index) stops.push_back(c);
        stops.push_back(last_index);
        stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

        // Start node: where this branch leaves its parent.
        const Branch& parent = state.branches.at(br.parent);
        int start_node = parent.rewarded
                             ? node_for(br.parent, std::min<int>(br.spawn_index,
                                                                 static_cast<int>(parent.path.size()) - 1))
                             : seed_node;

        int prev_node = start_node;
        int prev_index = 0;
        for (std::size_t s = 1; s < stops.size(); ++s) {
            int idx = stops[s];
            bool is_cut = idx == last_index || cuts[id].count(idx);
            if (!is_cut) continue;
            // End-of-path stop only becomes a node if it carries a mark or the
            // branch has rewarded children there; bare tails become degree-1
            // junctions and are pruned later.
            int end_node = node_for(id, idx);
            std::vector<Vec2> path(br.path.begin() + prev_index, br.path.begin() + idx + 1);
            path.insert(path.begin(), net.nodes.at(prev_node).position);
            path.push_back(net.nodes.at(end_node).position);
            path = simplify_collinear(path, kSimplifyTol);
            if (path.size() >= 2 && !(prev_node == end_node && polyline_length(path) < kSimplifyTol))
                net.add_tube(prev_node, end_node, std::move(path));
            prev_node = end_node;
            prev_index = idx;
        }
    }
    return net;
}

TubeNetwork prune_redundant(TubeNetwork net) {
    bool changed = true;
    while (changed) {
        changed = false;
        // Degree-1 dead-end junctions.
        for (auto it = net.nodes.begin(); it != net.nodes.end();) {
            if (it->second.kind == NodeKind::Junction && net.degree(it->first) <= 1) {
                for (int tid : net.tubes_at(it->first)) {
                    net.tubes.erase(tid);
                    net.tensions.erase(tid);
                }
                it = net.nodes.erase(it);
                changed = true;
            } else {
                ++it;
            }
        }
        // Degree-2 junction merge.
        for (auto it = net.nodes.begin(); it != net.nodes.end(); ++it) {
            if (it->second.kind != NodeKind::Junction) continue;
            auto tids = net.tubes_at(it->first);
            if (tids.size() != 2) continue;
            Tube& t1 = net.tubes.at(tids[0]);
            Tube& t2 = net.tubes.at(tids[1]);
            int n = it->first;
            int a = t1.node_a == n ? t1.node_b : t1.node_a;
            int b = t2.node_a == n ? t2.node_b : t2.node_a;
            if (a == b && a != n) continue;  // would create a duplicate edge
            std::vector<Vec2> p1 = t1.path, p2 = t2.path;
            if (t1.node_b != n) std::reverse(p1.begin(), p1.end());
            if (t2.node_a != n) std::reverse(p2.begin(), p2.end());
            p1.insert(p1.end(), p2.begin() + 1, p2.end());
            net.tubes.erase(tids[0]);
            net.tubes.erase(tids[1]);
            net.tensions.erase(tids[0]);
            net.tensions.erase(tids[1]);
            net.nodes.erase(it);
            net.add_tube(a, b, simplify_collinear(p1, kSimplifyTol));
            changed = true;
            break;  // iterators invalidated
        }
    }
    return net;
}

void contract_step(TubeNetwork& net, double dt, double lambda) {
    net.sync_endpoints();
    for (auto& [id, t] : net.tubes) {
        double f = lambda * t.contract_gain * dt;
        if (!(f < 1.0 + 1e-12)) throw ConfigError("contract_step requires lambda * dt < 1");
        if (f > 1.0) f = 1.0;
        if (t.path.size() > 2) {
            Vec2 a = t.path.front(), b = t.path.back();
            const std::size_t m = t.path.size() - 1;
            for (std::size_t i = 1; i < m; ++i) {
                Vec2 target = a + (b - a) * (static_cast<double>(i) / static_cast<double>(m));
                t.path[i] += (target - t.path[i]) * f;
            }
        }
        double chord = distance(t.path.front(), t.path.back());
        double len = polyline_length(t.path);
        net.tensions[id] = chord < 1e-12 ? 0.0 : std::max(0.0, t.stiffness * (len - chord) / chord);
    }
}

}  // namespace physarum
