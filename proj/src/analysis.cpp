#include "physarum/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "physarum/tubes.hpp"

namespace physarum {

PointSet::PointSet(const std::vector<Vec2>& pts) {
    for (Vec2 p : pts) {
        bool dup = false;
        for (Vec2 q : pts_)
            if (distance(p, q) < 1e-6) {
                dup = true;
                break;
            }
        if (!dup) pts_.push_back(p);
    }
}

MstResult euclidean_mst(const PointSet& p) {
    const auto& pts = p.points();
    if (pts.empty()) throw QueryError("euclidean_mst on an empty point set");
    const int n = static_cast<int>(pts.size());
    MstResult out;
    if (n == 1) return out;

    std::vector<bool> in_tree(n, false);
    in_tree[0] = true;
    for (int step = 1; step < n; ++step) {
        double best = std::numeric_limits<double>::infinity();
        Edge best_edge{-1, -1};
        for (int i = 0; i < n; ++i) {
            if (!in_tree[i]) continue;
            for (int j = 0; j < n; ++j) {
                if (in_tree[j]) continue;
                double d = distance(pts[i], pts[j]);
                Edge e{std::min(i, j), std::max(i, j)};
                if (d < best - 1e-15 || (std::abs(d - best) <= 1e-15 && e < best_edge)) {
                    best = d;
                    best_edge = e;
                }
            }
        }
        in_tree[best_edge.first] = true;
        in_tree[best_edge.second] = true;
        out.edges.push_back(best_edge);
        out.total_length += best;
    }
    std::sort(out.edges.begin(), out.edges.end());
    return out;
}

ProximityGraphs proximity_graphs(const PointSet& p) {
    const auto& pts = p.points();
    if (pts.size() < 2) throw QueryError("proximity_graphs requires at least 2 points");
    const int n = static_cast<int>(pts.size());
    ProximityGraphs out;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double dij = distance(pts[i], pts[j]);
            bool rng_edge = true, gabriel_edge = true;
            Vec2 mid = (pts[i] + pts[j]) * 0.5;
            for (int k = 0; k < n && (rng_edge || gabriel_edge); ++k) {
                if (k == i || k == j) continue;
                // Lune blocking is strict (ties keep the edge, e.g. equilateral
                // triangles); the diameter circle is closed (boundary points
                // block, e.g. square diagonals). Relative slack absorbs
                // floating-point jitter on exact-tie geometries.
                if (std::max(distance(pts[i], pts[k]), distance(pts[j], pts[k])) <
                    dij * (1.0 - 1e-9))
                    rng_edge = false;
                if (distance(mid, pts[k]) <= (dij / 2.0) * (1.0 + 1e-9)) gabriel_edge = false;
            }
            if (rng_edge) out.rng.push_back({i, j});
            if (gabriel_edge) out.gabriel.push_back({i, j});
        }

    // Internal nesting check: MST subset RNG subset Gabriel.
    std::set<Edge> rng_set(out.rng.begin(), out.rng.end());
    std::set<Edge> gab_set(out.gabriel.begin(), out.gabriel.end());
    for (const Edge& e : euclidean_mst(p).edges)
        if (!rng_set.count(e)) throw QueryError("internal error: MST edge missing from RNG");
    for (const Edge& e : out.rng)
        if (!gab_set.count(e)) throw QueryError("internal error: RNG edge missing from Gabriel");
    return out;
}

Metrics spanning_metrics(const TubeNetwork& net, const PointSet& sites) {
    Metrics m;
    m.sites_total = static_cast<int>(sites.size());

    // Map network site/attachment nodes onto point-set indices by proximity.
    std::map<int, int> node_to_site;
    for (const auto& [nid, node] : net.nodes) {
        if (node.kind == NodeKind::Junction) continue;
        int best = -1;
        double best_d = 1.0;  // a site must be within 1 mm of its node
        for (std::size_t s = 0; s < sites.size(); ++s) {
            double d = distance(node.position, sites[s]);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(s);
            }
        }
        if (best >= 0) node_to_site[nid] = best;
    }
    std::set<int> covered;
    for (auto& [nid, s] : node_to_site) covered.insert(s);
    m.sites_covered = static_cast<int>(covered.size());

    m.is_tree = !net.nodes.empty() && net.connected() &&
                net.tubes.size() == net.nodes.size() - 1;

    double total = 0.0, tort_sum = 0.0;
    int tort_n = 0;
    for (const auto& [tid, t] : net.tubes) {
        total += polyline_length(t.path);
        double chord = distance(t.path.front(), t.path.back());
        if (chord > 1e-12) {
            tort_sum += polyline_length(t.path) / chord;
            ++tort_n;
        }
    }
    m.total_length = total;
    m.mean_tortuosity = tort_n > 0 ? tort_sum / tort_n : 0.0;

    if (sites.size() >= 1) m.mst_length = euclidean_mst(sites).total_length;
    if (m.mst_length > 1e-12)
        m.length_ratio = m.total_length / m.mst_length;
    else
        m.length_ratio = net.tubes.empty() ? 0.0 : std::numeric_limits<double>::infinity();

    // Site-to-site adjacency through junctions, compared against the RNG.
    if (sites.size() >= 2) {
        std::set<Edge> net_edges;
        // BFS from each site node through junction nodes only.
        for (const auto& [start, s0] : node_to_site) {
            std::set<int> seen{start};
            std::vector<int> stack{start};
            while (!stack.empty()) {
                int n = stack.back();
                stack.pop_back();
                for (const auto& [tid, t] : net.tubes) {
                    int other = t.node_a == n ? t.node_b : (t.node_b == n ? t.node_a : -1);
                    if (other < 0 || seen.count(other)) continue;
                    auto site_it = node_to_site.find(other);
                    if (site_it != node_to_site.end()) {
                        if (site_it->second != s0)
                            net_edges.insert({std::min(s0, site_it->second),
                                              std::max(s0, site_it->second)});
                        seen.insert(other);  // stop at sites
                    } else {
                        seen.insert(other);
                        stack.push_back(other);
                    }
                }
            }
        }
        auto prox = proximity_graphs(sites);
        std::set<Edge> rng_set(prox.rng.begin(), prox.rng.end());
        std::set<Edge> uni = net_edges;
        uni.insert(rng_set.begin(), rng_set.end());
        int inter = 0;
        for (const Edge& e : net_edges)
            if (rng_set.count(e)) ++inter;
        m.edge_jaccard_vs_rng = uni.empty() ? 1.0 : static_cast<double>(inter) / uni.size();
    }
    return m;
}

}  // namespace physarum
