#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <vector>

#include "physarum/analysis.hpp"
#include "physarum/core.hpp"
#include "physarum/tubes.hpp"

using namespace physarum;

namespace {

// Exhaustive minimum spanning tree: try every (n-1)-subset of edges.
double brute_force_mst(const PointSet& p) {
    const int n = static_cast<int>(p.size());
    std::vector<Edge> all;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) all.push_back({i, j});
    const int m = static_cast<int>(all.size());
    const int k = n - 1;
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    double best = 1e300;
    auto spanning_cost = [&]() -> double {
        std::vector<int> parent(n);
        std::iota(parent.begin(), parent.end(), 0);
        std::function<int(int)> find = [&](int x) {
            while (parent[x] != x) x = parent[x] = parent[parent[x]];
            return x;
        };
        double total = 0.0;
        int merges = 0;
        for (int e : idx) {
            auto [a, b] = all[e];
            int ra = find(a), rb = find(b);
            if (ra == rb) return -1.0;
            parent[ra] = rb;
            ++merges;
            total += distance(p[a], p[b]);
        }
        return merges == n - 1 ? total : -1.0;
    };
    while (true) {
        double c = spanning_cost();
        if (c >= 0.0) best = std::min(best, c);
        // next combination
        int i = k - 1;
        while (i >= 0 && idx[i] == m - k + i) --i;
        if (i < 0) break;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return best;
}

PointSet random_points(Rng& rng, int n, double extent = 50.0) {
    std::vector<Vec2> pts;
    for (int i = 0; i < n; ++i)
        pts.push_back({rng.uniform(-extent, extent), rng.uniform(-extent, extent)});
    return PointSet(pts);
}

std::set<Edge> edge_set(const std::vector<Edge>& e) { return {e.begin(), e.end()}; }

}  // namespace

TEST_CASE("mst of a single point is empty") {
    MstResult r = euclidean_mst(PointSet({{3.0, 4.0}}));
    CHECK(r.edges.empty());
    CHECK(r.total_length == 0.0);
}

TEST_CASE("mst of an empty set throws") {
    CHECK_THROWS_AS(euclidean_mst(PointSet(std::vector<Vec2>{})), QueryError);
}

TEST_CASE("mst of three collinear points is the two short segments") {
    const double d = 7.0;
    MstResult r = euclidean_mst(PointSet({{0.0, 0.0}, {d, 0.0}, {2 * d, 0.0}}));
    REQUIRE(r.edges.size() == 2);
    CHECK(r.total_length == doctest::Approx(2 * d).epsilon(1e-12));
    std::set<Edge> got = edge_set(r.edges);
    CHECK(got.count({0, 1}));
    CHECK(got.count({1, 2}));
}

TEST_CASE("mst equals the exhaustive-enumeration minimum for small sets") {
    Rng rng(2024);
    for (int trial = 0; trial < 25; ++trial) {
        int n = 2 + static_cast<int>(rng.uniform() * 6.0);  // 2..7
        PointSet p = random_points(rng, n);
        MstResult fast = euclidean_mst(p);
        double exact = brute_force_mst(p);
        CHECK(fast.total_length == doctest::Approx(exact).epsilon(1e-9));
        CHECK(fast.edges.size() == p.size() - 1);
    }
}

TEST_CASE("equilateral triangle: rng and gabriel keep all three edges") {
    PointSet p({{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}});
    ProximityGraphs g = proximity_graphs(p);
    CHECK(g.rng.size() == 3);
    CHECK(g.gabriel.size() == 3);
}

TEST_CASE("unit square: gabriel graph is the perimeter only") {
    PointSet p({{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}});
    ProximityGraphs g = proximity_graphs(p);
    std::set<Edge> gab = edge_set(g.gabriel);
    CHECK(gab.size() == 4);
    CHECK(gab.count({0, 1}));
    CHECK(gab.count({1, 2}));
    CHECK(gab.count({2, 3}));
    CHECK(gab.count({0, 3}));
    CHECK_FALSE(gab.count({0, 2}));  // diagonals excluded
    CHECK_FALSE(gab.count({1, 3}));
}

TEST_CASE("mst is nested inside rng which is nested inside gabriel") {
    Rng rng(555);
    for (int trial = 0; trial < 30; ++trial) {
        int n = 2 + static_cast<int>(rng.uniform() * 9.0);  // 2..10
        PointSet p = random_points(rng, n);
        MstResult mst = euclidean_mst(p);
        ProximityGraphs g = proximity_graphs(p);
        std::set<Edge> r = edge_set(g.rng), gab = edge_set(g.gabriel);
        for (const Edge& e : mst.edges) CHECK(r.count(e));
        for (const Edge& e : g.rng) CHECK(gab.count(e));
    }
}

TEST_CASE("metrics on a straight-tube mst network score ratio 1 and tree") {
    PointSet sites({{0.0, 0.0}, {10.0, 0.0}, {5.0, 8.0}});
    MstResult mst = euclidean_mst(sites);
    TubeNetwork net;
    std::vector<int> ids;
    for (std::size_t i = 0; i < sites.size(); ++i)
        ids.push_back(net.add_node(NodeKind::Site, sites[i], static_cast<int>(i)));
    for (const Edge& e : mst.edges)
        net.add_tube(ids[e.first], ids[e.second], {sites[e.first], sites[e.second]});
    Metrics m = spanning_metrics(net, sites);
    CHECK(m.sites_covered == 3);
    CHECK(m.sites_total == 3);
    CHECK(m.is_tree);
    CHECK(m.length_ratio == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(m.mean_tortuosity == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("metrics report partial coverage when a site is missing") {
    PointSet sites({{0.0, 0.0}, {10.0, 0.0}, {5.0, 8.0}});
    TubeNetwork net;
    int a = net.add_node(NodeKind::Site, sites[0], 0);
    int b = net.add_node(NodeKind::Site, sites[1], 1);
    net.add_tube(a, b, {sites[0], sites[1]});
    Metrics m = spanning_metrics(net, sites);
    CHECK(m.sites_covered == 2);
    CHECK(m.sites_total == 3);
}
