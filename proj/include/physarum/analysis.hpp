#pragma once

#include <utility>
#include <vector>

#include "physarum/core.hpp"

namespace physarum {

class TubeNetwork;

// Site positions; duplicates closer than 1e-6 mm are dropped at ingest.
class PointSet {
  public:
    PointSet() = default;
    explicit PointSet(const std::vector<Vec2>& pts);

    const std::vector<Vec2>& points() const { return pts_; }
    std::size_t size() const { return pts_.size(); }
    Vec2 operator[](std::size_t i) const { return pts_[i]; }

  private:
    std::vector<Vec2> pts_;
};

using Edge = std::pair<int, int>;  // (min index, max index)

struct MstResult {
    std::vector<Edge> edges;
    double total_length = 0.0;
};

// Exact Euclidean MST (Prim over all pairs, lexicographic edge tie-break).
// Throws QueryError on an empty set.
MstResult euclidean_mst(const PointSet& p);

struct ProximityGraphs {
    std::vector<Edge> rng;      // relative neighborhood graph
    std::vector<Edge> gabriel;  // Gabriel graph
};

// Requires |p| >= 2; verifies MST subset-of RNG subset-of Gabriel internally.
ProximityGraphs proximity_graphs(const PointSet& p);

struct Metrics {
    int sites_covered = 0;
    int sites_total = 0;
    bool is_tree = false;
    double total_length = 0.0;
    double mst_length = 0.0;
    double length_ratio = 0.0;  // +inf sentinel when mst_length == 0 with tubes present
    double mean_tortuosity = 0.0;
    double edge_jaccard_vs_rng = 0.0;
};

// Scores an emergent tube network against the exact oracles for `sites`.
Metrics spanning_metrics(const TubeNetwork& net, const PointSet& sites);

}  // namespace physarum
