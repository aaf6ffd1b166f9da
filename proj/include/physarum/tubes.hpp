#pragma once

#include <map>
#include <optional>
#include <vector>

#include "physarum/core.hpp"

namespace physarum {

class PlasmodiumState;

enum class NodeKind { Site, Junction, BodyAttachment };

struct TubeNode {
    int id = -1;
    NodeKind kind = NodeKind::Junction;
    Vec2 position;
    int site_id = -1;  // source id for Site nodes; -1 marks the seed site
    int body_id = -1;  // for BodyAttachment nodes
};

struct Tube {
    int id = -1;
    int node_a = -1;
    int node_b = -1;
    std::vector<Vec2> path;  // path.front()/back() coincide with node positions
    double rest_ratio = 1.0;
    double stiffness = 1.0;
    double contract_gain = 1.0;  // per-tube multiplier on lambda (pull maneuvers)
};

class TubeNetwork {
  public:
    std::map<int, TubeNode> nodes;
    std::map<int, Tube> tubes;
    std::map<int, double> tensions;  // tube id -> k * (length - chord) / chord

    int add_node(NodeKind kind, Vec2 pos, int site_id = -1, int body_id = -1);
    int add_tube(int a, int b, std::vector<Vec2> path, double stiffness = 1.0);
    int degree(int node) const;
    std::vector<int> tubes_at(int node) const;
    bool connected() const;  // single component over all nodes
    // Re-pin tube path endpoints onto current node positions (bodies move).
    void sync_endpoints();

  private:
    int next_node_ = 0;
    int next_tube_ = 0;
};

// length(path) / chord(endpoints); throws QueryError on coincident endpoints.
double tortuosity(const Tube& t);

// Rewarded branches -> tubes; branch points -> junctions; seed and engulfed
// sources -> sites; body-hosted marks -> attachment nodes. Paths are
// simplified by collinear-point removal (0.05 mm tolerance).
TubeNetwork extract_network(const PlasmodiumState& state);

// Removes degree-1 non-site dead ends and merges degree-2 junctions.
TubeNetwork prune_redundant(TubeNetwork net);

// Linear relaxation of interior path vertices toward the chord; fills
// net.tensions. Endpoint nodes never move here. lambda * dt must be < 1.
void contract_step(TubeNetwork& net, double dt, double lambda);

}  // namespace physarum
