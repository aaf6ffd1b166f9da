#pragma once

#include <map>
#include <set>
#include <vector>

#include "physarum/arena.hpp"
#include "physarum/core.hpp"
#include "physarum/tubes.hpp"

namespace physarum {

// Rigid disc (or convex polygon) floating on the water plane.
struct FloatingBody {
    int id = -1;
    double radius = 2.5;            // mm; circumradius when polygon is set
    std::vector<Vec2> polygon;      // local-frame vertices, empty for a disc
    Vec2 position;
    double drag = 1.0;              // force * min / mm
    bool anchored = false;
    std::set<int> attachments;      // tube node ids tracking this body
    bool carries_food = false;
};

class ForceAccumulator {
  public:
    void clear() { force_.clear(); }
    void add(int body_id, Vec2 f) { force_[body_id] += f; }
    Vec2 net(int body_id) const {
        auto it = force_.find(body_id);
        return it == force_.end() ? Vec2{} : it->second;
    }
    const std::map<int, Vec2>& all() const { return force_; }

  private:
    std::map<int, Vec2> force_;
};

// Binds an attachment node to a body; idempotent. Throws ScenarioError when
// the node does not reference this body.
void attach_tube(FloatingBody& body, TubeNode& node);

// Ripple push: p_mag * max(0, 1 - d/p_range) away from the tip. Coincident
// tip and centroid push along the tip's heading (tie-break).
Vec2 push_from_tip(Vec2 tip_pos, const FloatingBody& body, double p_mag, double p_range,
                   Vec2 tip_heading = {1.0, 0.0});

// Tube tension applied to free bodies through their attachment endpoints,
// directed along the tube tangent into the tube. Tube-id order.
void pull_from_tension(const TubeNetwork& net, const std::map<int, FloatingBody>& bodies,
                       ForceAccumulator& acc);

// Overdamped update dx = (F/drag) * dt for free bodies; anchored bodies never
// move. Bodies are clamped inside the arena and disc-disc overlap is resolved
// by minimal separation along the centroid line.
void integrate_bodies(std::map<int, FloatingBody>& bodies, const ForceAccumulator& forces,
                      double dt, const ArenaSpec& arena);

}  // namespace physarum
