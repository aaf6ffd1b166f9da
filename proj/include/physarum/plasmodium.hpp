#pragma once

#include <map>
#include <set>
#include <span>
#include <vector>

#include "physarum/arena.hpp"
#include "physarum/core.hpp"

namespace physarum {

struct GrowthParams {
    double step_length = 0.5;        // mm between recorded path vertices
    double speed = 0.08;             // mm/min (~5 mm/h)
    double branch_prob = 0.03;       // per growth step
    double sensor_angle = 0.5235987755982988;  // 30 deg
    double sensor_offset = 1.5;      // mm
    double wander_sigma = 0.15;      // rad
    double gradient_threshold = 1.5e-3;  // concentration/mm
    double density_cap = 4.0;        // per-cell occupancy maximum
    double deposit_rate = 1.0;       // occupancy laid down per newly entered cell
    double tip_radius = 0.5;         // mm, deposition footprint around the tip
    double reward_gain = 500.0;      // mass budget added per engulfed source
    double retract_age = 240.0;      // min without progress before a leaf retracts

    void validate() const;  // throws ConfigError
};

struct Tip {
    int id = -1;
    int branch = -1;
    Vec2 position;
    Vec2 heading{1.0, 0.0};
    double born = 0.0;          // min
    double last_advance = 0.0;  // min
    bool alive = true;
    bool stalled = false;
};

// A site/attachment event pinned onto a branch path.
struct BranchMark {
    int path_index = 0;
    int source_id = -1;
    int body_id = -1;
};

struct Branch {
    int id = -1;
    int parent = -1;       // -1 for the root
    int spawn_index = 0;   // vertex index on the parent path
    std::vector<Vec2> path;
    bool rewarded = false;
    double created = 0.0;
    double last_active = 0.0;
    int children = 0;
    std::vector<BranchMark> marks;
    std::vector<std::pair<int32_t, float>> deposits;  // cell -> occupancy laid down
    double advanced = 0.0;  // distance since the last appended vertex
};

struct EngulfEvent {
    int source_id = -1;
    int branch_id = -1;
    int body_id = -1;
    double time = 0.0;
};

class PlasmodiumState {
  public:
    std::map<int, Branch> branches;
    std::vector<Tip> tips;  // kept sorted by tip id
    std::vector<double> occupancy;
    int nx = 0, ny = 0;
    double cell_size = 0.5;
    ArenaSpec arena;
    std::set<int> engulfed_sources;
    double mass_budget = 0.0;
    double total_occupancy = 0.0;
    double now = 0.0;  // min
    Vec2 seed_position;
    int next_branch_id = 0;
    int next_tip_id = 0;
    // version bumps whenever the rewarded topology changes (new reward/mark)
    long reward_version = 0;

    int cell_of(Vec2 p) const;
    double occupancy_at(Vec2 p) const;
    std::vector<int> footprint_cells(Vec2 p, double radius) const;
    int live_tip_count() const;
    bool rewarded_branch(int id) const;
};

// k0 = 6 initial tips spread uniformly over 2*pi. Throws ScenarioError on a
// seed outside the arena or non-positive initial mass.
PlasmodiumState seed_at(const ArenaSpec& arena, Vec2 where, double initial_mass,
                        const GrowthParams& params, double budget);

// New unit heading for one tip: gradient-locked toward the best of three
// sensor directions, otherwise Gaussian wander. Always consumes one draw.
Vec2 sense_and_steer(const Tip& tip, const ChemoField& field, const GrowthParams& params, Rng& rng);

// Advance all live tips by speed*dt, deposit occupancy, spawn branches,
// enforce the mass budget (oldest unrewarded tips die first).
void grow_step(PlasmodiumState& state, const ChemoField& field, const GrowthParams& params,
               Rng& rng, double dt);

// Sources within step_length of a live tip are engulfed (idempotent);
// rewards propagate to all ancestor branches.
std::vector<EngulfEvent> engulf_check(PlasmodiumState& state, std::span<const NutrientSource> sources,
                                      const GrowthParams& params);

// Delete unrewarded leaf branches idle for longer than retract_age, refunding
// their occupancy; cascades until no such leaf remains. The root survives.
// Deleted branch ids are appended to `removed` when given.
void retract_unrewarded(PlasmodiumState& state, double now, const GrowthParams& params,
                        std::vector<int>* removed = nullptr);

}  // namespace physarum
