#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "physarum/analysis.hpp"
#include "physarum/arena.hpp"
#include "physarum/graphstore.hpp"
#include "physarum/mechanics.hpp"
#include "physarum/plasmodium.hpp"
#include "physarum/tubes.hpp"

namespace physarum {

struct FieldParams {
    double diffusion = 0.6;  // mm^2/min
    double decay = 0.005;    // 1/min
    double dt = 0.1;         // min per tick
};

struct MechParams {
    double push_magnitude = 0.05;
    double push_range = 3.0;   // mm
    double stiffness = 1.0;
    double contract_lambda = 0.05;  // 1/min
};

struct SeedSpec {
    int body_id = -1;  // >= 0: seed at that body's centroid
    Vec2 position;
    double initial_mass = 10.0;
};

struct Schedule {
    long ticks = 0;
    long snapshot_every = 0;  // 0: initial + final only
    long metric_every = 600;  // ticks between metric rows
};

struct Scenario {
    std::string name = "custom";
    ArenaSpec arena;
    std::vector<NutrientSource> sources;
    std::vector<FloatingBody> bodies;
    SeedSpec seed;
    GrowthParams growth;
    FieldParams field;
    MechParams mech;
    double mass_budget = 250000.0;
    int growth_substep = 10;  // field ticks per growth/mechanics step
    PreferenceTable preference{{"plain", 1.0}};
    Schedule schedule;
    uint64_t rng_seed = 1;

    void validate() const;     // throws ScenarioError / ConfigError
    std::string canonical() const;  // canonical text form for hashing
    uint64_t hash() const;
};

// Strict loader: unknown keys are rejected, errors carry field context.
Scenario load_scenario(const std::string& path);
Scenario scenario_from_json_text(const std::string& text, const std::string& origin = "<string>");

// fig2_links, fig3_tree3, fig4_bare_seed, fig5_straighten, fig6_push,
// fig7_pull, tank_explore. Throws ScenarioError listing valid names.
Scenario builtin(const std::string& name);
std::vector<std::string> builtin_names();

struct EventRow {
    long tick = 0;
    double time_min = 0.0;
    std::string kind;
    std::string detail;
};

struct MetricsRow {
    long tick = 0;
    double time_min = 0.0;
    Metrics metrics;
    bool final_row = false;
};

struct BodyRow {
    long tick = 0;
    int body = -1;
    double x = 0, y = 0;
    bool anchored = false;
    double fx = 0, fy = 0;
};

struct Snapshot {
    long tick = 0;
    std::string svg;
    std::string pgm;  // binary P5 payload
};

struct RunRecord {
    Scenario scenario;
    uint64_t scenario_hash = 0;
    std::vector<MetricsRow> metrics;
    std::vector<EventRow> events;
    std::vector<BodyRow> bodies;
    std::vector<Snapshot> snapshots;
    Metrics final_metrics;
    long completion_tick = -1;  // first tick with every site engulfed
    std::map<int, Vec2> final_body_positions;
    int final_branch_count = 0;
};

// One scheduled graphstore maneuver (push or pull), executed over many ticks.
struct Maneuver {
    enum class Kind { Push, Pull } kind = Kind::Push;
    int node = -1;
    Vec2 direction;        // push
    int target_node = -1;  // pull
    double duration = 0.0;  // min
    double elapsed = 0.0;
    bool done = false;
    // push bookkeeping
    Vec2 probe_pos;
    bool probe_active = false;
    int pull_tube = -1;
};

// Deterministic tick loop. Public state is intentionally inspectable so tests
// can assert on internals mid-run.
class Simulation {
  public:
    explicit Simulation(const Scenario& s);

    void tick();
    RunRecord run_all();  // runs schedule.ticks and finalizes the record

    double time_min() const { return tick_count_ * scn.field.dt; }
    long tick_count() const { return tick_count_; }

    PointSet site_points() const;  // positions of food-bearing sites
    void rebuild_network();        // extract + prune from the current state
    void capture_overlaps();       // split live tubes over free bodies
    void record_metrics(bool final_row);
    void record_snapshot();
    void finalize();

    // graphstore command execution (`ops` scripts)
    StorageGraph storage{5};
    std::map<int, Binding> storage_bindings;  // storage node -> binding
    std::vector<Maneuver> queue;
    std::vector<EventRow> op_trace;
    void enqueue_push(int storage_node, Vec2 direction, double duration);
    void enqueue_pull(int storage_node, int target_storage_node, double window);

    Scenario scn;
    ChemoField field;
    PlasmodiumState plasm;
    TubeNetwork net;
    std::map<int, FloatingBody> bodies;
    ForceAccumulator forces;
    Rng rng;
    RunRecord record;

  private:
    void growth_substep();
    void mechanics_substep(double dt);
    void maneuver_substep(double dt);
    void sync_sources();
    void sync_attachments();
    Vec2 body_centroid(int id) const;

    long tick_count_ = 0;
    long last_reward_version_ = -1;
    long substeps_since_rebuild_ = 0;
    std::vector<double> emit_weights_;
};

RunRecord run(const Scenario& s);

// metrics.csv, events.csv, bodies.csv, snapshots/NNNNNN.{svg,pgm},
// run.summary; atomic write-temp-rename per file.
void write_outputs(const RunRecord& r, const std::string& dir);

// Op script: one `OPNAME arg...` per line, UTF-8, '#' comments. Returns the
// execution trace (also appended to record events by the caller).
std::vector<EventRow> run_ops(Simulation& sim, const std::string& script_text);

std::string render_svg(const Simulation& sim);
std::string render_pgm(const ChemoField& field);

}  // namespace physarum
