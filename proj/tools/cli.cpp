#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "physarum/scenario.hpp"

using namespace physarum;

namespace {

Scenario resolve_scenario(const std::string& ref) {
    if (ref.rfind("builtin:", 0) == 0) return builtin(ref.substr(8));
    return load_scenario(ref);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void print_summary(const RunRecord& r, std::ostream& os) {
    os << r.scenario.name << " seed=" << r.scenario.rng_seed
       << " sites=" << r.final_metrics.sites_covered << "/" << r.final_metrics.sites_total
       << " tree=" << (r.final_metrics.is_tree ? 1 : 0)
       << " ratio=" << r.final_metrics.length_ratio
       << " completion_tick=" << r.completion_tick << "\n";
}

int cmd_run(const std::string& ref, uint64_t seed, bool seed_set, const std::string& out,
            long ticks, long snapshot_every) {
    Scenario s = resolve_scenario(ref);
    if (seed_set) s.rng_seed = seed;
    if (ticks >= 0) s.schedule.ticks = ticks;
    if (snapshot_every >= 0) s.schedule.snapshot_every = snapshot_every;
    s.validate();
    RunRecord r = run(s);
    if (!out.empty()) write_outputs(r, out);
    print_summary(r, std::cout);
    return 0;
}

int cmd_batch(const std::string& ref, const std::string& seeds, const std::string& out,
              long ticks) {
    auto dots = seeds.find("..");
    if (dots == std::string::npos)
        throw ScenarioError("--seeds expects a range like 1..20, got '" + seeds + "'");
    uint64_t lo = std::stoull(seeds.substr(0, dots));
    uint64_t hi = std::stoull(seeds.substr(dots + 2));
    if (hi < lo) throw ScenarioError("--seeds range is empty");
    Scenario base = resolve_scenario(ref);
    if (ticks >= 0) base.schedule.ticks = ticks;
    for (uint64_t seed = lo; seed <= hi; ++seed) {
        Scenario s = base;
        s.rng_seed = seed;
        s.validate();
        RunRecord r = run(s);
        if (!out.empty()) write_outputs(r, out + "/seed_" + std::to_string(seed));
        print_summary(r, std::cout);
    }
    return 0;
}

int cmd_mst(const std::string& csv_path) {
    std::vector<Vec2> raw;
    std::ifstream in(csv_path);
    if (!in) throw IoError("cannot open " + csv_path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double x, y;
        if (ls >> x >> y) raw.push_back({x, y});
    }
    PointSet pts(raw);
    auto mst = euclidean_mst(pts);
    for (const auto& [a, b] : mst.edges)
        std::cout << a << "," << b << "," << (pts[b] - pts[a]).norm() << "\n";
    std::cout << "# total=" << mst.total_length << "\n";
    return 0;
}

int cmd_ops(const std::string& ref, const std::string& script, const std::string& out) {
    Scenario s = resolve_scenario(ref);
    s.validate();
    Simulation sim(s);
    auto trace = run_ops(sim, slurp(script));
    for (const EventRow& e : trace)
        std::cout << e.tick << " " << e.kind << " " << e.detail << "\n";
    if (!out.empty()) {
        sim.finalize();
        for (const EventRow& e : trace) sim.record.events.push_back(e);
        write_outputs(sim.record, out);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"physarum water-surface computing simulator"};
    app.require_subcommand(1);

    std::string ref, out, seeds_range, points_csv, script;
    uint64_t seed = 0;
    long ticks = -1, snapshot_every = -1;
    bool seed_set = false;

    auto* run_cmd = app.add_subcommand("run", "run one scenario");
    run_cmd->add_option("scenario", ref, "scenario file or builtin:NAME")->required();
    run_cmd->add_option("--seed", seed)->each([&](const std::string&) { seed_set = true; });
    run_cmd->add_option("--out", out);
    run_cmd->add_option("--ticks", ticks);
    run_cmd->add_option("--snapshot-every", snapshot_every);

    auto* batch_cmd = app.add_subcommand("batch", "run a scenario over a seed range");
    batch_cmd->add_option("scenario", ref)->required();
    batch_cmd->add_option("--seeds", seeds_range, "inclusive range A..B")->required();
    batch_cmd->add_option("--out", out);
    batch_cmd->add_option("--ticks", ticks);

    auto* mst_cmd = app.add_subcommand("mst", "minimum spanning tree of a point csv");
    mst_cmd->add_option("points", points_csv)->required();

    auto* ops_cmd = app.add_subcommand("ops", "execute a storage-graph op script");
    ops_cmd->add_option("scenario", ref)->required();
    ops_cmd->add_option("script", script)->required();
    ops_cmd->add_option("--out", out);

    try {
        app.parse(argc, argv);
        if (run_cmd->parsed()) return cmd_run(ref, seed, seed_set, out, ticks, snapshot_every);
        if (batch_cmd->parsed()) return cmd_batch(ref, seeds_range, out, ticks);
        if (mst_cmd->parsed()) return cmd_mst(points_csv);
        if (ops_cmd->parsed()) return cmd_ops(ref, script, out);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 2 : 0;
    } catch (const ConfigError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const ScenarioError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
