#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "physarum/scenario.hpp"

namespace physarum {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(12) << v;
    return os.str();
}

void write_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << content;
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw IoError("rename failed for " + path.string() + ": " + ec.message());
}

std::string hash_header(const RunRecord& r) {
    std::ostringstream os;
    os << "# scenario_hash=" << std::hex << r.scenario_hash << std::dec << "\n";
    return os.str();
}

}  // namespace

std::string render_pgm(const ChemoField& field) {
    auto grid = field.attractant();
    double peak = 0.0;
    for (double v : grid) peak = std::max(peak, v);
    std::ostringstream os;
    os << "P5\n" << field.nx() << " " << field.ny() << "\n255\n";
    // Row-major, max-normalized per frame; top row first.
    for (int iy = field.ny() - 1; iy >= 0; --iy)
        for (int ix = 0; ix < field.nx(); ++ix) {
            double v = grid[static_cast<std::size_t>(iy) * field.nx() + ix];
            int g = peak > 0.0 ? static_cast<int>(std::lround(255.0 * v / peak)) : 0;
            os << static_cast<char>(std::clamp(g, 0, 255));
        }
    return os.str();
}

std::string render_svg(const Simulation& sim) {
    const ArenaSpec& a = sim.scn.arena;
    double w = a.extent_x(), h = a.extent_y();
    std::ostringstream os;
    os << std::setprecision(6);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << -w / 2 << " " << -h / 2 << " "
       << w << " " << h << "\">\n";
    os << "<!-- scenario_hash=" << std::hex << sim.record.scenario_hash << std::dec << " tick="
       << sim.tick_count() << " -->\n";
    // y is flipped so +y points up in the rendered image
    os << "<g transform=\"scale(1,-1)\">\n";
    if (a.shape == ArenaShape::Disc)
        os << "<circle r=\"" << a.radius << "\" fill=\"#f8f8ff\" stroke=\"#404040\" stroke-width=\"0.4\"/>\n";
    else
        os << "<rect x=\"" << -w / 2 << "\" y=\"" << -h / 2 << "\" width=\"" << w << "\" height=\""
           << h << "\" fill=\"#f8f8ff\" stroke=\"#404040\" stroke-width=\"0.4\"/>\n";

    auto polyline = [&os](const std::vector<Vec2>& path, const char* color, double width) {
        if (path.size() < 2) return;
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width
           << "\" points=\"";
        for (Vec2 p : path) os << p.x << "," << p.y << " ";
        os << "\"/>\n";
    };

    for (const auto& [id, br] : sim.plasm.branches) polyline(br.path, "#d8c860", 0.25);
    for (const auto& [tid, t] : sim.net.tubes) {
        double tension = 0.0;
        if (auto it = sim.net.tensions.find(tid); it != sim.net.tensions.end()) tension = it->second;
        polyline(t.path, "#a07820", 0.5 + 2.0 * tension);
    }
    for (const auto& [bid, b] : sim.bodies)
        os << "<circle cx=\"" << b.position.x << "\" cy=\"" << b.position.y << "\" r=\"" << b.radius
           << "\" fill=\"" << (b.carries_food ? "#d0e8d0" : "#e0e0e0") << "\" stroke=\""
           << (b.anchored ? "#202020" : "#9090c0") << "\" stroke-width=\"0.4\"/>\n";
    for (const NutrientSource& s : sim.scn.sources)
        os << "<circle cx=\"" << s.position.x << "\" cy=\"" << s.position.y
           << "\" r=\"0.8\" fill=\"#308030\"/>\n";
    os << "<circle cx=\"" << sim.plasm.seed_position.x << "\" cy=\"" << sim.plasm.seed_position.y
       << "\" r=\"0.8\" fill=\"#803030\"/>\n";
    os << "</g>\n</svg>\n";
    return os.str();
}

void write_outputs(const RunRecord& r, const std::string& dir) {
    fs::path out(dir);
    std::error_code ec;
    fs::create_directories(out / "snapshots", ec);
    if (ec) throw IoError("cannot create output directory " + out.string() + ": " + ec.message());

    {
        std::ostringstream os;
        os << hash_header(r);
        os << "tick,time_min,sites_covered,sites_total,is_tree,total_length,mst_length,"
              "length_ratio,mean_tortuosity,edge_jaccard_vs_rng,final\n";
        for (const MetricsRow& m : r.metrics)
            os << m.tick << "," << fmt(m.time_min) << "," << m.metrics.sites_covered << ","
               << m.metrics.sites_total << "," << (m.metrics.is_tree ? 1 : 0) << ","
               << fmt(m.metrics.total_length) << "," << fmt(m.metrics.mst_length) << ","
               << fmt(m.metrics.length_ratio) << "," << fmt(m.metrics.mean_tortuosity) << ","
               << fmt(m.metrics.edge_jaccard_vs_rng) << "," << (m.final_row ? 1 : 0) << "\n";
        write_atomic(out / "metrics.csv", os.str());
    }
    {
        std::ostringstream os;
        os << hash_header(r) << "tick,time_min,event,detail\n";
        for (const EventRow& e : r.events)
            os << e.tick << "," << fmt(e.time_min) << "," << e.kind << "," << e.detail << "\n";
        write_atomic(out / "events.csv", os.str());
    }
    {
        std::ostringstream os;
        os << hash_header(r) << "tick,body,x,y,anchored,fx,fy\n";
        for (const BodyRow& b : r.bodies)
            os << b.tick << "," << b.body << "," << fmt(b.x) << "," << fmt(b.y) << ","
               << (b.anchored ? 1 : 0) << "," << fmt(b.fx) << "," << fmt(b.fy) << "\n";
        write_atomic(out / "bodies.csv", os.str());
    }
    for (const Snapshot& s : r.snapshots) {
        char name[32];
        std::snprintf(name, sizeof(name), "%06ld", s.tick);
        write_atomic(out / "snapshots" / (std::string(name) + ".svg"), s.svg);
        write_atomic(out / "snapshots" / (std::string(name) + ".pgm"), s.pgm);
    }
    {
        std::ostringstream os;
        os << hash_header(r);
        os << "scenario=" << r.scenario.name << "\n";
        os << "ticks=" << r.scenario.schedule.ticks << "\n";
        os << "rng_seed=" << r.scenario.rng_seed << "\n";
        os << "completion_tick=" << r.completion_tick << "\n";
        os << "sites_covered=" << r.final_metrics.sites_covered << "/" << r.final_metrics.sites_total
           << "\n";
        os << "is_tree=" << (r.final_metrics.is_tree ? 1 : 0) << "\n";
        os << "total_length=" << fmt(r.final_metrics.total_length) << "\n";
        os << "mst_length=" << fmt(r.final_metrics.mst_length) << "\n";
        os << "length_ratio=" << fmt(r.final_metrics.length_ratio) << "\n";
        os << "mean_tortuosity=" << fmt(r.final_metrics.mean_tortuosity) << "\n";
        os << "edge_jaccard_vs_rng=" << fmt(r.final_metrics.edge_jaccard_vs_rng) << "\n";
        os << "final_branch_count=" << r.final_branch_count << "\n";
        write_atomic(out / "run.summary", os.str());
    }
}

// ---------------------------------------------------------------------------
// Op scripts: `OPNAME arg...`, '#' comments.

std::vector<EventRow> run_ops(Simulation& sim, const std::string& script_text) {
    std::vector<EventRow> trace;
    auto note = [&](const std::string& op, const std::string& status, const std::string& detail) {
        trace.push_back({sim.tick_count(), sim.time_min(), op, status + (detail.empty() ? "" : " " + detail)});
    };
    auto parse_binding = [&](const std::string& tok) -> Binding {
        auto colon = tok.find(':');
        if (colon == std::string::npos)
            throw ScenarioError("binding must look like site:N or body:N, got '" + tok + "'");
        std::string kind = tok.substr(0, colon);
        int id = std::stoi(tok.substr(colon + 1));
        if (kind == "site") return {BindingKind::Site, id};
        if (kind == "body") return {BindingKind::Body, id};
        throw ScenarioError("unknown binding kind '" + kind + "'");
    };

    std::istringstream in(script_text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string op;
        if (!(ls >> op)) continue;
        try {
            if (op == "ADD_NODE") {
                std::string btok, color = "plain";
                ls >> btok;
                ls >> color;
                Binding b = parse_binding(btok);
                int id = sim.storage.add_node(b, color);
                sim.storage_bindings[id] = b;
                note(op, "accepted", "node=" + std::to_string(id));
            } else if (op == "LINK" || op == "UNLINK") {
                int a, b;
                ls >> a >> b;
                bool ok = op == "LINK" ? sim.storage.link(a, b) : sim.storage.unlink(a, b);
                note(op, ok ? "accepted" : "rejected",
                     std::to_string(a) + "-" + std::to_string(b));
            } else if (op == "SET_ACTIVE") {
                int n;
                ls >> n;
                note(op, sim.storage.set_active(n) ? "accepted" : "rejected", std::to_string(n));
            } else if (op == "PUSH") {
                int n;
                double dx, dy, duration;
                ls >> n >> dx >> dy >> duration;
                auto it = sim.storage_bindings.find(n);
                if (it == sim.storage_bindings.end() || it->second.kind != BindingKind::Body) {
                    note(op, "rejected", "node not bound to a body");
                } else if (sim.bodies.at(it->second.id).anchored) {
                    note(op, "rejected", "body anchored");
                } else if (sim.bodies.at(it->second.id).carries_food) {
                    note(op, "rejected", "body carries food");
                } else {
                    sim.enqueue_push(n, {dx, dy}, duration);
                    note(op, "accepted", "node=" + std::to_string(n));
                }
            } else if (op == "PULL") {
                int n, target;
                double window = 600.0;
                ls >> n >> target;
                if (!(ls >> window)) window = 600.0;
                auto it = sim.storage_bindings.find(n);
                auto jt = sim.storage_bindings.find(target);
                if (it == sim.storage_bindings.end() || jt == sim.storage_bindings.end()) {
                    note(op, "rejected", "unknown storage node");
                } else if (it->second.kind != BindingKind::Body) {
                    note(op, "rejected", "pulled node not bound to a body");
                } else {
                    if (jt->second.kind == BindingKind::Body &&
                        !sim.bodies.at(jt->second.id).anchored &&
                        sim.bodies.at(jt->second.id).drag <=
                            2.0 * sim.bodies.at(it->second.id).drag)
                        note(op, "warning", "both endpoints free with comparable drag");
                    sim.enqueue_pull(n, target, window);
                    note(op, "accepted", "node=" + std::to_string(n));
                }
            } else if (op == "RUN") {
                long ticks;
                ls >> ticks;
                for (long i = 0; i < ticks; ++i) sim.tick();
                note(op, "completed", std::to_string(ticks) + " ticks");
            } else {
                note(op, "rejected", "unknown op at line " + std::to_string(lineno));
            }
        } catch (const std::exception& e) {
            note(op, "rejected", e.what());
        }
    }
    for (const EventRow& t : sim.op_trace) trace.push_back(t);
    return trace;
}

}  // namespace physarum
