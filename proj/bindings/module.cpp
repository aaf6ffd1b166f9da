#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "physarum/scenario.hpp"

namespace py = pybind11;
using namespace physarum;

PYBIND11_MODULE(_physarum, m) {
    m.doc() = "physarum water-surface computing simulator";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);
    py::register_exception<QueryError>(m, "QueryError", PyExc_ValueError);
    py::register_exception<IoError>(m, "IoError", PyExc_OSError);

    py::class_<Vec2>(m, "Vec2")
        .def(py::init<>())
        .def(py::init<double, double>())
        .def_readwrite("x", &Vec2::x)
        .def_readwrite("y", &Vec2::y)
        .def("norm", &Vec2::norm)
        .def("__repr__", [](const Vec2& v) {
            return "Vec2(" + std::to_string(v.x) + ", " + std::to_string(v.y) + ")";
        });

    py::class_<ArenaSpec>(m, "ArenaSpec")
        .def_static("disc", &ArenaSpec::disc, py::arg("radius"), py::arg("cell_size"))
        .def_static("rectangle", &ArenaSpec::rectangle, py::arg("width"), py::arg("height"),
                    py::arg("cell_size"))
        .def("contains", &ArenaSpec::contains, py::arg("p"), py::arg("margin") = 0.0)
        .def_readonly("cell_size", &ArenaSpec::cell_size);

    py::class_<NutrientSource>(m, "NutrientSource")
        .def(py::init([](Vec2 p, double rate, const std::string& color) {
                 return NutrientSource{p, rate, color, -1};
             }),
             py::arg("position"), py::arg("emission_rate") = 1.0, py::arg("color") = "plain")
        .def_readwrite("position", &NutrientSource::position)
        .def_readwrite("emission_rate", &NutrientSource::emission_rate)
        .def_readwrite("color", &NutrientSource::color);

    py::class_<ChemoField>(m, "ChemoField")
        .def(py::init<const ArenaSpec&, double, double, double>(), py::arg("arena"),
             py::arg("diffusion"), py::arg("decay"), py::arg("dt") = 0.1)
        .def("emit", &ChemoField::emit, py::arg("source"), py::arg("weight"), py::arg("dt"))
        .def("step", &ChemoField::step)
        .def("gradient_at", &ChemoField::gradient_at)
        .def("total_attractant", &ChemoField::total_attractant)
        .def("total_repellent", &ChemoField::total_repellent)
        .def_property_readonly("nx", &ChemoField::nx)
        .def_property_readonly("ny", &ChemoField::ny)
        .def("attractant", [](const ChemoField& f) {
            return std::vector<double>(f.attractant().begin(), f.attractant().end());
        });

    py::class_<PointSet>(m, "PointSet")
        .def(py::init<const std::vector<Vec2>&>())
        .def(py::init([](const std::vector<std::pair<double, double>>& xs) {
            std::vector<Vec2> v;
            for (auto [x, y] : xs) v.push_back({x, y});
            return PointSet(v);
        }))
        .def("size", &PointSet::size)
        .def_property_readonly("points", &PointSet::points);

    py::class_<MstResult>(m, "MstResult")
        .def_readonly("edges", &MstResult::edges)
        .def_readonly("total_length", &MstResult::total_length);

    py::class_<ProximityGraphs>(m, "ProximityGraphs")
        .def_readonly("rng", &ProximityGraphs::rng)
        .def_readonly("gabriel", &ProximityGraphs::gabriel);

    m.def("euclidean_mst", &euclidean_mst);
    m.def("proximity_graphs", &proximity_graphs);

    py::class_<Metrics>(m, "Metrics")
        .def_readonly("sites_covered", &Metrics::sites_covered)
        .def_readonly("sites_total", &Metrics::sites_total)
        .def_readonly("is_tree", &Metrics::is_tree)
        .def_readonly("total_length", &Metrics::total_length)
        .def_readonly("mst_length", &Metrics::mst_length)
        .def_readonly("length_ratio", &Metrics::length_ratio)
        .def_readonly("mean_tortuosity", &Metrics::mean_tortuosity)
        .def_readonly("edge_jaccard_vs_rng", &Metrics::edge_jaccard_vs_rng);

    py::class_<Scenario>(m, "Scenario")
        .def_readwrite("name", &Scenario::name)
        .def_readwrite("rng_seed", &Scenario::rng_seed)
        .def_property(
            "ticks", [](const Scenario& s) { return s.schedule.ticks; },
            [](Scenario& s, long t) { s.schedule.ticks = t; })
        .def("validate", &Scenario::validate)
        .def("hash", &Scenario::hash);

    m.def("builtin", &builtin);
    m.def("builtin_names", &builtin_names);
    m.def("load_scenario", &load_scenario);
    m.def("scenario_from_json_text", &scenario_from_json_text, py::arg("text"),
          py::arg("origin") = "<string>");

    py::class_<EventRow>(m, "EventRow")
        .def_readonly("tick", &EventRow::tick)
        .def_readonly("time_min", &EventRow::time_min)
        .def_readonly("kind", &EventRow::kind)
        .def_readonly("detail", &EventRow::detail);

    py::class_<RunRecord>(m, "RunRecord")
        .def_readonly("scenario_hash", &RunRecord::scenario_hash)
        .def_readonly("events", &RunRecord::events)
        .def_readonly("final_metrics", &RunRecord::final_metrics)
        .def_readonly("completion_tick", &RunRecord::completion_tick)
        .def_readonly("final_body_positions", &RunRecord::final_body_positions)
        .def_readonly("final_branch_count", &RunRecord::final_branch_count);

    py::class_<StorageGraph>(m, "StorageGraph")
        .def(py::init<int>(), py::arg("degree_cap") = 5)
        .def("add_node", &StorageGraph::add_node, py::arg("binding"), py::arg("color") = "plain")
        .def("link", &StorageGraph::link)
        .def("unlink", &StorageGraph::unlink)
        .def("set_active", &StorageGraph::set_active)
        .def("connected", &StorageGraph::connected)
        .def("serialize", &StorageGraph::serialize);

    py::enum_<BindingKind>(m, "BindingKind")
        .value("Site", BindingKind::Site)
        .value("Body", BindingKind::Body);

    py::class_<Binding>(m, "Binding")
        .def(py::init([](BindingKind k, int id) { return Binding{k, id}; }))
        .def_readwrite("kind", &Binding::kind)
        .def_readwrite("id", &Binding::id);

    py::class_<Simulation>(m, "Simulation")
        .def(py::init<const Scenario&>())
        .def("tick", &Simulation::tick)
        .def("run_all", &Simulation::run_all)
        .def("time_min", &Simulation::time_min)
        .def("tick_count", &Simulation::tick_count)
        .def_readonly("record", &Simulation::record)
        .def_property_readonly("live_tips",
                               [](const Simulation& s) { return s.plasm.live_tip_count(); })
        .def_property_readonly("branch_count",
                               [](const Simulation& s) { return s.plasm.branches.size(); })
        .def_property_readonly("tube_count",
                               [](const Simulation& s) { return s.net.tubes.size(); })
        .def_property_readonly("tip_positions", [](const Simulation& s) {
            std::vector<std::pair<double, double>> out;
            for (const Tip& t : s.plasm.tips)
                if (t.alive) out.emplace_back(t.position.x, t.position.y);
            return out;
        })
        .def_property_readonly("network_debug", [](const Simulation& s) {
            py::list out;
            for (const auto& [tid, t] : s.net.tubes) {
                py::dict d;
                d["id"] = tid;
                auto& na = s.net.nodes.at(t.node_a);
                auto& nb = s.net.nodes.at(t.node_b);
                auto desc = [](const TubeNode& n) {
                    return py::make_tuple(static_cast<int>(n.kind), n.site_id, n.body_id,
                                          n.position.x, n.position.y);
                };
                d["a"] = desc(na);
                d["b"] = desc(nb);
                d["stiffness"] = t.stiffness;
                d["len"] = polyline_length(t.path);
                d["chord"] = distance(t.path.front(), t.path.back());
                double tension = 0.0;
                if (auto it = s.net.tensions.find(tid); it != s.net.tensions.end())
                    tension = it->second;
                d["tension"] = tension;
                out.append(d);
            }
            return out;
        })
        .def_property_readonly("body_positions", [](const Simulation& s) {
            std::map<int, std::pair<double, double>> out;
            for (const auto& [id, b] : s.bodies) out[id] = {b.position.x, b.position.y};
            return out;
        });

    m.def("run", &run);
    m.def("write_outputs", &write_outputs);
    m.def("run_ops", &run_ops);
}
