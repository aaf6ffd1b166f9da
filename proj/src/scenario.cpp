#include "physarum/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace physarum {

using nlohmann::json;

void Scenario::validate() const {
    arena.validate();
    growth.validate();
    if (field.diffusion < 0 || field.decay < 0) throw ConfigError("field constants must be >= 0");
    if (field.dt <= 0) throw ConfigError("field dt must be > 0");
    if (mech.contract_lambda * field.dt * growth_substep >= 1.0)
        throw ConfigError("contract lambda too large for the mechanics substep");
    if (growth_substep < 1) throw ConfigError("growth_substep must be >= 1");
    if (schedule.ticks < 0) throw ScenarioError("schedule.ticks must be >= 0");
    for (std::size_t i = 0; i < sources.size(); ++i) {
        const NutrientSource& s = sources[i];
        if (s.emission_rate < 0) throw ScenarioError("source " + std::to_string(i) + " has negative emission");
        if (s.host_body < 0 && !arena.contains(s.position))
            throw ScenarioError("source " + std::to_string(i) + " lies outside the arena");
        color_weight(preference, s.color);
        if (s.host_body >= 0) {
            bool found = false;
            for (const FloatingBody& b : bodies) found |= b.id == s.host_body;
            if (!found) throw ScenarioError("source " + std::to_string(i) + " references missing body " +
                                            std::to_string(s.host_body));
        }
    }
    for (const FloatingBody& b : bodies) {
        if (b.radius <= 0) throw ScenarioError("body " + std::to_string(b.id) + " radius must be > 0");
        if (b.drag <= 0) throw ScenarioError("body " + std::to_string(b.id) + " drag must be > 0");
        if (!arena.contains(b.position))
            throw ScenarioError("body " + std::to_string(b.id) + " lies outside the arena");
    }
    if (seed.body_id >= 0) {
        bool found = false;
        for (const FloatingBody& b : bodies) found |= b.id == seed.body_id;
        if (!found) throw ScenarioError("seed references missing body " + std::to_string(seed.body_id));
    }
    if (mass_budget <= 0) throw ScenarioError("mass_budget must be > 0");
}

std::string Scenario::canonical() const {
    json j;
    j["name"] = name;
    if (arena.shape == ArenaShape::Disc) {
        j["arena"] = {{"shape", "disc"}, {"radius", arena.radius}, {"cell_size", arena.cell_size}};
    } else {
        j["arena"] = {{"shape", "rectangle"}, {"width", arena.width}, {"height", arena.height},
                      {"cell_size", arena.cell_size}};
    }
    for (const auto& s : sources)
        j["sources"].push_back({{"x", s.position.x}, {"y", s.position.y},
                                {"emission_rate", s.emission_rate}, {"color", s.color},
                                {"host_body", s.host_body}});
    for (const auto& b : bodies)
        j["bodies"].push_back({{"id", b.id}, {"radius", b.radius}, {"x", b.position.x},
                               {"y", b.position.y}, {"drag", b.drag}, {"anchored", b.anchored},
                               {"carries_food", b.carries_food}});
    j["seed"] = {{"body", seed.body_id}, {"x", seed.position.x}, {"y", seed.position.y},
                 {"initial_mass", seed.initial_mass}};
    j["growth"] = {{"step_length", growth.step_length}, {"speed", growth.speed},
                   {"branch_prob", growth.branch_prob}, {"sensor_angle", growth.sensor_angle},
                   {"sensor_offset", growth.sensor_offset}, {"wander_sigma", growth.wander_sigma},
                   {"gradient_threshold", growth.gradient_threshold},
                   {"density_cap", growth.density_cap}, {"deposit_rate", growth.deposit_rate},
                   {"tip_radius", growth.tip_radius}, {"reward_gain", growth.reward_gain},
                   {"retract_age", growth.retract_age}};
    j["field"] = {{"diffusion", field.diffusion}, {"decay", field.decay}, {"dt", field.dt}};
    j["mechanics"] = {{"push_magnitude", mech.push_magnitude}, {"push_range", mech.push_range},
                      {"stiffness", mech.stiffness}, {"contract_lambda", mech.contract_lambda}};
    j["mass_budget"] = mass_budget;
    j["growth_substep"] = growth_substep;
    j["preference"] = preference;
    j["schedule"] = {{"ticks", schedule.ticks}, {"snapshot_every", schedule.snapshot_every},
                     {"metric_every", schedule.metric_every}};
    j["rng_seed"] = rng_seed;
    return j.dump();
}

uint64_t Scenario::hash() const { return fnv1a(canonical()); }

namespace {

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed) ok |= it.key() == k;
        if (!ok) throw ScenarioError("unknown key '" + it.key() + "' in " + where);
    }
}

double num(const json& j, const char* key, double fallback, bool required = false) {
    if (!j.contains(key)) {
        if (required) throw ScenarioError(std::string("missing required key '") + key + "'");
        return fallback;
    }
    if (!j[key].is_number()) throw ScenarioError(std::string("key '") + key + "' must be a number");
    return j[key].get<double>();
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text, const std::string& origin) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(origin + ": parse error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    reject_unknown(j, {"name", "arena", "sources", "bodies", "seed", "growth", "field", "mechanics",
                       "mass_budget", "growth_substep", "preference", "schedule", "rng_seed"},
                   origin);
    Scenario s;
    s.name = j.value("name", "custom");

    if (!j.contains("arena")) throw ScenarioError(origin + ": missing 'arena' section");
    const json& a = j["arena"];
    reject_unknown(a, {"shape", "radius", "width", "height", "cell_size"}, "arena");
    std::string shape = a.value("shape", "disc");
    if (shape == "disc") {
        s.arena = ArenaSpec::disc(num(a, "radius", 45.0, true), num(a, "cell_size", 0.5));
    } else if (shape == "rectangle") {
        s.arena = ArenaSpec::rectangle(num(a, "width", 0.0, true), num(a, "height", 0.0, true),
                                       num(a, "cell_size", 0.5));
    } else {
        throw ScenarioError("arena.shape must be 'disc' or 'rectangle', got '" + shape + "'");
    }

    if (j.contains("sources"))
        for (std::size_t i = 0; i < j["sources"].size(); ++i) {
            const json& e = j["sources"][i];
            reject_unknown(e, {"x", "y", "emission_rate", "color", "host_body"},
                           "sources[" + std::to_string(i) + "]");
            NutrientSource src;
            src.position = {num(e, "x", 0.0, true), num(e, "y", 0.0, true)};
            src.emission_rate = num(e, "emission_rate", 1.0);
            src.color = e.value("color", "plain");
            src.host_body = static_cast<int>(num(e, "host_body", -1));
            s.sources.push_back(src);
        }

    if (j.contains("bodies"))
        for (std::size_t i = 0; i < j["bodies"].size(); ++i) {
            const json& e = j["bodies"][i];
            reject_unknown(e, {"id", "radius", "x", "y", "drag", "anchored", "carries_food"},
                           "bodies[" + std::to_string(i) + "]");
            FloatingBody b;
            b.id = static_cast<int>(num(e, "id", static_cast<double>(i)));
            b.radius = num(e, "radius", 2.5);
            b.position = {num(e, "x", 0.0, true), num(e, "y", 0.0, true)};
            b.drag = num(e, "drag", 1.0);
            b.anchored = e.value("anchored", false);
            b.carries_food = e.value("carries_food", false);
            s.bodies.push_back(b);
        }

    if (!j.contains("seed")) throw ScenarioError(origin + ": missing 'seed' section");
    const json& sd = j["seed"];
    reject_unknown(sd, {"body", "x", "y", "initial_mass"}, "seed");
    s.seed.body_id = static_cast<int>(num(sd, "body", -1));
    s.seed.position = {num(sd, "x", 0.0), num(sd, "y", 0.0)};
    s.seed.initial_mass = num(sd, "initial_mass", 10.0);

    if (j.contains("growth")) {
        const json& g = j["growth"];
        reject_unknown(g, {"step_length", "speed", "branch_prob", "sensor_angle", "sensor_offset",
                           "wander_sigma", "gradient_threshold", "density_cap", "deposit_rate",
                           "tip_radius", "reward_gain", "retract_age"},
                       "growth");
        GrowthParams& p = s.growth;
        p.step_length = num(g, "step_length", p.step_length);
        p.speed = num(g, "speed", p.speed);
        p.branch_prob = num(g, "branch_prob", p.branch_prob);
        p.sensor_angle = num(g, "sensor_angle", p.sensor_angle);
        p.sensor_offset = num(g, "sensor_offset", p.sensor_offset);
        p.wander_sigma = num(g, "wander_sigma", p.wander_sigma);
        p.gradient_threshold = num(g, "gradient_threshold", p.gradient_threshold);
        p.density_cap = num(g, "density_cap", p.density_cap);
        p.deposit_rate = num(g, "deposit_rate", p.deposit_rate);
        p.tip_radius = num(g, "tip_radius", p.tip_radius);
        p.reward_gain = num(g, "reward_gain", p.reward_gain);
        p.retract_age = num(g, "retract_age", p.retract_age);
    }

    if (j.contains("field")) {
        const json& f = j["field"];
        reject_unknown(f, {"diffusion", "decay", "dt"}, "field");
        s.field.diffusion = num(f, "diffusion", s.field.diffusion);
        s.field.decay = num(f, "decay", s.field.decay);
        s.field.dt = num(f, "dt", s.field.dt);
    }

    if (j.contains("mechanics")) {
        const json& m = j["mechanics"];
        reject_unknown(m, {"push_magnitude", "push_range", "stiffness", "contract_lambda"},
                       "mechanics");
        s.mech.push_magnitude = num(m, "push_magnitude", s.mech.push_magnitude);
        s.mech.push_range = num(m, "push_range", s.mech.push_range);
        s.mech.stiffness = num(m, "stiffness", s.mech.stiffness);
        s.mech.contract_lambda = num(m, "contract_lambda", s.mech.contract_lambda);
    }

    s.mass_budget = num(j, "mass_budget", s.mass_budget);
    s.growth_substep = static_cast<int>(num(j, "growth_substep", s.growth_substep));

    if (j.contains("preference")) {
        if (!j["preference"].is_object()) throw ScenarioError("'preference' must map colors to weights");
        s.preference.clear();
        for (auto it = j["preference"].begin(); it != j["preference"].end(); ++it)
            s.preference[it.key()] = it.value().get<double>();
        if (!s.preference.count("plain")) s.preference["plain"] = 1.0;
    }

    if (j.contains("schedule")) {
        const json& sc = j["schedule"];
        reject_unknown(sc, {"ticks", "snapshot_every", "metric_every"}, "schedule");
        s.schedule.ticks = static_cast<long>(num(sc, "ticks", 0.0, true));
        s.schedule.snapshot_every = static_cast<long>(num(sc, "snapshot_every", 0.0));
        s.schedule.metric_every = static_cast<long>(num(sc, "metric_every", 600.0));
    }

    if (j.contains("rng_seed")) s.rng_seed = j["rng_seed"].get<uint64_t>();

    s.validate();
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return scenario_from_json_text(ss.str(), path);
}

std::vector<std::string> builtin_names() {
    return {"fig2_links", "fig3_tree3", "fig4_bare_seed", "fig5_straighten",
            "fig6_push",  "fig7_pull",  "tank_explore"};
}

namespace {

FloatingBody make_body(int id, Vec2 pos, double radius, bool anchored, bool food) {
    FloatingBody b;
    b.id = id;
    b.position = pos;
    b.radius = radius;
    b.anchored = anchored;
    b.carries_food = food;
    return b;
}

NutrientSource site_source(Vec2 pos, int host, double rate = 1.0) {
    NutrientSource s;
    s.position = pos;
    s.host_body = host;
    s.emission_rate = rate;
    return s;
}

}  // namespace

Scenario builtin(const std::string& name) {
    Scenario s;
    s.name = name;
    if (name == "fig3_tree3") {
        // 90 mm dish, three anchored foam sites with food, seeded on the west one.
        s.arena = ArenaSpec::disc(45.0, 0.5);
        s.bodies = {make_body(0, {-25.0, 0.0}, 3.0, true, true),
                    make_body(1, {15.0, 18.0}, 3.0, true, true),
                    make_body(2, {15.0, -18.0}, 3.0, true, true)};
        s.sources = {site_source({-25.0, 0.0}, 0), site_source({15.0, 18.0}, 1),
                     site_source({15.0, -18.0}, 2)};
        s.seed.body_id = 0;
        s.schedule.ticks = 13500;  // 22.5 simulated hours
        s.schedule.metric_every = 600;
    } else if (name == "fig2_links") {
        // Seed domain south, two further sites (links built one after another).
        s.arena = ArenaSpec::disc(45.0, 0.5);
        s.bodies = {make_body(0, {0.0, -22.0}, 3.0, true, true),
                    make_body(1, {-20.0, 12.0}, 3.0, true, true),
                    make_body(2, {20.0, 14.0}, 3.0, true, true)};
        s.sources = {site_source({0.0, -22.0}, 0), site_source({-20.0, 12.0}, 1),
                     site_source({20.0, 14.0}, 2)};
        s.seed.body_id = 0;
        s.schedule.ticks = 13500;
    } else if (name == "fig4_bare_seed") {
        // Seed on open water, two anchored food domains.
        s.arena = ArenaSpec::disc(45.0, 0.5);
        s.bodies = {make_body(0, {26.0, 8.0}, 3.0, true, true),
                    make_body(1, {-20.0, -18.0}, 3.0, true, true)};
        s.sources = {site_source({26.0, 8.0}, 0), site_source({-20.0, -18.0}, 1)};
        s.seed.body_id = -1;
        // Later gradient lock-on plus denser branching keeps the early front
        // circular and reliably finds both domains.
        s.growth.gradient_threshold = 3e-3;
        s.growth.branch_prob = 0.05;
        s.seed.position = {0.0, 0.0};
        s.schedule.ticks = 9600;  // 16 h
    } else if (name == "fig5_straighten") {
        // Two anchored sites; the tube between them straightens over time.
        s.arena = ArenaSpec::disc(45.0, 0.5);
        s.bodies = {make_body(0, {-18.0, 0.0}, 3.0, true, true),
                    make_body(1, {18.0, 0.0}, 3.0, true, true)};
        s.sources = {site_source({-18.0, 0.0}, 0), site_source({18.0, 0.0}, 1)};
        s.seed.body_id = 0;
        s.schedule.ticks = 12000;  // 20 h
    } else if (name == "fig6_push") {
        // 20 mm dish: foodless free foam near the seed; small mass budget so
        // the plasmodium gives up and retracts.
        s.arena = ArenaSpec::disc(10.0, 0.5);
        s.bodies = {make_body(0, {-4.0, 0.0}, 1.5, true, false),
                    make_body(1, {2.0, 0.0}, 1.5, false, false)};
        s.seed.body_id = 0;
        s.mass_budget = 900.0;
        s.growth.reward_gain = 1.0;  // nothing to reward anyway
        s.schedule.ticks = 9600;  // 16 h
    } else if (name == "fig7_pull") {
        // Free foam between an anchored seed site (west) and an anchored food
        // site (east); the foam sits nearer the seed so the eastern tube
        // carries more slack when the span completes.
        s.arena = ArenaSpec::disc(45.0, 0.5);
        s.bodies = {make_body(0, {-24.0, 0.0}, 3.0, true, false),
                    make_body(1, {24.0, 0.0}, 3.0, true, true),
                    make_body(2, {-10.0, 0.0}, 2.5, false, false)};
        // The free foam carries a faint scent so the advancing front grows
        // over it, binding it into the rewarded span.
        s.sources = {site_source({24.0, 0.0}, 1), site_source({-10.0, 0.0}, 2, 0.4)};
        s.seed.body_id = 0;
        s.mech.stiffness = 2.0;
        s.mech.contract_lambda = 0.02;
        // The plasmodium flows over the foam rather than bulldozing it; the
        // displacement must come from tube contraction, not tip ripple.
        s.mech.push_magnitude = 0.02;
        // Meandering growth leaves slack in the food-side tube; contraction of
        // that slack is what drags the foam east.
        s.growth.wander_sigma = 0.25;
        s.growth.gradient_threshold = 4e-3;
        s.schedule.ticks = 19200;  // 32 h
    } else if (name == "tank_explore") {
        // 200 x 150 mm tank, distant sources: gradients too weak to steer.
        s.arena = ArenaSpec::rectangle(200.0, 150.0, 1.0);
        s.field.dt = 0.1;
        s.bodies = {make_body(0, {80.0, 55.0}, 4.0, true, true)};
        s.sources = {site_source({80.0, 55.0}, 0)};
        s.seed.body_id = -1;
        s.seed.position = {-60.0, -40.0};
        s.schedule.ticks = 9600;
    } else {
        std::string names;
        for (const std::string& n : builtin_names()) names += (names.empty() ? "" : ", ") + n;
        throw ScenarioError("unknown builtin scenario '" + name + "'; valid names: " + names);
    }
    s.validate();
    return s;
}

}  // namespace physarum
