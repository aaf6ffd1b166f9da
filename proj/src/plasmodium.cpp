#include "physarum/plasmodium.hpp"

#include <algorithm>
#include <cmath>

namespace physarum {

void GrowthParams::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw ConfigError(std::string("growth parameter ") + name + " must be > 0");
    };
    positive(step_length, "step_length");
    positive(speed, "speed");
    positive(sensor_angle, "sensor_angle");
    positive(sensor_offset, "sensor_offset");
    positive(gradient_threshold, "gradient_threshold");
    positive(density_cap, "density_cap");
    positive(deposit_rate, "deposit_rate");
    positive(tip_radius, "tip_radius");
    positive(reward_gain, "reward_gain");
    positive(retract_age, "retract_age");
    if (wander_sigma < 0.0) throw ConfigError("wander_sigma must be >= 0");
    if (branch_prob < 0.0 || branch_prob > 1.0) throw ConfigError("branch_prob must lie in [0,1]");
}

int PlasmodiumState::cell_of(Vec2 p) const {
    int ix = static_cast<int>(std::floor((p.x + arena.extent_x() / 2.0) / cell_size));
    int iy = static_cast<int>(std::floor((p.y + arena.extent_y() / 2.0) / cell_size));
    if (ix < 0 || ix >= nx || iy < 0 || iy >= ny) return -1;
    return iy * nx + ix;
}

double PlasmodiumState::occupancy_at(Vec2 p) const {
    int idx = cell_of(p);
    return idx < 0 ? 0.0 : occupancy[idx];
}

std::vector<int> PlasmodiumState::footprint_cells(Vec2 p, double radius) const {
    std::vector<int> out;
    int r = static_cast<int>(std::ceil(radius / cell_size));
    int c = cell_of(p);
    if (c < 0) return out;
    int cx = c % nx, cy = c / nx;
    for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
            int ix = cx + dx, iy = cy + dy;
            if (ix < 0 || ix >= nx || iy < 0 || iy >= ny) continue;
            Vec2 center{(ix + 0.5) * cell_size - arena.extent_x() / 2.0,
                        (iy + 0.5) * cell_size - arena.extent_y() / 2.0};
            if (distance(center, p) <= radius && arena.contains(center)) out.push_back(iy * nx + ix);
        }
    return out;
}

int PlasmodiumState::live_tip_count() const {
    int n = 0;
    for (const Tip& t : tips)
        if (t.alive) ++n;
    return n;
}

bool PlasmodiumState::rewarded_branch(int id) const {
    auto it = branches.find(id);
    return it != branches.end() && it->second.rewarded;
}

PlasmodiumState seed_at(const ArenaSpec& arena, Vec2 where, double initial_mass,
                        const GrowthParams& params, double budget) {
    params.validate();
    if (!(initial_mass > 0.0)) throw ScenarioError("seed initial_mass must be > 0");
    if (!arena.contains(where)) throw ScenarioError("seed location lies outside the arena");

    PlasmodiumState st;
    st.arena = arena;
    st.cell_size = arena.cell_size;
    st.nx = std::max(1, static_cast<int>(std::llround(arena.extent_x() / arena.cell_size)));
    st.ny = std::max(1, static_cast<int>(std::llround(arena.extent_y() / arena.cell_size)));
    st.occupancy.assign(static_cast<std::size_t>(st.nx) * st.ny, 0.0);
    st.mass_budget = std::max(budget, initial_mass);
    st.seed_position = where;

    Branch root;
    root.id = st.next_branch_id++;
    root.path = {where, where};
    st.branches[root.id] = root;

    // Seed occupancy spread wide enough that no cell starts above half the
    // density cap (tips must be able to leave the seed).
    double spread = params.tip_radius;
    auto cells = st.footprint_cells(where, spread);
    while (!cells.empty() &&
           initial_mass / static_cast<double>(cells.size()) > 0.5 * params.density_cap) {
        spread += arena.cell_size;
        cells = st.footprint_cells(where, spread);
    }
    if (!cells.empty()) {
        double per = initial_mass / static_cast<double>(cells.size());
        for (int c : cells) {
            st.occupancy[c] += per;
            st.branches[root.id].deposits.emplace_back(c, static_cast<float>(per));
        }
        st.total_occupancy += initial_mass;
    }

    constexpr int k0 = 6;
    for (int k = 0; k < k0; ++k) {
        Branch b;
        b.id = st.next_branch_id++;
        b.parent = root.id;
        b.spawn_index = 0;
        b.path = {where, where};
        st.branches[b.id] = b;
        st.branches[root.id].children += 1;

        Tip t;
        t.id = st.next_tip_id++;
        t.branch = b.id;
        t.position = where;
        t.heading = unit_from_angle(2.0 * 3.14159265358979323846 * k / k0);
        st.tips.push_back(t);
    }
    return st;
}

Vec2 sense_and_steer(const Tip& tip, const ChemoField& field, const GrowthParams& params, Rng& rng) {
    const double wander = rng.gaussian() * params.wander_sigma;  // fixed draw count per tip
    double best = -1e300;
    Vec2 best_dir = tip.heading;
    for (int k = -1; k <= 1; ++k) {
        Vec2 dir = tip.heading.rotated(k * params.sensor_angle);
        Vec2 probe = tip.position + dir * params.sensor_offset;
        if (!field.spec().contains(probe)) continue;
        double dd = field.gradient_at(probe).dot(dir);
        if (dd > best) {
            best = dd;
            best_dir = dir;
        }
    }
    if (best > params.gradient_threshold) return best_dir;
    return tip.heading.rotated(wander);
}

namespace {

void propagate_reward(PlasmodiumState& st, int branch_id) {
    int b = branch_id;
    while (b >= 0) {
        Branch& br = st.branches.at(b);
        if (br.rewarded) break;  // ancestors already rewarded
        br.rewarded = true;
        b = br.parent;
    }
}

}  // namespace

void grow_step(PlasmodiumState& state, const ChemoField& field, const GrowthParams& params,
               Rng& rng, double dt) {
    if (!(dt > 0.0)) throw ScenarioError("grow_step dt must be > 0");
    state.now += dt;
    const double advance = params.speed * dt;

    struct Plan {
        std::size_t tip_index;
        Vec2 heading;
        Vec2 new_pos;
        bool dies = false;
        bool stalls = false;
        std::vector<int> deposit_cells;
        double need = 0.0;
        bool do_branch = false;
        double branch_side = 1.0;
    };
    std::vector<Plan> plans;
    plans.reserve(state.tips.size());

    // Pass 1 (tip-id order): steer, plan moves and deposit needs.
    for (std::size_t i = 0; i < state.tips.size(); ++i) {
        Tip& tip = state.tips[i];
        if (!tip.alive) continue;
        Plan pl;
        pl.tip_index = i;
        pl.heading = sense_and_steer(tip, field, params, rng);
        double u_branch = rng.uniform();
        double u_side = rng.uniform();
        pl.new_pos = tip.position + pl.heading * advance;
        if (!state.arena.contains(pl.new_pos)) {
            pl.dies = true;
        } else {
            int target = state.cell_of(pl.new_pos);
            bool entering = target != state.cell_of(tip.position);
            if (entering && target >= 0 && state.occupancy[target] >= params.density_cap) {
                pl.stalls = true;
            } else if (entering) {
                for (int c : state.footprint_cells(pl.new_pos, params.tip_radius)) {
                    double room = params.density_cap - state.occupancy[c];
                    if (room > 1e-12) {
                        pl.deposit_cells.push_back(c);
                        pl.need += std::min(params.deposit_rate, room);
                    }
                }
            }
            pl.do_branch = u_branch < params.branch_prob;
            pl.branch_side = u_side < 0.5 ? 1.0 : -1.0;
        }
        plans.push_back(pl);
    }

    // Pass 2: budget. Kill the oldest unrewarded tips until planned deposits fit.
    double available = state.mass_budget - state.total_occupancy;
    double total_need = 0.0;
    for (const Plan& p : plans) total_need += p.need;
    if (total_need > available) {
        std::vector<std::size_t> order;  // indices into plans, oldest first
        for (std::size_t k = 0; k < plans.size(); ++k) {
            const Tip& t = state.tips[plans[k].tip_index];
            if (!plans[k].dies && !state.rewarded_branch(t.branch)) order.push_back(k);
        }
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const Tip& ta = state.tips[plans[a].tip_index];
            const Tip& tb = state.tips[plans[b].tip_index];
            if (ta.born != tb.born) return ta.born < tb.born;
            return ta.branch < tb.branch;
        });
        for (std::size_t k : order) {
            if (total_need <= available) break;
            plans[k].dies = true;
            total_need -= plans[k].need;
            plans[k].need = 0.0;
        }
    }

    // Pass 3: apply in tip-id order.
    std::vector<Tip> spawned;
    for (Plan& pl : plans) {
        Tip& tip = state.tips[pl.tip_index];
        Branch& br = state.branches.at(tip.branch);
        if (pl.dies) {
            tip.alive = false;
            continue;
        }
        if (pl.stalls) {
            tip.stalled = true;
            tip.heading = pl.heading;  // keep steering so the tip can reroute
            continue;
        }
        tip.stalled = false;
        tip.heading = pl.heading;

        double step = distance(tip.position, pl.new_pos);
        tip.position = pl.new_pos;
        tip.last_advance = state.now;
        br.last_active = state.now;
        br.advanced += step;
        // Append a vertex before the chord to the previous one can exceed
        // step_length (substeps are finer than step_length).
        if (br.advanced >= std::max(params.step_length - advance, params.step_length * 0.5)) {
            br.path.push_back(tip.position);
            br.advanced = 0.0;
        } else {
            br.path.back() = tip.position;
        }

        double budget_left = state.mass_budget - state.total_occupancy;
        for (int c : pl.deposit_cells) {
            double amount = std::min({params.deposit_rate, params.density_cap - state.occupancy[c],
                                      budget_left});
            if (amount <= 1e-12) continue;
            state.occupancy[c] += amount;
            state.total_occupancy += amount;
            budget_left -= amount;
            br.deposits.emplace_back(c, static_cast<float>(amount));
        }

        if (pl.do_branch) {
            Vec2 child_heading = tip.heading.rotated(pl.branch_side * params.sensor_angle);
            Vec2 probe = tip.position + child_heading * params.step_length;
            // Crowding check keeps the population proportional to the frontier.
            if (state.arena.contains(probe) && state.occupancy_at(probe) < params.density_cap * 0.5) {
                Branch child;
                child.id = state.next_branch_id++;
                child.parent = br.id;
                child.spawn_index = static_cast<int>(br.path.size()) - 1;
                child.path = {tip.position, tip.position};
                child.created = state.now;
                child.last_active = state.now;
                state.branches[child.id] = child;
                br.children += 1;

                Tip t;
                t.id = state.next_tip_id++;
                t.branch = child.id;
                t.position = tip.position;
                t.heading = child_heading;
                t.born = state.now;
                t.last_advance = state.now;
                spawned.push_back(t);
            }
        }
    }
    for (Tip& t : spawned) state.tips.push_back(t);

    // Drop dead tips whose branches are gone; keep dead tips of live branches
    // out of the list (retraction uses branch timestamps, not tips).
    state.tips.erase(std::remove_if(state.tips.begin(), state.tips.end(),
                                    [](const Tip& t) { return !t.alive; }),
                     state.tips.end());
}

std::vector<EngulfEvent> engulf_check(PlasmodiumState& state, std::span<const NutrientSource> sources,
                                      const GrowthParams& params) {
    std::vector<EngulfEvent> events;
    for (std::size_t s = 0; s < sources.size(); ++s) {
        int sid = static_cast<int>(s);
        if (state.engulfed_sources.count(sid)) continue;
        for (const Tip& tip : state.tips) {
            if (!tip.alive) continue;
            if (distance(tip.position, sources[s].position) <= params.step_length) {
                state.engulfed_sources.insert(sid);
                Branch& br = state.branches.at(tip.branch);
                br.marks.push_back({static_cast<int>(br.path.size()) - 1, sid, sources[s].host_body});
                propagate_reward(state, tip.branch);
                state.mass_budget += params.reward_gain;
                state.reward_version += 1;
                events.push_back({sid, tip.branch, sources[s].host_body, state.now});
                break;
            }
        }
    }
    return events;
}

void retract_unrewarded(PlasmodiumState& state, double now, const GrowthParams& params,
                        std::vector<int>* removed) {
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<int> doomed;
        for (auto& [id, br] : state.branches) {
            if (br.parent < 0 || br.rewarded || br.children > 0) continue;
            if (now - br.last_active > params.retract_age) doomed.push_back(id);
        }
        for (int id : doomed) {
            Branch& br = state.branches.at(id);
            for (auto [cell, amount] : br.deposits) {
                double take = std::min(static_cast<double>(amount), state.occupancy[cell]);
                state.occupancy[cell] -= take;
                state.total_occupancy -= take;
            }
            if (br.parent >= 0) state.branches.at(br.parent).children -= 1;
            state.tips.erase(std::remove_if(state.tips.begin(), state.tips.end(),
                                            [id](const Tip& t) { return t.branch == id; }),
                             state.tips.end());
            state.branches.erase(id);
            if (removed) removed->push_back(id);
            changed = true;
        }
    }
}

}  // namespace physarum
