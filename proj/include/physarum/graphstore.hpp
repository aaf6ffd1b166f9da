#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "physarum/core.hpp"

namespace physarum {

// color label -> weight: > 1 attracts strongly, 1 neutral, < 0 repels.
using PreferenceTable = std::map<std::string, double>;

// Throws ConfigError for colors missing from the table.
double color_weight(const PreferenceTable& table, const std::string& color);

enum class BindingKind { Site, Body };

struct Binding {
    BindingKind kind = BindingKind::Site;
    int id = -1;
    bool operator==(const Binding&) const = default;
};

struct StorageNode {
    int id = -1;
    Binding binding;
    std::string color = "plain";
};

// Bounded-degree dynamic graph of physical sites/bodies: the storage layer of
// a mechanical Kolmogorov-Uspensky machine. Structural rules live here;
// physical realization (tubes, maneuvers) is enforced by the simulation.
class StorageGraph {
  public:
    explicit StorageGraph(int degree_cap = 5) : degree_cap_(degree_cap) {}

    // True when the binding is physically reachable by growth; installed by
    // the simulation, defaults to always-true for structural testing.
    std::function<bool(const Binding&)> reachable = [](const Binding&) { return true; };
    // Resolves bindings; defaults to always-valid.
    std::function<bool(const Binding&)> binding_exists = [](const Binding&) { return true; };

    int degree_cap() const { return degree_cap_; }
    const std::map<int, StorageNode>& nodes() const { return nodes_; }
    const std::set<std::pair<int, int>>& edges() const { return edges_; }
    int active() const { return active_; }

    // The first node becomes active. Throws ScenarioError on dangling or
    // unreachable bindings.
    int add_node(const Binding& binding, const std::string& color);

    // Returns false (graph untouched) on degree-cap violation or missing
    // nodes; an existing edge is an idempotent accepted no-op.
    bool link(int a, int b);

    // Returns false when the edge is missing or removing it would disconnect
    // the graph.
    bool unlink(int a, int b);

    // KU locality: only a neighbor of the current active node (or the active
    // node itself) may become active. Returns false otherwise.
    bool set_active(int n);

    int degree(int n) const;
    bool has_edge(int a, int b) const;
    bool connected() const;
    std::string serialize() const;  // canonical text form, used for byte-identity checks

  private:
    int degree_cap_;
    std::map<int, StorageNode> nodes_;
    std::set<std::pair<int, int>> edges_;
    int active_ = -1;
    int next_id_ = 0;
};

}  // namespace physarum
