#include "physarum/graphstore.hpp"

#include <algorithm>
#include <sstream>

namespace physarum {

double color_weight(const PreferenceTable& table, const std::string& color) {
    auto it = table.find(color);
    if (it == table.end()) throw ConfigError("unknown color label '" + color + "' in preference table");
    return it->second;
}

int StorageGraph::add_node(const Binding& binding, const std::string& color) {
    if (!binding_exists(binding))
        throw ScenarioError("storage node binding " + std::to_string(binding.id) + " does not resolve");
    if (!nodes_.empty() && !reachable(binding))
        throw ScenarioError("storage node binding not reachable by growth from the active node");
    int id = next_id_++;
    nodes_[id] = StorageNode{id, binding, color};
    if (active_ < 0) active_ = id;
    return id;
}

int StorageGraph::degree(int n) const {
    int d = 0;
    for (const auto& e : edges_)
        if (e.first == n || e.second == n) ++d;
    return d;
}

bool StorageGraph::has_edge(int a, int b) const {
    return edges_.count({std::min(a, b), std::max(a, b)}) > 0;
}

bool StorageGraph::link(int a, int b) {
    if (a == b || !nodes_.count(a) || !nodes_.count(b)) return false;
    if (has_edge(a, b)) return true;  // idempotent
    if (degree(a) >= degree_cap_ || degree(b) >= degree_cap_) return false;
    edges_.insert({std::min(a, b), std::max(a, b)});
    return true;
}

bool StorageGraph::unlink(int a, int b) {
    auto key = std::make_pair(std::min(a, b), std::max(a, b));
    if (!edges_.count(key)) return false;
    edges_.erase(key);
    if (!connected()) {
        edges_.insert(key);  // rejected: would disconnect the storage
        return false;
    }
    return true;
}

bool StorageGraph::set_active(int n) {
    if (!nodes_.count(n)) return false;
    if (n == active_ || has_edge(n, active_)) {
        active_ = n;
        return true;
    }
    return false;
}

bool StorageGraph::connected() const {
    if (nodes_.empty()) return true;
    std::set<int> seen{nodes_.begin()->first};
    std::vector<int> stack{nodes_.begin()->first};
    while (!stack.empty()) {
        int n = stack.back();
        stack.pop_back();
        for (const auto& e : edges_) {
            int other = e.first == n ? e.second : (e.second == n ? e.first : -1);
            if (other >= 0 && seen.insert(other).second) stack.push_back(other);
        }
    }
    return seen.size() == nodes_.size();
}

std::string StorageGraph::serialize() const {
    std::ostringstream os;
    os << "cap " << degree_cap_ << " active " << active_ << "\n";
    for (const auto& [id, n] : nodes_)
        os << "node " << id << " " << (n.binding.kind == BindingKind::Site ? "site" : "body") << ":"
           << n.binding.id << " " << n.color << "\n";
    for (const auto& e : edges_) os << "edge " << e.first << " " << e.second << "\n";
    return os.str();
}

}  // namespace physarum
