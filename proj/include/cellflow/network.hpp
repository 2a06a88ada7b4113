#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cellflow/errors.hpp"

namespace cellflow {

enum class NodeKind { junction, reservoir, tank };
enum class EdgeKind { pipe, pump, valve };

inline const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::junction: return "junction";
        case NodeKind::reservoir: return "reservoir";
        case NodeKind::tank: return "tank";
    }
    return "?";
}

inline const char* to_string(EdgeKind k) {
    switch (k) {
        case EdgeKind::pipe: return "pipe";
        case EdgeKind::pump: return "pump";
        case EdgeKind::valve: return "valve";
    }
    return "?";
}

/// A node of the water network. Heads and demands are SI (meters, m^3/s).
/// Reservoirs and tanks carry a fixed hydraulic head; junctions carry a
/// nonnegative consumption demand.
struct Node {
    std::string id;
    NodeKind kind = NodeKind::junction;
    double elevation = 0.0;
    double demand = 0.0;
    std::optional<double> fixed_head;

    bool operator==(const Node&) const = default;
};

/// An oriented edge (tail -> head). Parallel pipes between the same node
/// pair are allowed; self-loops are not.
struct Edge {
    std::string id;
    EdgeKind kind = EdgeKind::pipe;
    int tail = -1;
    int head = -1;
    double length = 0.0;
    double diameter = 0.0;
    double roughness = 0.0;

    bool operator==(const Edge&) const = default;
};

/// Canonical in-memory model of a water distribution network.
struct Network {
    std::vector<Node> nodes;
    std::vector<Edge> edges;
    std::string name;
    std::string source;

    /// Non-fatal findings collected while building (skipped INP sections,
    /// disconnected passive subgraph, ...). Not part of structural equality.
    std::vector<std::string> warnings;

    int node_count() const { return static_cast<int>(nodes.size()); }
    int edge_count() const { return static_cast<int>(edges.size()); }

    /// Index of the node with the given id, or -1.
    int node_index(const std::string& id) const {
        for (int i = 0; i < node_count(); ++i)
            if (nodes[i].id == id) return i;
        return -1;
    }

    int edge_index(const std::string& id) const {
        for (int i = 0; i < edge_count(); ++i)
            if (edges[i].id == id) return i;
        return -1;
    }

    bool is_passive(int e) const { return edges[e].kind == EdgeKind::pipe; }

    int passive_edge_count() const {
        return static_cast<int>(std::count_if(edges.begin(), edges.end(),
            [](const Edge& e) { return e.kind == EdgeKind::pipe; }));
    }

    std::vector<int> fixed_head_nodes() const {
        std::vector<int> out;
        for (int i = 0; i < node_count(); ++i)
            if (nodes[i].fixed_head) out.push_back(i);
        return out;
    }

    /// Structural equality: nodes, edges and name; warnings and source are
    /// bookkeeping and excluded.
    bool operator==(const Network& other) const {
        return nodes == other.nodes && edges == other.edges && name == other.name;
    }
};

namespace detail {

/// Union-find connectivity over a chosen edge subset.
inline bool connected_over(const Network& net, bool passive_only) {
    const int n = net.node_count();
    if (n == 0) return true;
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const Edge& e : net.edges) {
        if (passive_only && e.kind != EdgeKind::pipe) continue;
        parent[find(e.tail)] = find(e.head);
    }
    const int root = find(0);
    for (int i = 1; i < n; ++i)
        if (find(i) != root) return false;
    return true;
}

}  // namespace detail

/// Number of connected components over all edges.
inline int component_count(const Network& net) {
    const int n = net.node_count();
    std::vector<int> parent(n);
    for (int i = 0; i < n; ++i) parent[i] = i;
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const Edge& e : net.edges) parent[find(e.tail)] = find(e.head);
    int c = 0;
    for (int i = 0; i < n; ++i)
        if (find(i) == i) ++c;
    return c;
}

/// Enforces every Network invariant; throws StructuralError on violation.
/// A disconnected passive subgraph is not fatal: it is appended to
/// net.warnings (the hydraulic solver and build_b1(include_active=false)
/// reject it later if actually needed).
inline void validate(Network& net) {
    std::unordered_set<std::string> seen;
    for (const Node& n : net.nodes) {
        if (!seen.insert(n.id).second)
            throw StructuralError("duplicate node id \"" + n.id + "\"");
        if (n.kind == NodeKind::junction) {
            if (n.demand < 0.0)
                throw StructuralError("junction \"" + n.id +
                                      "\" has negative demand (consumption convention)");
        } else if (!n.fixed_head) {
            throw StructuralError(std::string(to_string(n.kind)) + " \"" + n.id +
                                  "\" has no fixed head");
        }
    }
    seen.clear();
    for (const Edge& e : net.edges) {
        if (!seen.insert(e.id).second)
            throw StructuralError("duplicate edge id \"" + e.id + "\"");
        if (e.tail < 0 || e.tail >= net.node_count() || e.head < 0 ||
            e.head >= net.node_count())
            throw StructuralError("edge \"" + e.id + "\" references a missing node");
        if (e.tail == e.head)
            throw StructuralError("edge \"" + e.id + "\" is a self-loop");
    }
    if (!detail::connected_over(net, /*passive_only=*/true))
        net.warnings.push_back("network is disconnected over passive (pipe) edges");
}

}  // namespace cellflow
