#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <set>
#include <string>
#include <utility>

#include "cellflow/network.hpp"

namespace cellflow {

namespace detail {

/// Deterministic uniforms on top of mt19937_64. std::uniform_*_distribution
/// is implementation-defined, so results would not be stable across standard
/// libraries; these are.
struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}

    double uniform() {  // [0, 1)
        return static_cast<double>(gen() >> 11) * 0x1.0p-53;
    }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int lo, int hi) {  // inclusive, unbiased enough at desk scale
        return lo + static_cast<int>(gen() % static_cast<std::uint64_t>(hi - lo + 1));
    }
};

}  // namespace detail

/// Deterministic random looped network: a random spanning tree over n_nodes
/// plus floor(loop_fraction * n_nodes) chord edges, each chord closing one
/// independent cycle (no parallel chords, so the cyclomatic number equals the
/// chord count whenever enough node pairs exist). Node 0 is the reservoir.
inline Network generate_synthetic(std::uint64_t seed, int n_nodes, double loop_fraction) {
    if (n_nodes < 3) throw ArgumentError("generate_synthetic: n_nodes must be >= 3");
    if (loop_fraction < 0.0 || loop_fraction > 1.0)
        throw ArgumentError("generate_synthetic: loop_fraction must be in [0, 1]");

    detail::Rng rng(seed);
    Network net;
    net.name = "synthetic-s" + std::to_string(seed) + "-n" + std::to_string(n_nodes);
    net.source = "synthetic";

    const double reservoir_head = 60.0;
    for (int i = 0; i < n_nodes; ++i) {
        Node n;
        if (i == 0) {
            n.id = "R0";
            n.kind = NodeKind::reservoir;
            n.fixed_head = reservoir_head;
        } else {
            n.id = "J" + std::to_string(i);
            n.kind = NodeKind::junction;
            n.demand = rng.uniform(0.001, 0.01);
        }
        net.nodes.push_back(std::move(n));
    }

    std::set<std::pair<int, int>> used;
    auto add_pipe = [&](int u, int v) {
        Edge e;
        e.id = "P" + std::to_string(net.edge_count());
        e.kind = EdgeKind::pipe;
        e.tail = u;
        e.head = v;
        e.length = rng.uniform(100.0, 1000.0);
        e.diameter = 0.3;
        e.roughness = 120.0;  // Hazen-Williams coefficient
        used.insert({std::min(u, v), std::max(u, v)});
        net.edges.push_back(std::move(e));
    };

    // Spanning tree: each node attaches to a uniformly random earlier node,
    // oriented away from the reservoir.
    for (int i = 1; i < n_nodes; ++i) add_pipe(rng.uniform_int(0, i - 1), i);

    // Chords by rejection sampling over unused node pairs.
    const long max_chords =
        static_cast<long>(n_nodes) * (n_nodes - 1) / 2 - (n_nodes - 1);
    long target = static_cast<long>(std::floor(loop_fraction * n_nodes));
    target = std::min(target, max_chords);
    long added = 0;
    while (added < target) {
        int u = rng.uniform_int(0, n_nodes - 1);
        int v = rng.uniform_int(0, n_nodes - 1);
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        if (used.count({u, v})) continue;
        add_pipe(u, v);
        ++added;
    }

    validate(net);
    return net;
}

}  // namespace cellflow
