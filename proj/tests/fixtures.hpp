#pragma once

#include <string>

#include "cellflow/network.hpp"

namespace fixtures {

/// Triangle: reservoir a feeding junctions b and c; edges ab, bc, ca.
inline cellflow::Network triangle(double demand = 0.01) {
    using namespace cellflow;
    Network net;
    net.name = "triangle";
    Node a{"a", NodeKind::reservoir, 10.0, 0.0, 10.0};
    Node b{"b", NodeKind::junction, 0.0, demand, {}};
    Node c{"c", NodeKind::junction, 0.0, demand, {}};
    net.nodes = {a, b, c};
    net.edges = {
        {"ab", EdgeKind::pipe, 0, 1, 100.0, 0.3, 100.0},
        {"bc", EdgeKind::pipe, 1, 2, 100.0, 0.3, 100.0},
        {"ca", EdgeKind::pipe, 2, 0, 100.0, 0.3, 100.0},
    };
    validate(net);
    return net;
}

/// Looped 7-node, 9-edge network shaped like the small demo graph used for
/// node-signal experiments.
inline cellflow::Network seven_node() {
    using namespace cellflow;
    Network net;
    net.name = "seven-node";
    for (int i = 0; i < 7; ++i) {
        Node n;
        n.id = "n" + std::to_string(i);
        if (i == 0) {
            n.kind = NodeKind::reservoir;
            n.fixed_head = 30.0;
        } else {
            n.kind = NodeKind::junction;
            n.demand = 0.002 + 0.001 * i;
        }
        net.nodes.push_back(n);
    }
    const int pairs[9][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5},
                             {5, 6}, {6, 0}, {1, 5}, {2, 4}};
    for (int e = 0; e < 9; ++e)
        net.edges.push_back({"e" + std::to_string(e), EdgeKind::pipe, pairs[e][0],
                             pairs[e][1], 200.0 + 50.0 * e, 0.3, 110.0});
    validate(net);
    return net;
}

/// Cell-complex fixture: 6 nodes, 9 edges, exactly two triangle cells and one
/// quadrilateral cell, and one harmonic degree of freedom. The harmonic class
/// is carried by twin parallel mains (e7, e8) feeding the pendant node 5; a
/// circulation around that pair has zero divergence and zero curl but is no
/// polygon, so it stays unfilled at any p_max.
inline cellflow::Network six_node_complex() {
    using namespace cellflow;
    Network net;
    net.name = "six-node-complex";
    for (int i = 0; i < 6; ++i) {
        Node n;
        n.id = "n" + std::to_string(i);
        if (i == 0) {
            n.kind = NodeKind::reservoir;
            n.fixed_head = 40.0;
        } else {
            n.kind = NodeKind::junction;
            n.demand = 0.001 * i;
        }
        net.nodes.push_back(n);
    }
    const int pairs[9][2] = {{0, 1}, {0, 2}, {1, 2}, {0, 3}, {1, 3},
                             {2, 4}, {3, 4}, {4, 5}, {4, 5}};
    for (int e = 0; e < 9; ++e)
        net.edges.push_back({"e" + std::to_string(e), EdgeKind::pipe, pairs[e][0],
                             pairs[e][1], 150.0 + 25.0 * e, 0.3, 110.0});
    validate(net);
    return net;
}

inline std::string minimal_inp() {
    return R"([TITLE]
Minimal test system
[JUNCTIONS]
;id  elev  demand
J1   5.0   0.010
J2   4.0   0.020
[RESERVOIRS]
R1   50.0
[PIPES]
;id  from  to  length  diam  rough
P1   R1    J1  300.0   0.3   120
P2   J1    J2  200.0   0.25  120
[END]
)";
}

}  // namespace fixtures
