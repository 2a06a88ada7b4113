#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <numeric>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "cellflow/network.hpp"

namespace cellflow {

enum class IncidenceKind { b1, b2 };

/// Signed incidence matrix with entries in {-1, 0, +1}.
/// For B1 (N x E) the convention is head = +1, tail = -1, so B1*f is the net
/// inflow at each node and B1'*p is the head difference along each edge.
/// For B2 (E x P) each column traces one oriented simple cycle.
struct IncidenceMatrix {
    Eigen::MatrixXi m;
    IncidenceKind kind = IncidenceKind::b1;
    /// For B1: original network edge index of each column (differs from the
    /// identity when active edges were dropped). For B2: cycle lengths.
    std::vector<int> columns;

    int rows() const { return static_cast<int>(m.rows()); }
    int cols() const { return static_cast<int>(m.cols()); }
};

/// The combinatorial Laplacians of a second-order complex, kept as exact
/// integer matrices.
struct LaplacianSet {
    Eigen::MatrixXi L0;       // N x N
    Eigen::MatrixXi L1_down;  // E x E
    Eigen::MatrixXi L1_up;    // E x E
    Eigen::MatrixXi L1;       // E x E
    Eigen::MatrixXi L2;       // P x P
};

/// Node-edge incidence of the network under the head=+1 convention.
/// With include_active=false, pump and valve columns are dropped and the
/// remaining graph must stay connected.
inline IncidenceMatrix build_b1(const Network& net, bool include_active = true) {
    std::vector<int> cols;
    for (int e = 0; e < net.edge_count(); ++e)
        if (include_active || net.is_passive(e)) cols.push_back(e);

    IncidenceMatrix b1;
    b1.kind = IncidenceKind::b1;
    b1.columns = cols;
    b1.m = Eigen::MatrixXi::Zero(net.node_count(), static_cast<int>(cols.size()));
    for (int j = 0; j < static_cast<int>(cols.size()); ++j) {
        const Edge& e = net.edges[cols[j]];
        b1.m(e.head, j) = 1;
        b1.m(e.tail, j) = -1;
    }

    if (!include_active && static_cast<int>(cols.size()) < net.edge_count()) {
        Network passive;
        passive.nodes = net.nodes;
        for (int c : cols) passive.edges.push_back(net.edges[c]);
        if (!detail::connected_over(passive, true))
            throw StructuralError(
                "network is disconnected once pump/valve edges are removed");
    }
    return b1;
}

namespace detail {

// Exact incremental rank tracking over the rationals, via fraction-free
// elimination on int64 with gcd normalization.
class ExactColumnBasis {
  public:
    explicit ExactColumnBasis(int dim) : dim_(dim) {}

    int rank() const { return static_cast<int>(reduced_.size()); }

    /// Reduces `col` against the accepted columns; if independent, stores the
    /// reduced form and returns true.
    bool try_add(const std::vector<std::int64_t>& col) {
        std::vector<std::int64_t> c = col;
        for (size_t k = 0; k < reduced_.size(); ++k) {
            const std::int64_t cp = c[pivot_[k]];
            if (cp == 0) continue;
            const std::int64_t rp = reduced_[k][pivot_[k]];
            for (int i = 0; i < dim_; ++i) {
                __int128 v = static_cast<__int128>(c[i]) * rp -
                             static_cast<__int128>(reduced_[k][i]) * cp;
                if (v > INT64_MAX || v < INT64_MIN)
                    throw NumericalError("cycle independence check: integer overflow");
                c[i] = static_cast<std::int64_t>(v);
            }
            normalize(c);
        }
        int pivot = -1;
        for (int i = 0; i < dim_; ++i)
            if (c[i] != 0) { pivot = i; break; }
        if (pivot < 0) return false;
        reduced_.push_back(std::move(c));
        pivot_.push_back(pivot);
        return true;
    }

  private:
    static void normalize(std::vector<std::int64_t>& c) {
        std::int64_t g = 0;
        for (std::int64_t v : c) g = std::gcd(g, v < 0 ? -v : v);
        if (g > 1)
            for (std::int64_t& v : c) v /= g;
    }

    int dim_;
    std::vector<std::vector<std::int64_t>> reduced_;
    std::vector<int> pivot_;
};

struct CycleCandidate {
    std::vector<int> edges;  // sorted edge indices (the dedupe/tie-break key)
};

// Oriented column for a simple cycle: traversal starts at the lowest-index
// edge in that edge's own tail->head direction; each edge contributes +1 if
// traversed along its orientation, -1 against.
inline std::vector<std::int64_t> orient_cycle(const std::vector<int>& cycle_edges,
                                              const std::vector<int>& tail,
                                              const std::vector<int>& head, int n_edges) {
    std::vector<std::int64_t> col(n_edges, 0);
    const int e0 = cycle_edges.front();  // lowest index (edges are sorted)
    int start = tail[e0];
    int prev_edge = e0;
    int cur = head[e0];
    col[e0] = 1;
    while (cur != start) {
        for (int e : cycle_edges) {
            if (e == prev_edge || col[e] != 0) continue;
            if (tail[e] == cur) {
                col[e] = 1;
                cur = head[e];
                prev_edge = e;
                break;
            }
            if (head[e] == cur) {
                col[e] = -1;
                cur = tail[e];
                prev_edge = e;
                break;
            }
        }
    }
    return col;
}

}  // namespace detail

/// Edge-cell incidence: fills independent simple cycles as 2-cells, shortest
/// first (triangles, then quadrilaterals, ... up to p_max sides).
///
/// Candidates come from a breadth-first shortest-cycle family: for every root
/// vertex x and edge (u,v), the cycle SP(x,u) + (u,v) + SP(v,x) whenever the
/// two tree paths meet only at x. Candidates of equal length are ordered
/// lexicographically by their sorted edge-index tuple and tested for
/// independence by exact fraction-free elimination. The search stops early
/// once the rank reaches the cyclomatic number E - N + C.
inline IncidenceMatrix build_b2(const IncidenceMatrix& b1, int p_max) {
    if (b1.kind != IncidenceKind::b1)
        throw ArgumentError("build_b2 expects a B1 incidence matrix");
    if (p_max < 3) throw ArgumentError("build_b2: p_max must be >= 3");

    const int n = b1.rows();
    const int m = b1.cols();

    std::vector<int> tail(m, -1), head(m, -1);
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < n; ++i) {
            if (b1.m(i, j) == 1) head[j] = i;
            if (b1.m(i, j) == -1) tail[j] = i;
        }
        if (tail[j] < 0 || head[j] < 0)
            throw ArgumentError("build_b2: malformed B1 column " + std::to_string(j));
    }

    // adjacency: vertex -> (neighbor, edge), sorted for deterministic BFS
    std::vector<std::vector<std::pair<int, int>>> adj(n);
    for (int j = 0; j < m; ++j) {
        adj[tail[j]].push_back({head[j], j});
        adj[head[j]].push_back({tail[j], j});
    }
    for (auto& a : adj) std::sort(a.begin(), a.end());

    // BFS shortest-path forest from every root
    const int INF = 1 << 29;
    std::vector<std::vector<int>> dist(n, std::vector<int>(n, INF));
    std::vector<std::vector<int>> parent_edge(n, std::vector<int>(n, -1));
    int components = 0;
    std::vector<char> seen(n, 0);
    for (int x = 0; x < n; ++x) {
        if (!seen[x]) ++components;
        auto& d = dist[x];
        auto& pe = parent_edge[x];
        d[x] = 0;
        std::deque<int> q{x};
        while (!q.empty()) {
            int v = q.front();
            q.pop_front();
            seen[v] = 1;
            for (auto [w, e] : adj[v]) {
                if (d[w] != INF) continue;
                d[w] = d[v] + 1;
                pe[w] = e;
                q.push_back(w);
            }
        }
    }

    const int target_rank = m - n + components;
    detail::ExactColumnBasis basis(m);
    std::vector<std::vector<std::int64_t>> accepted_cols;
    std::vector<int> accepted_len;

    auto path_to_root = [&](int x, int v, std::vector<int>& edges_out,
                            std::vector<int>& verts_out) {
        while (v != x) {
            int e = parent_edge[x][v];
            edges_out.push_back(e);
            verts_out.push_back(v);
            v = (tail[e] == v) ? head[e] : tail[e];
        }
    };

    for (int len = 3; len <= p_max && basis.rank() < target_rank; ++len) {
        std::set<std::vector<int>> bucket;  // sorted edge tuples, lexicographic
        for (int x = 0; x < n; ++x) {
            for (int e = 0; e < m; ++e) {
                const int u = tail[e], v = head[e];
                if (dist[x][u] == INF || dist[x][v] == INF) continue;
                if (dist[x][u] + dist[x][v] + 1 != len) continue;
                std::vector<int> edges{e}, vu, vv;
                path_to_root(x, u, edges, vu);
                path_to_root(x, v, edges, vv);
                // the two tree paths must meet only at the root
                std::vector<int> verts = vu;
                verts.insert(verts.end(), vv.begin(), vv.end());
                verts.push_back(x);
                std::sort(verts.begin(), verts.end());
                if (std::adjacent_find(verts.begin(), verts.end()) != verts.end())
                    continue;
                std::sort(edges.begin(), edges.end());
                if (std::adjacent_find(edges.begin(), edges.end()) != edges.end())
                    continue;
                bucket.insert(std::move(edges));
            }
        }
        for (const auto& cyc : bucket) {
            if (basis.rank() >= target_rank) break;
            auto col = detail::orient_cycle(cyc, tail, head, m);
            if (basis.try_add(col)) {
                accepted_cols.push_back(std::move(col));
                accepted_len.push_back(len);
            }
        }
    }

    IncidenceMatrix b2;
    b2.kind = IncidenceKind::b2;
    b2.columns = accepted_len;
    b2.m = Eigen::MatrixXi::Zero(m, static_cast<int>(accepted_cols.size()));
    for (int j = 0; j < static_cast<int>(accepted_cols.size()); ++j)
        for (int i = 0; i < m; ++i)
            b2.m(i, j) = static_cast<int>(accepted_cols[j][i]);
    return b2;
}

/// All five Laplacians of Eq.-style L0 = B1*B1', L1 = B1'*B1 + B2*B2',
/// L2 = B2'*B2, computed exactly in integers.
inline LaplacianSet laplacians(const IncidenceMatrix& b1, const IncidenceMatrix& b2) {
    if (b1.cols() != b2.rows())
        throw ArgumentError("laplacians: B1 columns (" + std::to_string(b1.cols()) +
                            ") != B2 rows (" + std::to_string(b2.rows()) + ")");
    LaplacianSet out;
    out.L0 = b1.m * b1.m.transpose();
    out.L1_down = b1.m.transpose() * b1.m;
    out.L1_up = b2.m * b2.m.transpose();
    out.L1 = out.L1_down + out.L1_up;
    out.L2 = b2.m.transpose() * b2.m;
    return out;
}

/// Second-order cell complex bundling the incidences and Laplacians.
struct CellComplex {
    IncidenceMatrix b1;
    IncidenceMatrix b2;
    LaplacianSet lap;

    int node_count() const { return b1.rows(); }
    int edge_count() const { return b1.cols(); }
    int cell_count() const { return b2.cols(); }
};

inline CellComplex build_complex(const Network& net, int p_max, bool include_active = false) {
    CellComplex cx;
    cx.b1 = build_b1(net, include_active);
    cx.b2 = build_b2(cx.b1, p_max);
    cx.lap = laplacians(cx.b1, cx.b2);
    return cx;
}

}  // namespace cellflow
