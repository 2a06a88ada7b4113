#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cellflow/network.hpp"
#include "cellflow/topology.hpp"

namespace cellflow {

enum class HeadLossLaw { darcy_weisbach, hazen_williams };

inline const char* to_string(HeadLossLaw law) {
    return law == HeadLossLaw::darcy_weisbach ? "darcy-weisbach" : "hazen-williams";
}

/// Frictional head loss model Phi(f) = c |f|^(alpha-1) f per edge.
/// Darcy-Weisbach: alpha = 2, Hazen-Williams: alpha = 1.852.
struct HeadLossModel {
    HeadLossLaw law = HeadLossLaw::darcy_weisbach;
    double alpha = 2.0;
    Eigen::VectorXd c;

    static HeadLossModel direct(HeadLossLaw law, Eigen::VectorXd resistances) {
        HeadLossModel m;
        m.law = law;
        m.alpha = law == HeadLossLaw::darcy_weisbach ? 2.0 : 1.852;
        m.c = std::move(resistances);
        if ((m.c.array() <= 0.0).any())
            throw ArgumentError("head loss model: resistances must be positive");
        return m;
    }

    /// Resistance from pipe attributes (SI). For Hazen-Williams the roughness
    /// attribute is the H-W coefficient; for Darcy-Weisbach it is read as the
    /// (dimensionless) friction factor.
    static HeadLossModel from_network(const Network& net, HeadLossLaw law) {
        constexpr double g = 9.80665;
        Eigen::VectorXd c(net.edge_count());
        for (int e = 0; e < net.edge_count(); ++e) {
            const Edge& p = net.edges[e];
            if (p.kind != EdgeKind::pipe) {
                c[e] = 1.0;  // placeholder; active edges never reach the solver
                continue;
            }
            if (p.length <= 0 || p.diameter <= 0 || p.roughness <= 0)
                throw ArgumentError("pipe \"" + p.id + "\" has non-positive attributes");
            if (law == HeadLossLaw::darcy_weisbach) {
                c[e] = 8.0 * p.roughness * p.length /
                       (g * std::numbers::pi * std::numbers::pi * std::pow(p.diameter, 5));
            } else {
                c[e] = 10.674 * p.length /
                       (std::pow(p.roughness, 1.852) * std::pow(p.diameter, 4.871));
            }
        }
        return direct(law, std::move(c));
    }
};

/// Elementwise c |f|^(alpha-1) f; odd and monotone increasing in f.
inline Eigen::VectorXd head_loss(const Eigen::VectorXd& f, const HeadLossModel& model) {
    if (f.size() != model.c.size())
        throw ArgumentError("head_loss: flow length does not match model");
    Eigen::VectorXd out(f.size());
    for (Eigen::Index i = 0; i < f.size(); ++i)
        out[i] = model.c[i] * std::pow(std::abs(f[i]), model.alpha - 1.0) * f[i];
    return out;
}

/// d/df of head_loss: alpha c |f|^(alpha-1), with |f|^(alpha-1) floored at
/// `floor_val` to keep the Newton Jacobian finite and nonsingular at f = 0.
inline Eigen::VectorXd head_loss_derivative(const Eigen::VectorXd& f,
                                            const HeadLossModel& model,
                                            double floor_val = 1e-8) {
    Eigen::VectorXd out(f.size());
    for (Eigen::Index i = 0; i < f.size(); ++i) {
        double pw = std::pow(std::abs(f[i]), model.alpha - 1.0);
        out[i] = model.alpha * model.c[i] * std::max(pw, floor_val);
    }
    return out;
}

/// Converged steady state. `demand` is the full per-node mass-balance vector
/// with the implied reservoir/tank injection reported as negative demand, so
/// B1 f = demand holds on every row.
struct HydraulicState {
    Eigen::VectorXd flows;   // per edge, m^3/s
    Eigen::VectorXd heads;   // per node, m
    Eigen::VectorXd demand;  // per node, m^3/s
    double residual_mass = 0.0;
    double residual_energy = 0.0;
    int iterations = 0;
};

/// Damped Newton on the stacked residual
///     r(f, p_free) = [ B1 f - d   (junction rows)
///                      B1' p + C h(f) ]
/// with fixed heads substituted. On success both infinity norms are <= tol,
/// and the loop law B2' C h(f) = 0 then holds to within tolerance.
inline HydraulicState solve_steady_state(const Network& net, const HeadLossModel& model,
                                         double tol = 1e-10) {
    if (tol <= 0.0) throw ArgumentError("solve_steady_state: tol must be positive");
    for (const Edge& e : net.edges)
        if (e.kind != EdgeKind::pipe)
            throw StructuralError("solver cannot handle active edge \"" + e.id +
                                  "\" (" + to_string(e.kind) + "); model it separately");
    if (!detail::connected_over(net, true))
        throw StructuralError("solver requires a connected network");

    const int n = net.node_count();
    const int m = net.edge_count();
    std::vector<int> free_nodes, fixed_nodes;
    for (int i = 0; i < n; ++i)
        (net.nodes[i].fixed_head ? fixed_nodes : free_nodes).push_back(i);
    if (fixed_nodes.empty())
        throw StructuralError("solver requires at least one fixed-head node");

    IncidenceMatrix b1 = build_b1(net, false);
    const Eigen::MatrixXd B = b1.m.cast<double>();
    const int nf = static_cast<int>(free_nodes.size());

    Eigen::VectorXd d_free(nf);
    for (int k = 0; k < nf; ++k) d_free[k] = net.nodes[free_nodes[k]].demand;

    double mean_fixed = 0.0;
    for (int i : fixed_nodes) mean_fixed += *net.nodes[i].fixed_head;
    mean_fixed /= static_cast<double>(fixed_nodes.size());

    // unknowns: [flows; free heads]
    Eigen::VectorXd f = Eigen::VectorXd::Constant(m, 0.01);
    Eigen::VectorXd pf = Eigen::VectorXd::Constant(nf, mean_fixed);

    auto assemble_heads = [&](const Eigen::VectorXd& free_vals) {
        Eigen::VectorXd p(n);
        for (int i : fixed_nodes) p[i] = *net.nodes[i].fixed_head;
        for (int k = 0; k < nf; ++k) p[free_nodes[k]] = free_vals[k];
        return p;
    };
    auto residual = [&](const Eigen::VectorXd& fv, const Eigen::VectorXd& pv) {
        Eigen::VectorXd p = assemble_heads(pv);
        Eigen::VectorXd inflow = B * fv;
        Eigen::VectorXd r(nf + m);
        for (int k = 0; k < nf; ++k) r[k] = inflow[free_nodes[k]] - d_free[k];
        r.tail(m) = B.transpose() * p + head_loss(fv, model);
        return r;
    };

    Eigen::VectorXd r = residual(f, pf);
    const int max_iter = 200;
    int it = 0;
    for (; it < max_iter; ++it) {
        double mass_inf = nf > 0 ? r.head(nf).cwiseAbs().maxCoeff() : 0.0;
        double energy_inf = r.tail(m).cwiseAbs().maxCoeff();
        if (mass_inf <= tol && energy_inf <= tol) break;

        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(nf + m, nf + m);
        for (int k = 0; k < nf; ++k) J.block(k, 0, 1, m) = B.row(free_nodes[k]);
        J.block(nf, 0, m, m) = head_loss_derivative(f, model).asDiagonal();
        for (int k = 0; k < nf; ++k)
            J.block(nf, m + k, m, 1) = B.row(free_nodes[k]).transpose();

        Eigen::VectorXd step = J.partialPivLu().solve(-r);
        if (!step.allFinite())
            throw NumericalError("solver: singular Newton system");

        // step halving until the residual norm decreases
        double base_norm = r.norm();
        double scale = 1.0;
        bool improved = false;
        Eigen::VectorXd f_new, p_new, r_new;
        for (int h = 0; h < 30; ++h) {
            f_new = f + scale * step.head(m);
            p_new = pf + scale * step.tail(nf);
            r_new = residual(f_new, p_new);
            if (r_new.norm() < base_norm) { improved = true; break; }
            scale *= 0.5;
        }
        if (!improved)
            throw NumericalError("solver stalled at residual " + std::to_string(base_norm));
        f = f_new;
        pf = p_new;
        r = r_new;
    }

    double mass_inf = nf > 0 ? r.head(nf).cwiseAbs().maxCoeff() : 0.0;
    double energy_inf = r.tail(m).cwiseAbs().maxCoeff();
    if (mass_inf > tol || energy_inf > tol)
        throw NumericalError("solver did not converge within " + std::to_string(max_iter) +
                             " iterations; residual_mass=" + std::to_string(mass_inf) +
                             " residual_energy=" + std::to_string(energy_inf));

    HydraulicState st;
    st.flows = f;
    st.heads = assemble_heads(pf);
    st.iterations = it;
    st.residual_mass = mass_inf;
    st.residual_energy = energy_inf;
    st.demand = Eigen::VectorXd(n);
    Eigen::VectorXd inflow = B * f;
    for (int i = 0; i < n; ++i)
        st.demand[i] = net.nodes[i].fixed_head ? inflow[i] : net.nodes[i].demand;
    return st;
}

/// Reverses every edge carrying negative flow (and negates the flow), so the
/// returned network is oriented along the water flow. B1/B2 built from the
/// old orientation are invalidated.
inline std::pair<Network, HydraulicState> orient_to_flow(const Network& net,
                                                         const HydraulicState& state) {
    Network out = net;
    HydraulicState st = state;
    for (int e = 0; e < out.edge_count(); ++e) {
        if (st.flows[e] < 0.0) {
            std::swap(out.edges[e].tail, out.edges[e].head);
            st.flows[e] = -st.flows[e];
        }
    }
    return {std::move(out), std::move(st)};
}

}  // namespace cellflow
