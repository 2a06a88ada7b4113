#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "cellflow/sampling.hpp"
#include "cellflow/synthetic.hpp"

namespace cellflow {

/// Settings for the successive convex approximation loop.
struct ScaConfig {
    double lambda = 0.0;       // conservation penalty weight, >= 0
    double tau = 0.2;          // proximal weight, > 0
    double gamma0 = 1.0;       // initial step, in (0, 1]
    double alpha_bar = 1e-2;   // step decay, in (0, 1/gamma0)
    int max_outer = 500;
    double tol_outer = 1e-6;   // on ||p_next - p||_inf
    double smoothing_mu = 1e-6;
    double subproblem_tol = 1e-9;
    int subproblem_max_iter = 20000;
    std::uint64_t init_seed = 0;  // randomizes the unobserved entries of p0

    void validate() const {
        if (lambda < 0.0) throw ArgumentError("sca: lambda must be >= 0");
        if (tau <= 0.0) throw ArgumentError("sca: tau must be > 0");
        if (gamma0 <= 0.0 || gamma0 > 1.0) throw ArgumentError("sca: gamma0 must be in (0,1]");
        if (alpha_bar <= 0.0 || alpha_bar >= 1.0 / gamma0)
            throw ArgumentError("sca: alpha_bar must be in (0, 1/gamma0)");
        if (max_outer < 1 || subproblem_max_iter < 1)
            throw ArgumentError("sca: iteration caps must be positive");
        if (tol_outer <= 0.0 || subproblem_tol <= 0.0)
            throw ArgumentError("sca: tolerances must be positive");
        if (smoothing_mu <= 0.0) throw ArgumentError("sca: smoothing_mu must be > 0");
    }
};

/// Reconstruction output: the estimate plus the per-iteration surrogate cost
/// J(p^{nu+1}; p^nu) and an echo of the configuration.
struct ReconReport {
    Eigen::VectorXd estimate;
    double nmse = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> cost_trace;
    int outer_iterations = 0;
    bool converged = false;
    ScaConfig config;
    SamplingSet sampling;
};

/// Normalized mean squared error ||estimate - truth||^2 / ||truth||^2.
inline double nmse(const Eigen::VectorXd& estimate, const Eigen::VectorXd& truth) {
    if (estimate.size() != truth.size()) throw ArgumentError("nmse: length mismatch");
    const double t2 = truth.squaredNorm();
    if (t2 <= 0.0) throw ArgumentError("nmse: truth signal has zero norm");
    return (estimate - truth).squaredNorm() / t2;
}

// ---------------------------------------------------------------------------
// Band-limited data-fitting term  ||W p - p_obs||,  W = I - Dbar_S U U'
// ---------------------------------------------------------------------------

struct BandlimitedFit {
    Eigen::MatrixXd u_sel;     // dim x K selected eigenvectors
    Eigen::VectorXd off_mask;  // 1 off the sample set, 0 on it
    Eigen::VectorXd observed;  // sampled values, zero off the set
    double mu = 1e-6;          // smoothing of the norm

    static BandlimitedFit make(const Eigen::MatrixXd& u_sel, const SamplingSet& s,
                               const Eigen::VectorXd& observed, double mu) {
        BandlimitedFit fit;
        fit.u_sel = u_sel;
        fit.off_mask =
            Eigen::VectorXd::Ones(u_sel.rows()) - s.mask(static_cast<int>(u_sel.rows()));
        fit.observed = observed;
        fit.mu = mu;
        return fit;
    }

    Eigen::VectorXd apply_w(const Eigen::VectorXd& p) const {
        return p - off_mask.cwiseProduct(u_sel * (u_sel.transpose() * p));
    }
    Eigen::VectorXd apply_wt(const Eigen::VectorXd& r) const {
        return r - u_sel * (u_sel.transpose() * off_mask.cwiseProduct(r));
    }

    /// Unsmoothed residual norm ||W p - observed||.
    double residual_norm(const Eigen::VectorXd& p) const {
        return (apply_w(p) - observed).norm();
    }
    double value(const Eigen::VectorXd& p) const {
        const double r = residual_norm(p);
        return std::sqrt(r * r + mu * mu);
    }
    Eigen::VectorXd gradient(const Eigen::VectorXd& p) const {
        const Eigen::VectorXd r = apply_w(p) - observed;
        return apply_wt(r) / std::sqrt(r.squaredNorm() + mu * mu);
    }
};

// ---------------------------------------------------------------------------
// Flow-conservation penalty  g(p) = || B1 q(p) - d ||
// ---------------------------------------------------------------------------

struct GValueGrad {
    double value = 0.0;
    Eigen::VectorXd gradient;
    bool at_minimum = false;  // g = 0: penalty at its global optimum
};

/// Value and gradient of the conservation penalty. Head differences
/// t = B1' p imply the down-gradient edge flows
///     q(p) = -C^{-1/alpha} (|t|^(1/alpha) o sign t),
/// and g(p) = ||B1 q(p) - d|| with d the consumption-positive demand.
/// |t| is floored at 1e-12 inside the negative-exponent factor of the
/// gradient, where the derivative would blow up at zero head difference.
inline GValueGrad g_value_grad(const Eigen::VectorXd& p, const Eigen::MatrixXd& b1,
                               const Eigen::VectorXd& c, double alpha,
                               const Eigen::VectorXd& d) {
    const Eigen::Index n_edges = b1.cols();
    if (p.size() != b1.rows() || d.size() != b1.rows() || c.size() != n_edges)
        throw ArgumentError("g_value_grad: dimension mismatch");

    const Eigen::VectorXd t = b1.transpose() * p;
    Eigen::VectorXd c_pow(n_edges), q(n_edges);
    for (Eigen::Index e = 0; e < n_edges; ++e) {
        c_pow[e] = std::pow(c[e], -1.0 / alpha);
        const double mag = std::pow(std::abs(t[e]), 1.0 / alpha);
        q[e] = -c_pow[e] * mag * (t[e] > 0 ? 1.0 : (t[e] < 0 ? -1.0 : 0.0));
    }
    const Eigen::VectorXd mismatch = b1 * q - d;

    GValueGrad out;
    out.value = mismatch.norm();
    if (out.value <= 1e-14) {
        out.value = std::max(out.value, 0.0);
        out.gradient = Eigen::VectorXd::Zero(p.size());
        out.at_minimum = true;
        return out;
    }

    Eigen::VectorXd edge_weight = b1.transpose() * mismatch;  // E
    for (Eigen::Index e = 0; e < n_edges; ++e) {
        const double mag = std::max(std::abs(t[e]), 1e-12);
        edge_weight[e] *= c_pow[e] * std::pow(mag, 1.0 / alpha - 1.0);
    }
    out.gradient = -(b1 * edge_weight) / (alpha * out.value);
    return out;
}

// ---------------------------------------------------------------------------
// Strongly convex subproblem (the inner step of the SCA loop)
// ---------------------------------------------------------------------------

/// Minimizes  sqrt(||W p - p_obs||^2 + mu^2) + linear' (p - p_ref)
///            + tau ||p - p_ref||^2   over  p >= 0
/// by accelerated projected gradient with backtracking and restart.
/// `linear` is lambda * grad g(p_ref) in the SCA loop.
inline Eigen::VectorXd solve_subproblem(const Eigen::VectorXd& p_ref,
                                        const Eigen::VectorXd& linear,
                                        const BandlimitedFit& fit, double tau,
                                        double tol, int max_iter) {
    if (tau <= 0.0) throw ArgumentError("solve_subproblem: tau must be > 0");
    auto value = [&](const Eigen::VectorXd& p) {
        return fit.value(p) + linear.dot(p - p_ref) + tau * (p - p_ref).squaredNorm();
    };
    auto grad = [&](const Eigen::VectorXd& p) -> Eigen::VectorXd {
        return fit.gradient(p) + linear + 2.0 * tau * (p - p_ref);
    };
    auto project = [](Eigen::VectorXd v) -> Eigen::VectorXd { return v.cwiseMax(0.0); };

    Eigen::VectorXd x = project(p_ref);
    Eigen::VectorXd y = x;
    double t_mom = 1.0;
    double L = 1.0 + 2.0 * tau;
    double fx = value(x);

    for (int it = 0; it < max_iter; ++it) {
        const Eigen::VectorXd gy = grad(y);
        const double fy = value(y);

        // backtracking on the majorization at y
        Eigen::VectorXd x_new;
        for (;;) {
            x_new = project(y - gy / L);
            const Eigen::VectorXd diff = x_new - y;
            const double quad = fy + gy.dot(diff) + 0.5 * L * diff.squaredNorm();
            if (value(x_new) <= quad + 1e-15 * std::abs(quad)) break;
            L *= 2.0;
            if (L > 1e18) throw NumericalError("subproblem: backtracking diverged");
        }

        const double fx_new = value(x_new);
        if (fx_new > fx) {  // adaptive restart
            y = x;
            t_mom = 1.0;
            continue;
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_mom * t_mom));
        y = x_new + ((t_mom - 1.0) / t_next) * (x_new - x);
        x = x_new;
        fx = fx_new;
        t_mom = t_next;
        L = std::max(L * 0.5, 1e-8);

        const Eigen::VectorXd pg = x - project(x - grad(x));
        if (pg.cwiseAbs().maxCoeff() <= tol) return x;
    }
    throw NumericalError("subproblem: iteration cap reached before tolerance");
}

// ---------------------------------------------------------------------------
// SCA pressure reconstruction
// ---------------------------------------------------------------------------

/// Reconstructs the full pressure vector from samples on S by successively
/// minimizing strongly convex surrogates of the data-fit + conservation
/// objective, with the diminishing step rule
/// gamma^{nu+1} = gamma^nu (1 - alpha_bar gamma^nu).
/// cost_trace[nu] records J(p^{nu+1}; p^nu).
inline ReconReport sca_reconstruct_pressure(const Eigen::VectorXd& p_obs,
                                            const SamplingSet& s,
                                            const Eigen::MatrixXd& u_sel,
                                            const Eigen::MatrixXd& b1,
                                            const Eigen::VectorXd& c, double alpha,
                                            const Eigen::VectorXd& d,
                                            const ScaConfig& config,
                                            const Eigen::VectorXd* truth = nullptr) {
    config.validate();
    const int n = static_cast<int>(u_sel.rows());
    if (p_obs.size() != n) throw ArgumentError("sca: observation length mismatch");
    if (s.indices.empty()) throw ArgumentError("sca: empty sampling set");

    const BandlimitedFit fit = BandlimitedFit::make(u_sel, s, p_obs, config.smoothing_mu);

    // feasible start: observed values on S, random positive values elsewhere
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int i : s.indices) {
        lo = std::min(lo, p_obs[i]);
        hi = std::max(hi, p_obs[i]);
    }
    if (!(hi > 0.0)) hi = 1.0;
    if (!std::isfinite(lo) || lo < 0.0) lo = 0.0;
    detail::Rng rng(config.init_seed);
    Eigen::VectorXd p(n);
    for (int i = 0; i < n; ++i)
        p[i] = s.contains(i) ? p_obs[i] : rng.uniform(lo, hi);

    ReconReport report;
    report.config = config;
    report.sampling = s;

    double gamma = config.gamma0;
    for (int nu = 0; nu < config.max_outer; ++nu) {
        Eigen::VectorXd linear = Eigen::VectorXd::Zero(n);
        if (config.lambda > 0.0) {
            const GValueGrad g = g_value_grad(p, b1, c, alpha, d);
            if (!g.at_minimum) linear = config.lambda * g.gradient;
        }
        const Eigen::VectorXd p_hat =
            solve_subproblem(p, linear, fit, config.tau, config.subproblem_tol,
                             config.subproblem_max_iter);
        const Eigen::VectorXd p_next = p + gamma * (p_hat - p);

        const double cost = fit.value(p_next) + linear.dot(p_next - p) +
                            config.tau * (p_next - p).squaredNorm();
        report.cost_trace.push_back(cost);

        const double move = (p_next - p).cwiseAbs().maxCoeff();
        p = p_next;
        report.outer_iterations = nu + 1;
        if (move <= config.tol_outer) {
            report.converged = true;
            break;
        }
        gamma = gamma * (1.0 - config.alpha_bar * gamma);
    }

    report.estimate = p;
    if (truth) report.nmse = nmse(report.estimate, *truth);
    return report;
}

// ---------------------------------------------------------------------------
// Closed-form flow reconstruction
// ---------------------------------------------------------------------------

/// Solves the convex flow recovery problem
///    min ||W f - f_obs||^2 + beta ||B1 f - d||^2  s.t. f >= 0
/// by the closed form f* = max(M^{-1} (W' f_obs + beta B1' d), 0) with
/// M = W'W + beta B1'B1. The network is assumed flow-oriented, so f >= 0
/// is the physical constraint.
inline Eigen::VectorXd reconstruct_flow(const Eigen::VectorXd& f_obs, const SamplingSet& s,
                                        const Eigen::MatrixXd& u_sel,
                                        const Eigen::MatrixXd& b1,
                                        const Eigen::VectorXd& d, double beta) {
    if (beta < 0.0) throw ArgumentError("reconstruct_flow: beta must be >= 0");
    const int m = static_cast<int>(u_sel.rows());
    if (f_obs.size() != m || b1.cols() != m)
        throw ArgumentError("reconstruct_flow: dimension mismatch");

    Eigen::MatrixXd w = Eigen::MatrixXd::Identity(m, m);
    const Eigen::VectorXd mask = s.mask(m);
    const Eigen::MatrixXd proj = u_sel * u_sel.transpose();
    for (int i = 0; i < m; ++i)
        if (mask[i] == 0.0) w.row(i) -= proj.row(i);

    const Eigen::MatrixXd big_m = w.transpose() * w + beta * b1.transpose() * b1;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(big_m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()[0] <= 1e-10)
        throw RecoveryError(
            "flow system is singular; increase beta or add samples");

    const Eigen::VectorXd rhs = w.transpose() * f_obs + beta * b1.transpose() * d;
    return big_m.ldlt().solve(rhs).cwiseMax(0.0);
}

}  // namespace cellflow
