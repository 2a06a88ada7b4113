#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "cellflow/hydraulics.hpp"
#include "cellflow/recon.hpp"
#include "cellflow/sparsify.hpp"
#include "cellflow/spectral.hpp"
#include "cellflow/synthetic.hpp"
#include "cellflow/topology.hpp"

namespace cellflow {

/// Shared knobs of a reconstruction experiment on one network.
struct ExperimentSetup {
    HeadLossLaw law = HeadLossLaw::hazen_williams;
    int p_max = 30;
    double epsilon_rel = 0.05;  // basis-pursuit budget as a fraction of ||X||_F
    double solver_tol = 1e-9;
};

struct TrialResult {
    double nmse = 0.0;
    double fit_term = 0.0;           // squared data-fitting residual
    double conservation_term = 0.0;  // squared mass-balance violation
    int samples = 0;
    int support_size = 0;
};

/// Ground truth for one network: solved state plus the flow-oriented copy
/// (edge signals are reconstructed on the oriented network).
struct GroundTruth {
    Network net;           // original orientation
    Network oriented;      // edges aligned with the flow
    HydraulicState state;  // solved on `net`
    Eigen::VectorXd oriented_flows;
};

inline GroundTruth solve_truth(const Network& net, const ExperimentSetup& setup) {
    GroundTruth gt;
    gt.net = net;
    HeadLossModel model = HeadLossModel::from_network(net, setup.law);
    gt.state = solve_steady_state(net, model, setup.solver_tol);
    auto [oriented, ostate] = orient_to_flow(net, gt.state);
    gt.oriented = std::move(oriented);
    gt.oriented_flows = ostate.flows;
    return gt;
}

/// Pressure pipeline: L0 basis -> sparse support on the true heads ->
/// Max-Det placement -> SCA reconstruction.
inline TrialResult pressure_trial(const GroundTruth& gt, const ExperimentSetup& setup,
                                  int n_samples, double lambda, std::uint64_t seed,
                                  ScaConfig base = {}, ReconReport* report_out = nullptr) {
    const CellComplex cx = build_complex(gt.net, setup.p_max);
    SpectralBasis basis = spectral_basis(cx.lap, BasisSource::L0);

    const Eigen::VectorXd& truth = gt.state.heads;
    SparsityResult spars =
        sparse_support(truth, basis, setup.epsilon_rel * truth.norm());
    basis.selected = spars.selected;
    const Eigen::MatrixXd u_sel = basis.selected_vectors();

    SamplingSet s = maxdet_place(u_sel, n_samples);
    s.orientation = Orientation::node;
    s.basis_selected = spars.selected;

    const Eigen::VectorXd p_obs = s.mask(truth.size()).cwiseProduct(truth);

    ScaConfig config = base;
    config.lambda = lambda;
    config.init_seed = seed;
    HeadLossModel model = HeadLossModel::from_network(gt.net, setup.law);
    const Eigen::MatrixXd b1d = cx.b1.m.cast<double>();
    ReconReport report = sca_reconstruct_pressure(p_obs, s, u_sel, b1d, model.c,
                                                  model.alpha, gt.state.demand, config,
                                                  &truth);

    TrialResult r;
    r.nmse = report.nmse;
    r.samples = n_samples;
    r.support_size = static_cast<int>(spars.selected.size());
    const BandlimitedFit fit = BandlimitedFit::make(u_sel, s, p_obs, config.smoothing_mu);
    r.fit_term = std::pow(fit.residual_norm(report.estimate), 2);
    const GValueGrad g = g_value_grad(report.estimate, b1d, model.c, model.alpha,
                                      gt.state.demand);
    r.conservation_term = g.value * g.value;
    if (report_out) *report_out = std::move(report);
    return r;
}

/// Flow pipeline on the oriented network: L1 or L1_down basis -> sparse
/// support on the true flows -> Max-Det placement -> closed-form recovery.
inline TrialResult flow_trial(const GroundTruth& gt, const ExperimentSetup& setup,
                              BasisSource source, int n_samples, double beta) {
    const CellComplex cx = build_complex(gt.oriented, setup.p_max);
    SpectralBasis basis = spectral_basis(cx.lap, source);

    const Eigen::VectorXd& truth = gt.oriented_flows;
    SparsityResult spars =
        sparse_support(truth, basis, setup.epsilon_rel * truth.norm());
    basis.selected = spars.selected;
    const Eigen::MatrixXd u_sel = basis.selected_vectors();

    SamplingSet s = maxdet_place(u_sel, n_samples);
    s.orientation = Orientation::edge;
    s.basis_selected = spars.selected;

    const Eigen::VectorXd f_obs = s.mask(truth.size()).cwiseProduct(truth);
    const Eigen::MatrixXd b1d = cx.b1.m.cast<double>();
    const Eigen::VectorXd f_est =
        reconstruct_flow(f_obs, s, u_sel, b1d, gt.state.demand, beta);

    TrialResult r;
    r.nmse = nmse(f_est, truth);
    r.samples = n_samples;
    r.support_size = static_cast<int>(spars.selected.size());
    Eigen::MatrixXd w = Eigen::MatrixXd::Identity(truth.size(), truth.size());
    const Eigen::MatrixXd proj = u_sel * u_sel.transpose();
    const Eigen::VectorXd mask = s.mask(truth.size());
    for (int i = 0; i < truth.size(); ++i)
        if (mask[i] == 0.0) w.row(i) -= proj.row(i);
    r.fit_term = (w * f_est - f_obs).squaredNorm();
    r.conservation_term = (b1d * f_est - gt.state.demand).squaredNorm();
    return r;
}

/// Runs fn(i) for i in [0, count) on up to `jobs` threads. Exceptions are
/// rethrown on the calling thread.
inline void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
    jobs = std::max(1, std::min(jobs, count));
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(jobs);
    for (int t = 0; t < jobs; ++t) {
        pool.emplace_back([&, t] {
            try {
                for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace cellflow
