#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "cellflow/spectral.hpp"

namespace cellflow {

/// Sparse frequency support of one or more snapshots in an orthonormal basis.
struct SparsityResult {
    std::vector<int> selected;     // ascending frequency indices
    Eigen::MatrixXd coefficients;  // dim x snapshots, zero off the support
    double residual_norm = 0.0;
    double epsilon = 0.0;
    double threshold = 0.0;
    bool empty_support = false;
};

/// Basis pursuit with an orthonormal dictionary, solved exactly: the
/// constrained L1 minimizer is the soft-thresholding of the coefficients
/// X_hat = V' X at the largest level theta whose clipped Frobenius residual
/// sqrt(sum min(|x_ij|, theta)^2) still satisfies <= epsilon; theta is found
/// by bisection. The support is the union of the surviving coefficient rows.
inline SparsityResult sparse_support(const Eigen::MatrixXd& snapshots,
                                     const SpectralBasis& basis, double epsilon) {
    if (epsilon < 0.0) throw ArgumentError("sparse_support: epsilon must be >= 0");
    if (snapshots.rows() != basis.U.rows())
        throw ArgumentError("sparse_support: snapshot length does not match basis");
    const double total = snapshots.norm();
    if (total == 0.0) throw ArgumentError("sparse_support: snapshots are identically zero");
    {
        const Eigen::MatrixXd gram = basis.U.transpose() * basis.U;
        const Eigen::MatrixXd eye =
            Eigen::MatrixXd::Identity(gram.rows(), gram.cols());
        if ((gram - eye).cwiseAbs().maxCoeff() > 1e-10)
            throw ArgumentError("sparse_support: basis is not orthonormal");
    }

    SparsityResult res;
    res.epsilon = epsilon;
    Eigen::MatrixXd xhat = basis.U.transpose() * snapshots;

    // rho(theta) = clipped residual; nondecreasing in theta.
    auto rho = [&xhat](double theta) {
        double s = 0.0;
        for (Eigen::Index j = 0; j < xhat.cols(); ++j)
            for (Eigen::Index i = 0; i < xhat.rows(); ++i) {
                double clipped = std::min(std::abs(xhat(i, j)), theta);
                s += clipped * clipped;
            }
        return std::sqrt(s);
    };

    const double theta_max = xhat.cwiseAbs().maxCoeff();
    double theta = 0.0;
    if (epsilon >= total) {
        res.empty_support = true;
        theta = theta_max;
    } else if (epsilon > 0.0) {
        double lo = 0.0, hi = theta_max;  // rho(lo) = 0 <= eps, rho(hi) = ||X||_F > eps
        const double width_tol = 1e-12 * std::max(1.0, theta_max);
        while (hi - lo > width_tol) {
            double mid = 0.5 * (lo + hi);
            (rho(mid) <= epsilon ? lo : hi) = mid;
        }
        theta = lo;  // feasible endpoint
    }
    res.threshold = theta;

    // numerical floor so float dust in exact-representation cases (theta ~ 0)
    // does not inflate the support
    const double dust = 1e-12 * theta_max;
    res.coefficients = Eigen::MatrixXd::Zero(xhat.rows(), xhat.cols());
    std::vector<char> live(xhat.rows(), 0);
    for (Eigen::Index j = 0; j < xhat.cols(); ++j)
        for (Eigen::Index i = 0; i < xhat.rows(); ++i) {
            double mag = std::abs(xhat(i, j)) - theta;
            if (mag > dust) {
                res.coefficients(i, j) = (xhat(i, j) > 0 ? mag : -mag);
                live[i] = 1;
            }
        }
    for (int i = 0; i < static_cast<int>(live.size()); ++i)
        if (live[i]) res.selected.push_back(i);
    res.residual_norm = rho(theta);
    if (res.selected.empty()) res.empty_support = true;
    return res;
}

}  // namespace cellflow
