#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cellflow/errors.hpp"
#include "cellflow/topology.hpp"

namespace cellflow {

enum class BasisSource { L0, L1_down, L1 };

inline const char* to_string(BasisSource s) {
    switch (s) {
        case BasisSource::L0: return "l0";
        case BasisSource::L1_down: return "l1_down";
        case BasisSource::L1: return "l1";
    }
    return "?";
}

/// Orthonormal eigenbasis of a Laplacian, eigenvalues ascending. `selected`
/// optionally holds the sparse frequency support found downstream.
struct SpectralBasis {
    Eigen::MatrixXd U;
    Eigen::VectorXd lambda;
    BasisSource source = BasisSource::L0;
    std::optional<std::vector<int>> selected;

    int dim() const { return static_cast<int>(U.rows()); }

    /// Columns of U restricted to `selected` (all columns if none selected).
    Eigen::MatrixXd selected_vectors() const {
        if (!selected) return U;
        Eigen::MatrixXd out(U.rows(), selected->size());
        for (size_t k = 0; k < selected->size(); ++k) out.col(k) = U.col((*selected)[k]);
        return out;
    }
};

/// Dense symmetric eigendecomposition with ascending eigenvalues and a
/// deterministic sign convention: each eigenvector is flipped so its first
/// largest-magnitude entry is positive.
inline SpectralBasis eig_sym(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) throw ArgumentError("eig_sym: matrix must be square");
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw ArgumentError("eig_sym: matrix is not symmetric");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eig_sym: eigendecomposition failed to converge");

    SpectralBasis basis;
    basis.lambda = solver.eigenvalues();
    basis.U = solver.eigenvectors();
    for (int j = 0; j < basis.U.cols(); ++j) {
        int arg = 0;
        double best = -1.0;
        for (int i = 0; i < basis.U.rows(); ++i) {
            double v = std::abs(basis.U(i, j));
            if (v > best) { best = v; arg = i; }
        }
        if (basis.U(arg, j) < 0.0) basis.U.col(j) = -basis.U.col(j);
    }
    return basis;
}

inline SpectralBasis spectral_basis(const LaplacianSet& lap, BasisSource source) {
    const Eigen::MatrixXi* m = nullptr;
    switch (source) {
        case BasisSource::L0: m = &lap.L0; break;
        case BasisSource::L1_down: m = &lap.L1_down; break;
        case BasisSource::L1: m = &lap.L1; break;
    }
    SpectralBasis b = eig_sym(m->cast<double>());
    b.source = source;
    return b;
}

/// Cell Fourier transform: projection onto the eigenvector basis.
inline Eigen::VectorXd fourier(const Eigen::VectorXd& signal, const SpectralBasis& basis) {
    if (signal.size() != basis.U.rows())
        throw ArgumentError("fourier: signal length does not match basis");
    return basis.U.transpose() * signal;
}

inline Eigen::VectorXd inverse_fourier(const Eigen::VectorXd& coeffs,
                                       const SpectralBasis& basis) {
    if (coeffs.size() != basis.U.cols())
        throw ArgumentError("inverse_fourier: coefficient length does not match basis");
    return basis.U * coeffs;
}

/// The three orthogonal components of an edge signal: irrotational
/// (img B1'), solenoidal (img B2) and harmonic (ker L1) parts.
struct HodgeComponents {
    Eigen::VectorXd irrotational;
    Eigen::VectorXd solenoidal;
    Eigen::VectorXd harmonic;
};

/// Hodge decomposition by rank-revealing least squares on B1' and B2, so
/// trees (empty B2) and rank-deficient complexes degrade gracefully.
inline HodgeComponents hodge_decompose(const Eigen::VectorXd& f,
                                       const IncidenceMatrix& b1,
                                       const IncidenceMatrix& b2) {
    if (f.size() != b1.cols())
        throw ArgumentError("hodge_decompose: signal length != number of edges");
    if (b2.rows() != b1.cols())
        throw ArgumentError("hodge_decompose: B2 rows != number of edges");

    HodgeComponents out;
    const Eigen::MatrixXd grad = b1.m.cast<double>().transpose();  // E x N
    out.irrotational = grad * grad.completeOrthogonalDecomposition().solve(f);

    if (b2.cols() > 0) {
        const Eigen::MatrixXd curl = b2.m.cast<double>();  // E x P
        out.solenoidal = curl * curl.completeOrthogonalDecomposition().solve(f);
    } else {
        out.solenoidal = Eigen::VectorXd::Zero(f.size());
    }
    out.harmonic = f - out.irrotational - out.solenoidal;
    return out;
}

}  // namespace cellflow
