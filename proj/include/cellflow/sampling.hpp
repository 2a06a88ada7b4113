#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "cellflow/errors.hpp"
#include "cellflow/io.hpp"

namespace cellflow {

/// A set of sampled elements (nodes or edges), ascending.
struct SamplingSet {
    std::vector<int> indices;
    Orientation orientation = Orientation::node;
    std::vector<int> basis_selected;  // the frequency support the set was built for

    int size() const { return static_cast<int>(indices.size()); }

    bool contains(int i) const {
        return std::binary_search(indices.begin(), indices.end(), i);
    }

    /// 0/1 mask of length `dim`.
    Eigen::VectorXd mask(int dim) const {
        Eigen::VectorXd m = Eigen::VectorXd::Zero(dim);
        for (int i : indices) m[i] = 1.0;
        return m;
    }
};

namespace detail {

struct PseudoDet {
    int rank = 0;      // eigenvalues above the floor
    double value = 1.0;  // their product

    /// Rank-deficient candidates always lose: a pseudo-determinant over fewer
    /// above-floor eigenvalues is not comparable to one over more.
    bool operator>(const PseudoDet& o) const {
        if (rank != o.rank) return rank > o.rank;
        return value > o.value;
    }
};

/// Gram eigenvalue product above `floor_val`. Uses the smaller of the two
/// Gram matrices (same nonzero spectrum).
inline PseudoDet pseudo_det(const Eigen::MatrixXd& rows, double floor_val = 1e-10) {
    Eigen::MatrixXd gram;
    if (rows.rows() <= rows.cols())
        gram = rows * rows.transpose();
    else
        gram = rows.transpose() * rows;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
    PseudoDet p;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()[i] > floor_val) {
            p.value *= es.eigenvalues()[i];
            ++p.rank;
        }
    return p;
}

}  // namespace detail

/// Greedy Max-Det sensor placement over the rows of a (band-limited) basis:
/// at each step adds the row maximizing the pseudo-determinant of the Gram
/// matrix of the selected rows. Ties break toward the lowest index, so the
/// result is deterministic and invariant to eigenvector sign flips.
inline SamplingSet maxdet_place(const Eigen::MatrixXd& u_sel, int m) {
    const int rows = static_cast<int>(u_sel.rows());
    if (m < 1 || m > rows)
        throw ArgumentError("maxdet_place: m must be in [1, rows]");

    std::vector<int> chosen;
    std::vector<char> in(rows, 0);
    for (int step = 0; step < m; ++step) {
        int best_idx = -1;
        detail::PseudoDet best{-1, 0.0};
        Eigen::MatrixXd stacked(static_cast<int>(chosen.size()) + 1, u_sel.cols());
        for (size_t k = 0; k < chosen.size(); ++k) stacked.row(k) = u_sel.row(chosen[k]);
        for (int cand = 0; cand < rows; ++cand) {
            if (in[cand]) continue;
            stacked.row(stacked.rows() - 1) = u_sel.row(cand);
            detail::PseudoDet det = detail::pseudo_det(stacked);
            if (det > best) {
                best = det;
                best_idx = cand;
            }
        }
        chosen.push_back(best_idx);
        in[best_idx] = 1;
    }
    std::sort(chosen.begin(), chosen.end());

    SamplingSet s;
    s.indices = std::move(chosen);
    return s;
}

/// Band-limited interpolation: x = (I - Dbar_S U U')^{-1} y, where y is the
/// sampled signal padded with zeros off S. Exact on signals band-limited to
/// the selected basis whenever the operator is well conditioned.
inline Eigen::VectorXd interpolate(const Eigen::VectorXd& y, const SamplingSet& s,
                                   const Eigen::MatrixXd& u_sel,
                                   double max_condition = 1e12) {
    const int dim = static_cast<int>(u_sel.rows());
    if (y.size() != dim) throw ArgumentError("interpolate: y length does not match basis rows");
    for (int i : s.indices)
        if (i < 0 || i >= dim) throw ArgumentError("interpolate: sample index out of range");

    Eigen::MatrixXd op = Eigen::MatrixXd::Identity(dim, dim);
    const Eigen::VectorXd mask = s.mask(dim);
    const Eigen::MatrixXd proj = u_sel * u_sel.transpose();
    for (int i = 0; i < dim; ++i)
        if (mask[i] == 0.0) op.row(i) -= proj.row(i);

    Eigen::BDCSVD<Eigen::MatrixXd> svd(op, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double smin = sv[sv.size() - 1];
    if (smin <= 0.0 || sv[0] / smin > max_condition)
        throw RecoveryError(
            "interpolation operator is singular or ill-conditioned; add samples or "
            "shrink the frequency support");
    return svd.solve(y);
}

}  // namespace cellflow
