#ifndef PTDIST_STATES_HPP
#define PTDIST_STATES_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/SVD>

#include "ptdist/linops.hpp"

namespace ptdist {

/// Validated quantum state: Hermitian, unit trace, positive semidefinite
/// (each within `tol`).
template <typename Scalar>
class DensityMatrix {
public:
    DensityMatrix(CMatrix<Scalar> matrix, SubsystemDims dims, double tol = kDefaultTol)
        : matrix_(std::move(matrix)), dims_(std::move(dims)) {
        detail::require_square(matrix_, "DensityMatrix");
        detail::require_match(matrix_.rows(), dims_, "DensityMatrix");
        if (!matrix_.allFinite()) throw ValidationError("DensityMatrix: non-finite entries");
        require_hermitian(matrix_, tol, "DensityMatrix");
        if (std::abs(matrix_.trace() - std::complex<Scalar>(1)) > tol)
            throw ValidationError("DensityMatrix: trace is not 1");
        if (min_eigenvalue<Scalar>(matrix_, tol) < -tol)
            throw ValidationError("DensityMatrix: matrix has a negative eigenvalue");
    }

    [[nodiscard]] const CMatrix<Scalar>& matrix() const { return matrix_; }
    [[nodiscard]] const SubsystemDims& dims() const { return dims_; }
    [[nodiscard]] Eigen::Index dim() const { return matrix_.rows(); }

    [[nodiscard]] Scalar purity() const { return (matrix_ * matrix_).trace().real(); }

private:
    CMatrix<Scalar> matrix_;
    SubsystemDims dims_;
};

/// Normalized state vector on a composite system.
template <typename Scalar>
class PureState {
public:
    PureState(CVector<Scalar> amplitudes, SubsystemDims dims, double tol = kDefaultTol)
        : amplitudes_(std::move(amplitudes)), dims_(std::move(dims)) {
        detail::require_match(amplitudes_.size(), dims_, "PureState");
        if (!amplitudes_.allFinite()) throw ValidationError("PureState: non-finite amplitudes");
        if (std::abs(amplitudes_.norm() - Scalar(1)) > tol) throw ValidationError("PureState: vector is not normalized");
    }

    [[nodiscard]] const CVector<Scalar>& amplitudes() const { return amplitudes_; }
    [[nodiscard]] const SubsystemDims& dims() const { return dims_; }

    [[nodiscard]] CMatrix<Scalar> projector() const { return amplitudes_ * amplitudes_.adjoint(); }
    [[nodiscard]] DensityMatrix<Scalar> density() const { return {projector(), dims_}; }

private:
    CVector<Scalar> amplitudes_;
    SubsystemDims dims_;
};

/// Classically correlated state sum_i p_i |ii><ii|. Probabilities are kept
/// in non-increasing order; order[k] is the original index of the k-th one.
template <typename Scalar>
class ClassicalState {
public:
    explicit ClassicalState(const RVector<Scalar>& p, double tol = 1e-12) {
        if (p.size() < 1) throw ValidationError("ClassicalState: empty probability vector");
        if (!p.allFinite() || (p.array() < Scalar(0)).any())
            throw ValidationError("ClassicalState: probabilities must be finite and non-negative");
        if (std::abs(p.sum() - Scalar(1)) > tol) throw ValidationError("ClassicalState: probabilities do not sum to 1");
        order_.resize(static_cast<std::size_t>(p.size()));
        std::iota(order_.begin(), order_.end(), Eigen::Index{0});
        std::stable_sort(order_.begin(), order_.end(), [&](Eigen::Index a, Eigen::Index b) { return p(a) > p(b); });
        probabilities_.resize(p.size());
        for (Eigen::Index k = 0; k < p.size(); ++k) probabilities_(k) = p(order_[static_cast<std::size_t>(k)]);
    }

    [[nodiscard]] const RVector<Scalar>& probabilities() const { return probabilities_; }
    [[nodiscard]] const std::vector<Eigen::Index>& order() const { return order_; }
    [[nodiscard]] Eigen::Index dim() const { return probabilities_.size(); }

    /// sum_k p_k |kk><kk| in the sorted basis.
    [[nodiscard]] DensityMatrix<Scalar> density() const {
        const Eigen::Index d = dim();
        CMatrix<Scalar> m = CMatrix<Scalar>::Zero(d * d, d * d);
        for (Eigen::Index k = 0; k < d; ++k) m(k * d + k, k * d + k) = probabilities_(k);
        return {std::move(m), SubsystemDims{d, d}};
    }

private:
    RVector<Scalar> probabilities_;
    std::vector<Eigen::Index> order_;
};

using DensityMatrixd = DensityMatrix<double>;
using PureStated = PureState<double>;

/// psi = sum_k coefficients[k] * left.col(k) (x) right.col(k).
template <typename Scalar>
struct SchmidtForm {
    RVector<Scalar> coefficients;  // non-increasing
    CMatrix<Scalar> left_basis;
    CMatrix<Scalar> right_basis;

    /// Squared coefficients, i.e. the Schmidt probabilities.
    [[nodiscard]] RVector<Scalar> probabilities() const { return coefficients.cwiseAbs2(); }

    [[nodiscard]] CVector<Scalar> reconstruct() const {
        const Eigen::Index da = left_basis.rows(), db = right_basis.rows();
        CVector<Scalar> out = CVector<Scalar>::Zero(da * db);
        for (Eigen::Index k = 0; k < coefficients.size(); ++k)
            out += coefficients(k) * kron<Scalar>(CVector<Scalar>(left_basis.col(k)), CVector<Scalar>(right_basis.col(k)));
        return out;
    }
};

template <typename Scalar>
[[nodiscard]] SchmidtForm<Scalar> schmidt(const PureState<Scalar>& psi) {
    const auto& dims = psi.dims();
    if (dims.count() != 2) throw DimensionError("schmidt: state must be bipartite");
    const Eigen::Index da = dims[0], db = dims[1];
    CMatrix<Scalar> amp(da, db);
    for (Eigen::Index i = 0; i < da; ++i)
        for (Eigen::Index j = 0; j < db; ++j) amp(i, j) = psi.amplitudes()(i * db + j);
    Eigen::JacobiSVD<CMatrix<Scalar>> svd(amp, Eigen::ComputeFullU | Eigen::ComputeFullV);
    // amp = U S V^dagger, so the right Schmidt vectors are the conjugated columns of V.
    return {svd.singularValues(), svd.matrixU(), svd.matrixV().conjugate()};
}

template <typename Scalar>
[[nodiscard]] DensityMatrix<Scalar> partial_trace(const DensityMatrix<Scalar>& rho, std::span<const std::size_t> keep,
                                                  double tol = kDefaultTol) {
    if (keep.empty()) throw DimensionError("partial_trace: keep set must be non-empty");
    auto kept = std::vector<std::size_t>(keep.begin(), keep.end());
    std::sort(kept.begin(), kept.end());
    auto reduced = partial_trace_matrix<Scalar>(rho.matrix(), rho.dims(), kept);
    return {std::move(reduced), rho.dims().select(kept), tol};
}

template <typename Scalar>
[[nodiscard]] DensityMatrix<Scalar> partial_trace(const DensityMatrix<Scalar>& rho, std::initializer_list<std::size_t> keep,
                                                  double tol = kDefaultTol) {
    return partial_trace(rho, std::span<const std::size_t>(keep.begin(), keep.size()), tol);
}

template <typename Scalar>
[[nodiscard]] DensityMatrix<Scalar> tensor(const DensityMatrix<Scalar>& a, const DensityMatrix<Scalar>& b,
                                           double tol = kDefaultTol) {
    auto dims = a.dims().values();
    dims.insert(dims.end(), b.dims().values().begin(), b.dims().values().end());
    return {kron<Scalar>(a.matrix(), b.matrix()), SubsystemDims(std::move(dims)), tol};
}

/// Maximally entangled state sum_i |ii> / sqrt(d).
template <typename Scalar>
[[nodiscard]] PureState<Scalar> max_entangled(Eigen::Index d) {
    CVector<Scalar> v = CVector<Scalar>::Zero(d * d);
    for (Eigen::Index i = 0; i < d; ++i) v(i * d + i) = Scalar(1) / std::sqrt(Scalar(d));
    return {std::move(v), SubsystemDims{d, d}};
}

/// Computational basis state |index> of a composite system.
template <typename Scalar>
[[nodiscard]] PureState<Scalar> basis_state(const SubsystemDims& dims, std::span<const Eigen::Index> digits) {
    if (digits.size() != dims.count()) throw DimensionError("basis_state: digit count mismatch");
    Eigen::Index idx = 0;
    for (std::size_t s = 0; s < digits.size(); ++s) {
        if (digits[s] < 0 || digits[s] >= dims[s]) throw DimensionError("basis_state: digit out of range");
        idx += digits[s] * dims.stride(s);
    }
    CVector<Scalar> v = CVector<Scalar>::Zero(dims.total());
    v(idx) = 1;
    return {std::move(v), dims};
}

template <typename Scalar>
[[nodiscard]] PureState<Scalar> basis_state(const SubsystemDims& dims, std::initializer_list<Eigen::Index> digits) {
    return basis_state<Scalar>(dims, std::span<const Eigen::Index>(digits.begin(), digits.size()));
}

}  // namespace ptdist

#endif  // PTDIST_STATES_HPP
