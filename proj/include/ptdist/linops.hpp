#ifndef PTDIST_LINOPS_HPP
#define PTDIST_LINOPS_HPP

// Dense complex Hermitian linear algebra used throughout ptdist.
//
// All routines are templated on the real scalar type and operate on
// Eigen dynamic matrices of std::complex<Scalar>. Composite indices follow
// the Kronecker convention: for dims (d0, d1, ..., dk) the first subsystem
// is the most significant digit, so kron(A, B) acts on A (x) B.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ptdist/error.hpp"

namespace ptdist {

template <typename Scalar>
using CMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using CVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <typename Scalar>
using RVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using CMatrixXd = CMatrix<double>;
using CVectorXd = CVector<double>;

/// Default tolerance for Hermiticity, normalization and positivity checks.
inline constexpr double kDefaultTol = 1e-8;
/// Eigenvalues with magnitude at or below this are treated as zero when
/// splitting a spectrum by sign; zero modes go to the positive part.
inline constexpr double kSignSplitThreshold = 1e-12;

enum class Side { A, B };

/// Ordered local Hilbert-space dimensions of a composite system.
class SubsystemDims {
public:
    SubsystemDims() = default;
    SubsystemDims(std::initializer_list<Eigen::Index> dims) : dims_(dims) { validate(); }
    explicit SubsystemDims(std::vector<Eigen::Index> dims) : dims_(std::move(dims)) { validate(); }

    [[nodiscard]] std::size_t count() const { return dims_.size(); }
    [[nodiscard]] Eigen::Index operator[](std::size_t i) const { return dims_.at(i); }
    [[nodiscard]] const std::vector<Eigen::Index>& values() const { return dims_; }

    [[nodiscard]] Eigen::Index total() const {
        return std::accumulate(dims_.begin(), dims_.end(), Eigen::Index{1}, std::multiplies<>());
    }

    /// Stride of subsystem i in a composite index.
    [[nodiscard]] Eigen::Index stride(std::size_t i) const {
        Eigen::Index s = 1;
        for (std::size_t t = i + 1; t < dims_.size(); ++t) s *= dims_[t];
        return s;
    }

    [[nodiscard]] Eigen::Index digit(Eigen::Index index, std::size_t i) const {
        return (index / stride(i)) % dims_[i];
    }

    /// Dimensions of the listed subsystems, in the listed order.
    [[nodiscard]] SubsystemDims select(std::span<const std::size_t> which) const {
        std::vector<Eigen::Index> out;
        for (auto w : which) out.push_back(dims_.at(w));
        return SubsystemDims(std::move(out));
    }

    bool operator==(const SubsystemDims&) const = default;

    [[nodiscard]] std::string str() const {
        std::ostringstream os;
        os << '(';
        for (std::size_t i = 0; i < dims_.size(); ++i) os << (i ? "," : "") << dims_[i];
        os << ')';
        return os.str();
    }

private:
    void validate() const {
        if (dims_.empty()) throw DimensionError("subsystem dims must be non-empty");
        for (auto d : dims_)
            if (d < 1) throw DimensionError("subsystem dims must be positive");
    }

    std::vector<Eigen::Index> dims_;
};

namespace detail {

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* what) {
    if (m.rows() != m.cols()) throw DimensionError(std::string(what) + ": matrix is not square");
}

inline void require_match(Eigen::Index n, const SubsystemDims& dims, const char* what) {
    if (n != dims.total())
        throw DimensionError(std::string(what) + ": matrix dimension " + std::to_string(n) +
                             " does not match dims " + dims.str());
}

inline std::vector<bool> subsystem_mask(const SubsystemDims& dims, std::span<const std::size_t> which) {
    std::vector<bool> mask(dims.count(), false);
    for (auto w : which) {
        if (w >= dims.count()) throw DimensionError("subsystem index out of range");
        mask[w] = true;
    }
    return mask;
}

}  // namespace detail

template <typename Derived>
[[nodiscard]] typename Derived::RealScalar hermiticity_error(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() != m.cols()) return std::numeric_limits<typename Derived::RealScalar>::infinity();
    if (m.size() == 0) return 0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

template <typename Derived>
void require_hermitian(const Eigen::MatrixBase<Derived>& m, double tol, const char* what) {
    detail::require_square(m, what);
    if (!(hermiticity_error(m) <= tol)) throw ValidationError(std::string(what) + ": matrix is not Hermitian");
}

/// Entry (row, col) of the partially transposed matrix is read from the
/// returned (row, col) of the original. The map is an involution.
inline std::pair<Eigen::Index, Eigen::Index> transposed_source(Eigen::Index row, Eigen::Index col,
                                                               const SubsystemDims& dims,
                                                               const std::vector<bool>& mask) {
    Eigen::Index r = row, c = col;
    for (std::size_t s = 0; s < dims.count(); ++s) {
        if (!mask[s]) continue;
        const Eigen::Index stride = dims.stride(s);
        const Eigen::Index dr = dims.digit(row, s), dc = dims.digit(col, s);
        r += (dc - dr) * stride;
        c += (dr - dc) * stride;
    }
    return {r, c};
}

/// Transpose the tensor factors listed in `which`.
template <typename Scalar>
[[nodiscard]] CMatrix<Scalar> partial_transpose(const CMatrix<Scalar>& m, const SubsystemDims& dims,
                                                std::span<const std::size_t> which) {
    detail::require_square(m, "partial_transpose");
    detail::require_match(m.rows(), dims, "partial_transpose");
    const auto mask = detail::subsystem_mask(dims, which);
    const Eigen::Index n = m.rows();
    CMatrix<Scalar> out(n, n);
    for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index r = 0; r < n; ++r) {
            const auto [sr, sc] = transposed_source(r, c, dims, mask);
            out(r, c) = m(sr, sc);
        }
    return out;
}

/// Bipartite partial transpose on side A or B of dims (dA, dB).
template <typename Scalar>
[[nodiscard]] CMatrix<Scalar> partial_transpose(const CMatrix<Scalar>& m, const SubsystemDims& dims,
                                                Side side = Side::B) {
    if (dims.count() != 2) throw DimensionError("partial_transpose: side form needs two subsystems");
    const std::size_t which = side == Side::A ? 0 : 1;
    return partial_transpose<Scalar>(m, dims, std::span<const std::size_t>(&which, 1));
}

template <typename Scalar>
struct HermitianEig {
    RVector<Scalar> values;    // ascending
    CMatrix<Scalar> vectors;   // columns
};

template <typename Scalar>
[[nodiscard]] HermitianEig<Scalar> hermitian_eig(const CMatrix<Scalar>& h, double tol = kDefaultTol) {
    require_hermitian(h, tol, "hermitian_eig");
    // Symmetrize so that round-off asymmetry does not leak into the solver.
    const CMatrix<Scalar> sym = (h + h.adjoint()) / Scalar(2);
    Eigen::SelfAdjointEigenSolver<CMatrix<Scalar>> solver(sym);
    if (solver.info() != Eigen::Success) throw ValidationError("hermitian_eig: eigensolver failed");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

template <typename Scalar>
[[nodiscard]] Scalar min_eigenvalue(const CMatrix<Scalar>& h, double tol = kDefaultTol) {
    if (h.size() == 0) return Scalar(0);
    const CMatrix<Scalar> sym = (h + h.adjoint()) / Scalar(2);
    require_hermitian(h, tol, "min_eigenvalue");
    Eigen::SelfAdjointEigenSolver<CMatrix<Scalar>> solver(sym, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()(0);
}

/// Tr sqrt(H^dagger H) for Hermitian H, i.e. the sum of |eigenvalues|.
template <typename Scalar>
[[nodiscard]] Scalar trace_norm(const CMatrix<Scalar>& h, double tol = kDefaultTol) {
    require_hermitian(h, tol, "trace_norm");
    const CMatrix<Scalar> sym = (h + h.adjoint()) / Scalar(2);
    Eigen::SelfAdjointEigenSolver<CMatrix<Scalar>> solver(sym, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().cwiseAbs().sum();
}

template <typename Scalar>
struct JordanParts {
    CMatrix<Scalar> positive;
    CMatrix<Scalar> negative;
};

/// Split H = positive + negative by the sign of its eigenvalues.
template <typename Scalar>
[[nodiscard]] JordanParts<Scalar> jordan_parts(const CMatrix<Scalar>& h, double tol = kDefaultTol) {
    const auto eig = hermitian_eig(h, tol);
    const Eigen::Index n = eig.values.size();
    RVector<Scalar> pos(n), neg(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Scalar l = eig.values(i);
        const bool is_negative = l < -Scalar(kSignSplitThreshold);
        pos(i) = is_negative ? Scalar(0) : l;
        neg(i) = is_negative ? l : Scalar(0);
    }
    const auto& v = eig.vectors;
    return {v * pos.template cast<std::complex<Scalar>>().asDiagonal() * v.adjoint(),
            v * neg.template cast<std::complex<Scalar>>().asDiagonal() * v.adjoint()};
}

/// Nearest PSD matrix in Frobenius norm (eigenvalues clipped at zero).
template <typename Scalar>
[[nodiscard]] CMatrix<Scalar> psd_part(const CMatrix<Scalar>& h, double tol = kDefaultTol) {
    return jordan_parts(h, tol).positive;
}

template <typename Scalar>
[[nodiscard]] CMatrix<Scalar> kron(const CMatrix<Scalar>& a, const CMatrix<Scalar>& b) {
    CMatrix<Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

template <typename Scalar>
[[nodiscard]] CVector<Scalar> kron(const CVector<Scalar>& a, const CVector<Scalar>& b) {
    CVector<Scalar> out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

/// Trace out every subsystem not listed in `keep`; kept factors retain
/// their original relative order.
template <typename Scalar>
[[nodiscard]] CMatrix<Scalar> partial_trace_matrix(const CMatrix<Scalar>& m, const SubsystemDims& dims,
                                                   std::span<const std::size_t> keep) {
    detail::require_square(m, "partial_trace");
    detail::require_match(m.rows(), dims, "partial_trace");
    auto kept = std::vector<std::size_t>(keep.begin(), keep.end());
    std::sort(kept.begin(), kept.end());
    if (std::adjacent_find(kept.begin(), kept.end()) != kept.end())
        throw DimensionError("partial_trace: repeated subsystem index");
    const auto mask = detail::subsystem_mask(dims, kept);
    std::vector<std::size_t> traced;
    for (std::size_t s = 0; s < dims.count(); ++s)
        if (!mask[s]) traced.push_back(s);

    const SubsystemDims kdims = kept.empty() ? SubsystemDims{1} : dims.select(kept);
    const SubsystemDims tdims = traced.empty() ? SubsystemDims{1} : dims.select(traced);
    const Eigen::Index nk = kdims.total(), nt = tdims.total();

    // Composite index from (kept index, traced index).
    auto compose = [&](Eigen::Index k, Eigen::Index t) {
        Eigen::Index full = 0;
        for (std::size_t i = 0; i < kept.size(); ++i) full += kdims.digit(k, i) * dims.stride(kept[i]);
        for (std::size_t i = 0; i < traced.size(); ++i) full += tdims.digit(t, i) * dims.stride(traced[i]);
        return full;
    };
    std::vector<Eigen::Index> table(static_cast<std::size_t>(nk * nt));
    for (Eigen::Index k = 0; k < nk; ++k)
        for (Eigen::Index t = 0; t < nt; ++t) table[static_cast<std::size_t>(k * nt + t)] = compose(k, t);

    CMatrix<Scalar> out = CMatrix<Scalar>::Zero(nk, nk);
    for (Eigen::Index c = 0; c < nk; ++c)
        for (Eigen::Index r = 0; r < nk; ++r)
            for (Eigen::Index t = 0; t < nt; ++t)
                out(r, c) += m(table[static_cast<std::size_t>(r * nt + t)], table[static_cast<std::size_t>(c * nt + t)]);
    return out;
}

/// Reorder tensor factors: factor perm[i] of the input becomes factor i of
/// the output.
template <typename Scalar>
[[nodiscard]] CMatrix<Scalar> permute_subsystems(const CMatrix<Scalar>& m, const SubsystemDims& dims,
                                                 std::span<const std::size_t> perm) {
    detail::require_square(m, "permute_subsystems");
    detail::require_match(m.rows(), dims, "permute_subsystems");
    if (perm.size() != dims.count()) throw DimensionError("permute_subsystems: permutation size mismatch");
    std::vector<std::size_t> check(perm.begin(), perm.end());
    std::sort(check.begin(), check.end());
    for (std::size_t i = 0; i < check.size(); ++i)
        if (check[i] != i) throw DimensionError("permute_subsystems: not a permutation");

    const SubsystemDims out_dims = dims.select(perm);
    const Eigen::Index n = dims.total();
    std::vector<Eigen::Index> source(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index full = 0;
        for (std::size_t f = 0; f < perm.size(); ++f) full += out_dims.digit(i, f) * dims.stride(perm[f]);
        source[static_cast<std::size_t>(i)] = full;
    }
    CMatrix<Scalar> out(n, n);
    for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index r = 0; r < n; ++r)
            out(r, c) = m(source[static_cast<std::size_t>(r)], source[static_cast<std::size_t>(c)]);
    return out;
}

/// exp(-i H t) from the spectral decomposition of Hermitian H.
template <typename Scalar>
[[nodiscard]] CMatrix<Scalar> exp_spectral(const HermitianEig<Scalar>& eig, Scalar t) {
    const Eigen::Index n = eig.values.size();
    CVector<Scalar> phases(n);
    for (Eigen::Index i = 0; i < n; ++i) phases(i) = std::polar(Scalar(1), -eig.values(i) * t);
    return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

template <typename Scalar>
[[nodiscard]] CMatrix<Scalar> exp_spectral(const CMatrix<Scalar>& h, Scalar t, double tol = kDefaultTol) {
    return exp_spectral(hermitian_eig(h, tol), t);
}

}  // namespace ptdist

#endif  // PTDIST_LINOPS_HPP
