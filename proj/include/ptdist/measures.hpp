#ifndef PTDIST_MEASURES_HPP
#define PTDIST_MEASURES_HPP

// Partial transpose distance and the closed-form correlation quantifiers
// built on it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "ptdist/random.hpp"
#include "ptdist/states.hpp"

namespace ptdist {

/// Values in [-kClampTol, 0) produced by round-off are reported as 0.
inline constexpr double kClampTol = 1e-12;
/// sigma_N^T is considered PSD when its smallest eigenvalue is above this.
inline constexpr double kPsdTol = 1e-9;

template <typename Scalar>
[[nodiscard]] Scalar clamp_nonnegative(Scalar v) {
    return v < Scalar(0) && v >= -Scalar(kClampTol) ? Scalar(0) : v;
}

/// Split of the subsystems into two groups; the second group is the one
/// that gets transposed.
struct Bipartition {
    std::vector<std::size_t> first;
    std::vector<std::size_t> second;

    /// (A, B) split of a bipartite system.
    [[nodiscard]] static Bipartition standard() { return {{0}, {1}}; }

    void validate(const SubsystemDims& dims) const {
        std::vector<int> seen(dims.count(), 0);
        for (auto s : first) {
            if (s >= dims.count()) throw DimensionError("bipartition: subsystem index out of range");
            ++seen[s];
        }
        for (auto s : second) {
            if (s >= dims.count()) throw DimensionError("bipartition: subsystem index out of range");
            ++seen[s];
        }
        if (first.empty() || second.empty()) throw DimensionError("bipartition: both sides must be non-empty");
        for (int c : seen)
            if (c != 1) throw DimensionError("bipartition: sides must partition the subsystems");
    }
};

template <typename Scalar>
[[nodiscard]] CMatrix<Scalar> partial_transpose(const DensityMatrix<Scalar>& rho, Side side = Side::B) {
    return partial_transpose<Scalar>(rho.matrix(), rho.dims(), side);
}

/// d_T(rho, sigma) = 1/2 || rho^T - sigma^T || with the transpose on `side`.
template <typename Scalar>
[[nodiscard]] Scalar pt_distance(const DensityMatrix<Scalar>& rho, const DensityMatrix<Scalar>& sigma,
                                 Side side = Side::B) {
    if (rho.dims() != sigma.dims()) throw DimensionError("pt_distance: states have different dims");
    if (rho.dims().count() != 2) throw DimensionError("pt_distance: states must be bipartite");
    const CMatrix<Scalar> diff = rho.matrix() - sigma.matrix();
    return trace_norm<Scalar>(partial_transpose<Scalar>(diff, rho.dims(), side)) / Scalar(2);
}

/// Same distance on raw Hermitian operators (used for SDP outputs that are
/// only approximately states).
template <typename Scalar>
[[nodiscard]] Scalar pt_distance(const CMatrix<Scalar>& rho, const CMatrix<Scalar>& sigma, const SubsystemDims& dims,
                                 Side side = Side::B) {
    return trace_norm<Scalar>(partial_transpose<Scalar>(CMatrix<Scalar>(rho - sigma), dims, side)) / Scalar(2);
}

template <typename Scalar>
[[nodiscard]] Scalar negativity(const CMatrix<Scalar>& rho, const SubsystemDims& dims, const Bipartition& cut) {
    cut.validate(dims);
    const CMatrix<Scalar> pt = partial_transpose<Scalar>(rho, dims, std::span<const std::size_t>(cut.second));
    return std::max(Scalar(0), clamp_nonnegative((trace_norm<Scalar>(pt) - Scalar(1)) / Scalar(2)));
}

/// N(rho) = 1/2 (||rho^T|| - 1) across `cut`.
template <typename Scalar>
[[nodiscard]] Scalar negativity(const DensityMatrix<Scalar>& rho, const Bipartition& cut = Bipartition::standard()) {
    return negativity<Scalar>(rho.matrix(), rho.dims(), cut);
}

template <typename Scalar>
struct SigmaN {
    DensityMatrix<Scalar> state;
    bool pt_is_psd;
};

/// Normalized positive part of rho^T_B: the state closest to rho^T_B in
/// trace distance.
template <typename Scalar>
[[nodiscard]] SigmaN<Scalar> sigma_n(const DensityMatrix<Scalar>& rho) {
    const auto parts = jordan_parts<Scalar>(partial_transpose(rho));
    CMatrix<Scalar> pos = parts.positive;
    pos /= pos.trace().real();
    pos = (pos + pos.adjoint()) / Scalar(2);
    const Scalar lmin = min_eigenvalue<Scalar>(partial_transpose<Scalar>(pos, rho.dims()));
    return {DensityMatrix<Scalar>(std::move(pos), rho.dims()), lmin >= -Scalar(kPsdTol)};
}

/// |rho^T_B|^T_B, the binegativity operator.
template <typename Scalar>
[[nodiscard]] CMatrix<Scalar> binegativity(const DensityMatrix<Scalar>& rho) {
    const auto eig = hermitian_eig<Scalar>(partial_transpose(rho));
    const CMatrix<Scalar> abs_pt =
        eig.vectors * eig.values.cwiseAbs().template cast<std::complex<Scalar>>().asDiagonal() * eig.vectors.adjoint();
    return partial_transpose<Scalar>(abs_pt, rho.dims());
}

template <typename Scalar>
[[nodiscard]] Scalar binegativity_min_eig(const DensityMatrix<Scalar>& rho) {
    return min_eigenvalue<Scalar>(binegativity(rho));
}

enum class QuantifierMethod { ClosedForm, Sdp, SamplingUpperBound };

template <typename Scalar>
struct QuantifierResult {
    Scalar value;
    std::optional<DensityMatrix<Scalar>> closest_state;
    QuantifierMethod method;
};

/// Leading eigenvector of a rank-one density matrix.
template <typename Scalar>
[[nodiscard]] PureState<Scalar> to_pure(const DensityMatrix<Scalar>& rho, double tol = kDefaultTol) {
    if (std::abs(rho.purity() - Scalar(1)) > tol) throw ValidationError("to_pure: state is not pure");
    const auto eig = hermitian_eig<Scalar>(rho.matrix());
    CVector<Scalar> v = eig.vectors.col(eig.values.size() - 1);
    v /= v.norm();
    return {std::move(v), rho.dims()};
}

/// sum_{i<j} sqrt(p_i p_j) over Schmidt probabilities.
template <typename Scalar>
[[nodiscard]] Scalar schmidt_pair_sum(const RVector<Scalar>& p) {
    Scalar s = 0;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        for (Eigen::Index j = i + 1; j < p.size(); ++j) s += std::sqrt(p(i) * p(j));
    return s;
}

/// sum_k w_k |a_k><a_k| (x) |b_k><b_k| over Schmidt vectors.
template <typename Scalar>
[[nodiscard]] CMatrix<Scalar> schmidt_diagonal(const SchmidtForm<Scalar>& form, const RVector<Scalar>& weights) {
    const Eigen::Index da = form.left_basis.rows(), db = form.right_basis.rows();
    CMatrix<Scalar> out = CMatrix<Scalar>::Zero(da * db, da * db);
    for (Eigen::Index k = 0; k < weights.size(); ++k) {
        const CVector<Scalar> v = kron<Scalar>(CVector<Scalar>(form.left_basis.col(k)), CVector<Scalar>(form.right_basis.col(k)));
        out += weights(k) * v * v.adjoint();
    }
    return out;
}

/// Q_CC (= Q_PPT = N) of a pure state with its closest classically
/// correlated state sum_i p_i |ii><ii| in the Schmidt basis.
template <typename Scalar>
[[nodiscard]] QuantifierResult<Scalar> q_cc_pure(const PureState<Scalar>& psi) {
    const auto form = schmidt(psi);
    const RVector<Scalar> p = form.probabilities();
    CMatrix<Scalar> closest = schmidt_diagonal(form, p);
    closest /= closest.trace().real();
    return {schmidt_pair_sum(p), DensityMatrix<Scalar>(std::move(closest), psi.dims()), QuantifierMethod::ClosedForm};
}

template <typename Scalar>
[[nodiscard]] QuantifierResult<Scalar> q_cc_pure(const DensityMatrix<Scalar>& rho) {
    return q_cc_pure(to_pure(rho));
}

/// Closed-form closest product state to sum_i p_i |ii><ii|.
template <typename Scalar>
struct ProdClosedForm {
    QuantifierResult<Scalar> result;  // closest_state in the sorted basis
    Eigen::Index m;                   // number of saturated weights u_i = sqrt(p_i)
    RVector<Scalar> local_weights;    // chi = (sum_i u_i |i><i|)^(x)2, sorted basis
    std::vector<Eigen::Index> order;  // sorted position -> original index

    /// Local weights indexed by the original (unsorted) basis.
    [[nodiscard]] RVector<Scalar> local_weights_original() const {
        RVector<Scalar> out(local_weights.size());
        for (Eigen::Index k = 0; k < local_weights.size(); ++k) out(order[static_cast<std::size_t>(k)]) = local_weights(k);
        return out;
    }
};

/// Local weights u of the optimal product state for sorted probabilities p:
/// u_i = sqrt(p_i) for i < m, u_m = 1 - sum_{i<m} sqrt(p_i), zero after.
template <typename Scalar>
[[nodiscard]] std::pair<Eigen::Index, RVector<Scalar>> optimal_product_weights(const RVector<Scalar>& p) {
    const Eigen::Index d = p.size();
    const Eigen::Index nonzero = (p.array() > Scalar(0)).count();
    Eigen::Index m = 0;
    Scalar root_sum = 0;
    while (m < d && root_sum + std::sqrt(p(m)) <= Scalar(1) + Scalar(1e-14)) root_sum += std::sqrt(p(m++));
    m = std::min(m, std::max<Eigen::Index>(nonzero, 1));
    root_sum = 0;
    RVector<Scalar> u = RVector<Scalar>::Zero(d);
    for (Eigen::Index i = 0; i < m; ++i) {
        u(i) = std::sqrt(p(i));
        root_sum += u(i);
    }
    if (m < d) u(m) = std::max(Scalar(0), Scalar(1) - root_sum);
    return {m, u};
}

/// Q_Prod of a classically correlated state.
template <typename Scalar>
[[nodiscard]] ProdClosedForm<Scalar> q_prod_classical(const ClassicalState<Scalar>& state) {
    const RVector<Scalar>& p = state.probabilities();
    const Eigen::Index d = p.size();
    auto [m, u] = optimal_product_weights(p);
    Scalar head_p = 0, head_root = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        head_p += p(i);
        head_root += std::sqrt(p(i));
    }
    const Scalar tail = Scalar(1) - head_root;
    const Scalar value = std::max(Scalar(0), clamp_nonnegative(Scalar(1) - head_p - tail * tail));

    CMatrix<Scalar> local = CMatrix<Scalar>::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) local(i, i) = u(i);
    local /= local.trace().real();
    DensityMatrix<Scalar> chi(kron<Scalar>(local, local), SubsystemDims{d, d});
    return {{value, std::move(chi), QuantifierMethod::ClosedForm}, m, std::move(u), state.order()};
}

template <typename Scalar>
struct SubadditivityRecord {
    Scalar negativity;     // N(psi)
    Scalar c_t;            // Q_Prod of the Schmidt-diagonal state sigma_0
    Scalar chi_distance;   // d_T(psi, chi), chi the closest product state to sigma_0
    Scalar rhs;            // N + C_T / 2
    Scalar equality_gap;   // chi_distance - rhs
};

template <typename Scalar>
[[nodiscard]] SubadditivityRecord<Scalar> pure_subadditivity(const PureState<Scalar>& psi) {
    const auto form = schmidt(psi);
    const RVector<Scalar> p = form.probabilities();
    const DensityMatrix<Scalar> rho = psi.density();
    const Scalar n = negativity(rho);

    RVector<Scalar> probs = p / p.sum();
    const ClassicalState<Scalar> sigma0(probs, 1e-10);
    const auto prod = q_prod_classical(sigma0);
    const RVector<Scalar>& u = prod.local_weights;

    // chi = (sum u_k |a_k><a_k|) (x) (sum u_k |b_k><b_k|); probabilities are
    // already sorted, so the sorted basis is the Schmidt basis.
    const Eigen::Index da = form.left_basis.rows(), db = form.right_basis.rows();
    CMatrix<Scalar> chi_a = CMatrix<Scalar>::Zero(da, da), chi_b = CMatrix<Scalar>::Zero(db, db);
    for (Eigen::Index k = 0; k < u.size(); ++k) {
        chi_a += u(k) * form.left_basis.col(k) * form.left_basis.col(k).adjoint();
        chi_b += u(k) * form.right_basis.col(k) * form.right_basis.col(k).adjoint();
    }
    const DensityMatrix<Scalar> chi(kron<Scalar>(chi_a, chi_b), psi.dims());
    const Scalar chi_distance = pt_distance(rho, chi);
    const Scalar rhs = n + prod.result.value / Scalar(2);
    return {n, prod.result.value, chi_distance, rhs, chi_distance - rhs};
}

enum class UncorrelatedSet { CC, Prod };

/// Random classically correlated state (U (x) V) diag(p) (U (x) V)^dagger.
template <typename Scalar = double>
[[nodiscard]] DensityMatrix<Scalar> random_cc(Eigen::Index da, Eigen::Index db, SeededStream& stream) {
    const CMatrix<Scalar> u = haar_unitary<Scalar>(da, stream);
    const CMatrix<Scalar> v = haar_unitary<Scalar>(db, stream);
    const auto p = random_classical<Scalar>(da * db, stream);
    // The sorted order is irrelevant here: any assignment of weights to the
    // product basis is a member of the set.
    CMatrix<Scalar> diag = CMatrix<Scalar>::Zero(da * db, da * db);
    for (Eigen::Index k = 0; k < da * db; ++k) diag(k, k) = p.probabilities()(k);
    const CMatrix<Scalar> w = kron<Scalar>(u, v);
    CMatrix<Scalar> sigma = w * diag * w.adjoint();
    sigma = (sigma + sigma.adjoint()) / Scalar(2);
    return {std::move(sigma), SubsystemDims{da, db}};
}

/// Upper bound on Q_CC or Q_Prod: the minimum of d_T over `samples` random
/// members of the set. Sample i uses substream i of `seed`.
template <typename Scalar>
[[nodiscard]] QuantifierResult<Scalar> q_upper_bound_sampling(const DensityMatrix<Scalar>& rho, UncorrelatedSet set,
                                                              std::uint64_t samples, std::uint64_t seed) {
    if (samples < 1) throw ValidationError("q_upper_bound_sampling: need at least one sample");
    if (rho.dims().count() != 2) throw DimensionError("q_upper_bound_sampling: state must be bipartite");
    const Eigen::Index da = rho.dims()[0], db = rho.dims()[1];
    const SeededStream root(seed);
    Scalar best = std::numeric_limits<Scalar>::infinity();
    std::optional<DensityMatrix<Scalar>> best_state;
    for (std::uint64_t i = 0; i < samples; ++i) {
        auto stream = root.substream(i);
        auto sigma = set == UncorrelatedSet::CC ? random_cc<Scalar>(da, db, stream) : random_product<Scalar>(da, db, stream);
        const Scalar d = pt_distance(rho, sigma);
        if (d < best) {
            best = d;
            best_state.emplace(std::move(sigma));
        }
    }
    return {best, std::move(best_state), QuantifierMethod::SamplingUpperBound};
}

}  // namespace ptdist

#endif  // PTDIST_MEASURES_HPP
