#ifndef PTDIST_RANDOM_HPP
#define PTDIST_RANDOM_HPP

// Reproducible samplers for states and channels.
//
// Every sampler draws from a SeededStream. The stream is a std::mt19937_64
// whose state is seeded through SplitMix64; substreams for parallel tasks
// are derived by hashing (seed, index), so a task's draws depend only on
// those two numbers. Normal deviates use the Marsaglia polar method on
// 53-bit uniforms, which keeps outputs bit-stable on a given platform
// independently of the standard library's distribution implementations.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string_view>

#include <Eigen/QR>

#include "ptdist/states.hpp"

namespace ptdist {

inline constexpr std::string_view kStreamAlgorithm = "mt19937_64/splitmix64-seed/polar-normal v1";

/// SplitMix64 finalizer; also used to combine seeds with task indices.
[[nodiscard]] constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

class SeededStream {
public:
    explicit SeededStream(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

    [[nodiscard]] std::uint64_t seed() const { return seed_; }
    [[nodiscard]] static constexpr std::string_view algorithm() { return kStreamAlgorithm; }

    /// Independent stream for task `index`; does not advance this stream.
    [[nodiscard]] SeededStream substream(std::uint64_t index) const {
        return SeededStream(splitmix64(seed_ ^ splitmix64(index + 0x632BE59BD9B4E019ull)));
    }

    [[nodiscard]] std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    [[nodiscard]] double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, n).
    [[nodiscard]] std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x;
        do x = engine_(); while (x >= limit);
        return x % n;
    }

    [[nodiscard]] double normal() {
        if (spare_) {
            const double s = *spare_;
            spare_.reset();
            return s;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        return u * f;
    }

    /// Standard exponential deviate.
    [[nodiscard]] double exponential() { return -std::log1p(-uniform()); }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

/// iid entries with independent standard normal real and imaginary parts.
template <typename Scalar = double>
[[nodiscard]] CMatrix<Scalar> ginibre(Eigen::Index rows, Eigen::Index cols, SeededStream& stream) {
    if (rows < 1 || cols < 1) throw DimensionError("ginibre: dimensions must be positive");
    CMatrix<Scalar> g(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) {
            const double re = stream.normal();
            const double im = stream.normal();
            g(r, c) = {Scalar(re), Scalar(im)};
        }
    return g;
}

template <typename Scalar = double>
[[nodiscard]] PureState<Scalar> haar_pure(const SubsystemDims& dims, SeededStream& stream) {
    CVector<Scalar> v = ginibre<Scalar>(dims.total(), 1, stream).col(0);
    v /= v.norm();
    return {std::move(v), dims};
}

/// Haar unitary from the QR decomposition of a Ginibre matrix with the
/// phases of R's diagonal absorbed into Q.
template <typename Scalar = double>
[[nodiscard]] CMatrix<Scalar> haar_unitary(Eigen::Index d, SeededStream& stream) {
    const CMatrix<Scalar> g = ginibre<Scalar>(d, d, stream);
    Eigen::HouseholderQR<CMatrix<Scalar>> qr(g);
    CMatrix<Scalar> q = qr.householderQ();
    const CMatrix<Scalar> r = qr.matrixQR().template triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < d; ++i) {
        const auto rii = r(i, i);
        const Scalar mag = std::abs(rii);
        if (mag > Scalar(0)) q.col(i) *= rii / mag;
    }
    return q;
}

/// rho = G G^dagger / Tr(G G^dagger) with G an n x ancilla Ginibre matrix.
/// ancilla = 0 selects the default ancilla dimension n.
template <typename Scalar = double>
[[nodiscard]] DensityMatrix<Scalar> induced_mixed(const SubsystemDims& dims, SeededStream& stream,
                                                  Eigen::Index ancilla = 0) {
    const Eigen::Index n = dims.total();
    const Eigen::Index k = ancilla > 0 ? ancilla : n;
    const CMatrix<Scalar> g = ginibre<Scalar>(n, k, stream);
    CMatrix<Scalar> rho = g * g.adjoint();
    rho /= rho.trace().real();
    rho = (rho + rho.adjoint()) / Scalar(2);
    return {std::move(rho), dims};
}

/// Same distribution as induced_mixed, obtained by tracing an ancilla out
/// of a Haar-random pure state on (system) (x) (ancilla).
template <typename Scalar = double>
[[nodiscard]] DensityMatrix<Scalar> induced_mixed_by_tracing(const SubsystemDims& dims, SeededStream& stream,
                                                             Eigen::Index ancilla = 0) {
    const Eigen::Index n = dims.total();
    const Eigen::Index k = ancilla > 0 ? ancilla : n;
    const auto psi = haar_pure<Scalar>(SubsystemDims{n, k}, stream);
    const std::size_t keep = 0;
    CMatrix<Scalar> rho =
        partial_trace_matrix<Scalar>(psi.projector(), psi.dims(), std::span<const std::size_t>(&keep, 1));
    return {std::move(rho), dims};
}

/// Flat-Dirichlet probability vector, stored sorted.
template <typename Scalar = double>
[[nodiscard]] ClassicalState<Scalar> random_classical(Eigen::Index d, SeededStream& stream) {
    if (d < 1) throw DimensionError("random_classical: dimension must be positive");
    RVector<Scalar> p(d);
    for (Eigen::Index i = 0; i < d; ++i) p(i) = Scalar(stream.exponential());
    p /= p.sum();
    return ClassicalState<Scalar>(p);
}

/// rho_A (x) rho_B with both factors drawn from the induced measure.
template <typename Scalar = double>
[[nodiscard]] DensityMatrix<Scalar> random_product(Eigen::Index da, Eigen::Index db, SeededStream& stream) {
    const auto a = induced_mixed<Scalar>(SubsystemDims{da}, stream);
    const auto b = induced_mixed<Scalar>(SubsystemDims{db}, stream);
    return tensor(a, b);
}

/// Channel in Stinespring form: rho -> Tr_env(V rho V^dagger), with the
/// isometry V mapping C^d_in into C^d_out (x) C^env.
template <typename Scalar = double>
class StinespringChannel {
public:
    StinespringChannel(CMatrix<Scalar> isometry, Eigen::Index d_in, Eigen::Index d_out, Eigen::Index env)
        : v_(std::move(isometry)), d_in_(d_in), d_out_(d_out), env_(env) {
        if (v_.rows() != d_out * env || v_.cols() != d_in) throw DimensionError("StinespringChannel: isometry shape");
    }

    [[nodiscard]] const CMatrix<Scalar>& isometry() const { return v_; }
    [[nodiscard]] Eigen::Index d_in() const { return d_in_; }
    [[nodiscard]] Eigen::Index d_out() const { return d_out_; }
    [[nodiscard]] Eigen::Index env() const { return env_; }

    [[nodiscard]] CMatrix<Scalar> apply(const CMatrix<Scalar>& rho) const {
        if (rho.rows() != d_in_ || rho.cols() != d_in_) throw DimensionError("StinespringChannel: input dimension");
        const std::size_t keep = 0;
        return partial_trace_matrix<Scalar>(v_ * rho * v_.adjoint(), SubsystemDims{d_out_, env_},
                                            std::span<const std::size_t>(&keep, 1));
    }

    /// (channel (x) id) on a bipartite operator whose first factor has
    /// dimension d_in and second has dimension `rest`.
    [[nodiscard]] CMatrix<Scalar> apply_first(const CMatrix<Scalar>& rho, Eigen::Index rest) const {
        if (rho.rows() != d_in_ * rest || rho.cols() != d_in_ * rest)
            throw DimensionError("StinespringChannel: input dimension");
        const CMatrix<Scalar> w = kron<Scalar>(v_, CMatrix<Scalar>::Identity(rest, rest));
        // w maps into out (x) env (x) rest; trace the env factor.
        const std::array<std::size_t, 2> keep{0, 2};
        return partial_trace_matrix<Scalar>(w * rho * w.adjoint(), SubsystemDims{d_out_, env_, rest}, keep);
    }

private:
    CMatrix<Scalar> v_;
    Eigen::Index d_in_, d_out_, env_;
};

/// Random CPTP map from the first d_in columns of a Haar unitary on
/// d_out * env (requires d_out * env >= d_in).
template <typename Scalar = double>
[[nodiscard]] StinespringChannel<Scalar> random_cptp(Eigen::Index d_in, Eigen::Index d_out, Eigen::Index env,
                                                     SeededStream& stream) {
    if (d_in < 1 || d_out < 1 || env < 1) throw DimensionError("random_cptp: dimensions must be positive");
    if (d_out * env < d_in) throw DimensionError("random_cptp: d_out * env must be at least d_in");
    const CMatrix<Scalar> u = haar_unitary<Scalar>(d_out * env, stream);
    return {u.leftCols(d_in), d_in, d_out, env};
}

}  // namespace ptdist

#endif  // PTDIST_RANDOM_HPP
