#include <doctest.h>

#include <Eigen/SVD>

#include "ptdist/random.hpp"
#include "support.hpp"

using namespace ptdist;

namespace {

// Reference partial transposes written directly in index form.
CMatrixXd pt_second(const CMatrixXd& m, Eigen::Index da, Eigen::Index db) {
    CMatrixXd out(da * db, da * db);
    for (Eigen::Index i = 0; i < da; ++i)
        for (Eigen::Index j = 0; j < db; ++j)
            for (Eigen::Index k = 0; k < da; ++k)
                for (Eigen::Index l = 0; l < db; ++l) out(i * db + j, k * db + l) = m(i * db + l, k * db + j);
    return out;
}

CMatrixXd pt_first(const CMatrixXd& m, Eigen::Index da, Eigen::Index db) {
    CMatrixXd out(da * db, da * db);
    for (Eigen::Index i = 0; i < da; ++i)
        for (Eigen::Index j = 0; j < db; ++j)
            for (Eigen::Index k = 0; k < da; ++k)
                for (Eigen::Index l = 0; l < db; ++l) out(i * db + j, k * db + l) = m(k * db + j, i * db + l);
    return out;
}

CMatrixXd random_hermitian(Eigen::Index n, SeededStream& s) {
    const CMatrixXd g = ginibre(n, n, s);
    return (g + g.adjoint()) / 2.0;
}

}  // namespace

TEST_CASE("partial transpose matches index-form reference") {
    SeededStream s(7);
    for (auto [da, db] : {std::pair<Eigen::Index, Eigen::Index>{2, 2}, {2, 3}, {3, 2}, {3, 4}}) {
        const CMatrixXd m = ginibre(da * db, da * db, s);
        const SubsystemDims dims{da, db};
        CHECK((partial_transpose<double>(m, dims, Side::B) - pt_second(m, da, db)).norm() == doctest::Approx(0.0));
        CHECK((partial_transpose<double>(m, dims, Side::A) - pt_first(m, da, db)).norm() == doctest::Approx(0.0));
    }
}

TEST_CASE("partial transpose is an involution and composes to full transpose") {
    SeededStream s(8);
    const SubsystemDims dims{2, 3, 2};
    const CMatrixXd m = ginibre(12, 12, s);
    const std::vector<std::size_t> one{1}, all{0, 1, 2}, rest{0, 2};
    const CMatrixXd t1 = partial_transpose<double>(m, dims, one);
    CHECK((partial_transpose<double>(t1, dims, one) - m).norm() < 1e-14);
    CHECK((partial_transpose<double>(m, dims, all) - m.transpose()).norm() < 1e-14);
    CHECK((partial_transpose<double>(t1, dims, rest) - m.transpose()).norm() < 1e-14);
}

TEST_CASE("partial transpose rejects bad shapes") {
    const CMatrixXd m = CMatrixXd::Identity(6, 6);
    CHECK_THROWS_AS((void)partial_transpose<double>(m, SubsystemDims{2, 2}, Side::B), DimensionError);
    CHECK_THROWS_AS((void)partial_transpose<double>(CMatrixXd(CMatrixXd::Zero(6, 5)), SubsystemDims{2, 3}, Side::B),
                    DimensionError);
    const std::vector<std::size_t> bad{3};
    CHECK_THROWS_AS((void)partial_transpose<double>(m, SubsystemDims{2, 3}, bad), DimensionError);
    CHECK_THROWS_AS(SubsystemDims({2, 0}), DimensionError);
}

TEST_CASE("trace norm equals the sum of singular values") {
    SeededStream s(9);
    for (int trial = 0; trial < 50; ++trial) {
        const Eigen::Index n = 2 + static_cast<Eigen::Index>(s.below(10));
        const CMatrixXd h = random_hermitian(n, s);
        Eigen::JacobiSVD<CMatrixXd> svd(h);
        CHECK(trace_norm<double>(h) == doctest::Approx(svd.singularValues().sum()).epsilon(1e-12));
    }
}

TEST_CASE("trace norm of a qubit operator is twice the larger of |a0| and |a|") {
    SeededStream s(10);
    CMatrixXd x(2, 2), y(2, 2), z(2, 2);
    x << 0, 1, 1, 0;
    y << 0, std::complex<double>(0, -1), std::complex<double>(0, 1), 0;
    z << 1, 0, 0, -1;
    for (int trial = 0; trial < 200; ++trial) {
        const double a0 = s.normal(), a1 = s.normal(), a2 = s.normal(), a3 = s.normal();
        const CMatrixXd h = a0 * CMatrixXd::Identity(2, 2) + a1 * x + a2 * y + a3 * z;
        const double norm_a = std::sqrt(a1 * a1 + a2 * a2 + a3 * a3);
        CHECK(trace_norm<double>(h) == doctest::Approx(2.0 * std::max(std::abs(a0), norm_a)).epsilon(1e-12));
    }
}

TEST_CASE("jordan parts split a Hermitian operator") {
    SeededStream s(11);
    const CMatrixXd h = random_hermitian(6, s);
    const auto parts = jordan_parts<double>(h);
    CHECK((parts.positive + parts.negative - h).norm() < 1e-12);
    CHECK(min_eigenvalue<double>(parts.positive) > -1e-12);
    CHECK(min_eigenvalue<double>(CMatrixXd(-parts.negative)) > -1e-12);
    CHECK((parts.positive * parts.negative).norm() < 1e-12);
    CHECK((parts.positive - parts.negative).trace().real() == doctest::Approx(trace_norm<double>(h)));
}

TEST_CASE("hermitian checks") {
    CMatrixXd m = CMatrixXd::Identity(3, 3);
    m(0, 1) = 1.0;
    CHECK_THROWS_AS((void)hermitian_eig<double>(m), ValidationError);
    CHECK_THROWS_AS((void)trace_norm<double>(m), ValidationError);
    CHECK(hermiticity_error(m) == doctest::Approx(1.0));
}

TEST_CASE("partial trace matches explicit sums") {
    SeededStream s(12);
    const SubsystemDims dims{2, 3, 2};
    const CMatrixXd m = ginibre(12, 12, s);
    auto at = [&](Eigen::Index a, Eigen::Index b, Eigen::Index c) { return (a * 3 + b) * 2 + c; };

    CMatrixXd keep_ac = CMatrixXd::Zero(4, 4);
    for (Eigen::Index a = 0; a < 2; ++a)
        for (Eigen::Index c = 0; c < 2; ++c)
            for (Eigen::Index a2 = 0; a2 < 2; ++a2)
                for (Eigen::Index c2 = 0; c2 < 2; ++c2)
                    for (Eigen::Index b = 0; b < 3; ++b) keep_ac(a * 2 + c, a2 * 2 + c2) += m(at(a, b, c), at(a2, b, c2));
    const std::vector<std::size_t> ac{0, 2}, ca{2, 0};
    CHECK((partial_trace_matrix<double>(m, dims, ac) - keep_ac).norm() < 1e-12);
    // Order of the keep list does not matter; kept factors stay in place order.
    CHECK((partial_trace_matrix<double>(m, dims, ca) - keep_ac).norm() < 1e-12);

    const std::vector<std::size_t> none{};
    CHECK(partial_trace_matrix<double>(m, dims, none)(0, 0) == m.trace());
}

TEST_CASE("partial trace of a product returns the factor") {
    SeededStream s(13);
    const auto a = induced_mixed(SubsystemDims{3}, s);
    const auto b = induced_mixed(SubsystemDims{2}, s);
    const auto ab = tensor(a, b);
    CHECK((partial_trace(ab, {0}).matrix() - a.matrix()).norm() < 1e-12);
    CHECK((partial_trace(ab, {1}).matrix() - b.matrix()).norm() < 1e-12);
}

TEST_CASE("permute subsystems swaps tensor factors") {
    SeededStream s(14);
    const CMatrixXd a = ginibre(2, 2, s), b = ginibre(3, 3, s), c = ginibre(2, 2, s);
    const CMatrixXd abc = kron<double>(kron<double>(a, b), c);
    const std::vector<std::size_t> perm{2, 0, 1};
    const CMatrixXd expected = kron<double>(kron<double>(c, a), b);
    CHECK((permute_subsystems<double>(abc, SubsystemDims{2, 3, 2}, perm) - expected).norm() < 1e-12);
    const std::vector<std::size_t> bad{0, 0, 1};
    CHECK_THROWS_AS((void)permute_subsystems<double>(abc, SubsystemDims{2, 3, 2}, bad), DimensionError);
}

TEST_CASE("spectral exponential") {
    CMatrixXd x(2, 2);
    x << 0, 1, 1, 0;
    const double t = 0.37;
    const CMatrixXd u = exp_spectral<double>(x, t);
    const CMatrixXd expected =
        std::cos(t) * CMatrixXd::Identity(2, 2) - std::complex<double>(0, std::sin(t)) * x;
    CHECK((u - expected).norm() < 1e-14);

    SeededStream s(15);
    const CMatrixXd h = random_hermitian(8, s);
    const CMatrixXd v = exp_spectral<double>(h, 2.5);
    CHECK((v * v.adjoint() - CMatrixXd::Identity(8, 8)).norm() < 1e-12);
}

TEST_CASE("kron of vectors agrees with kron of matrices") {
    SeededStream s(16);
    const CVectorXd a = ginibre(3, 1, s).col(0), b = ginibre(2, 1, s).col(0);
    const CMatrixXd am = a, bm = b;
    CHECK((kron<double>(a, b) - CVectorXd(kron<double>(am, bm).col(0))).norm() < 1e-15);
}
