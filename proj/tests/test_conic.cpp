#include <doctest.h>

#include <json.hpp>

#include "ptdist/conic.hpp"
#include "support.hpp"

using namespace ptdist;

TEST_CASE("hermitian vectorization is an isometry") {
    SeededStream s(51);
    for (Eigen::Index n : {1, 2, 5}) {
        CMatrixXd a = ginibre(n, n, s), b = ginibre(n, n, s);
        a = (a + a.adjoint()).eval();
        b = (b + b.adjoint()).eval();
        Eigen::VectorXd va(n * n), vb(n * n);
        hermitian_to_vec(a, va);
        hermitian_to_vec(b, vb);
        CHECK(va.dot(vb) == doctest::Approx((a * b).trace().real()).epsilon(1e-12));
        CHECK((vec_to_hermitian(va, n) - a).norm() < 1e-12);
    }
}

TEST_CASE("solver: small feasible and infeasible programs") {
    {
        // min Tr X  s.t.  X(0,0) = 2, Re X(0,1) = 1, X >= 0 on 2x2: optimum 2 + 1/2.
        SdpInstance inst;
        const auto x = inst.add_block("X", 2);
        inst.add_equality(LinearFunctional{}.add(x, 0, 0, 1.0), 2.0);
        inst.add_equality(LinearFunctional{}.add(x, 0, 1, 1.0), 1.0);
        inst.set_objective(LinearFunctional{}.add(x, 0, 0, 1.0).add(x, 1, 1, 1.0));
        const auto sol = solve(inst);
        CHECK(sol.status == SdpStatus::Optimal);
        CHECK(sol.value == doctest::Approx(2.5).epsilon(1e-5));
        CHECK(sol.dual_value == doctest::Approx(2.5).epsilon(1e-5));
    }
    {
        // x >= 0 with x = -1 has no solution.
        SdpInstance inst;
        const auto x = inst.add_block("x", 1);
        inst.add_equality(LinearFunctional{}.add(x, 0, 0, 1.0), -1.0);
        inst.set_objective(LinearFunctional{});
        const auto sol = solve(inst);
        CHECK(sol.status == SdpStatus::Infeasible);
    }
    {
        // A free scalar shifted by an offset: min f + 3 s.t. f = 1.
        SdpInstance inst;
        (void)inst.add_block("unused", 1);
        const auto f = inst.add_free_scalars(1);
        inst.add_equality(LinearFunctional{}.add_free(f, 1.0), 1.0);
        inst.set_objective(LinearFunctional{}.add_free(f, 1.0), 3.0);
        const auto sol = solve(inst);
        CHECK(sol.status == SdpStatus::Optimal);
        CHECK(sol.value == doctest::Approx(4.0).epsilon(1e-6));
    }
}

TEST_CASE("solver rejects malformed programs") {
    SdpInstance inst;
    const auto x = inst.add_block("X", 2);
    CHECK_THROWS_AS(inst.add_equality(LinearFunctional{}.add(x + 1, 0, 0, 1.0), 1.0), DimensionError);
    CHECK_THROWS_AS(inst.add_equality(LinearFunctional{}.add(x, 2, 0, 1.0), 1.0), DimensionError);
}

TEST_CASE("distance to PPT states: maximally entangled and separable inputs") {
    const auto phi = max_entangled<double>(2).density();
    const auto r = q_ppt(phi);
    CHECK(r.solution.status == SdpStatus::Optimal);
    CHECK(std::abs(r.result.value - 0.5) <= 1e-6);
    REQUIRE(r.result.closest_state.has_value());
    CHECK(min_eigenvalue<double>(partial_transpose(*r.result.closest_state)) > -1e-5);

    SeededStream s(52);
    const auto sep = random_product(2, 3, s);
    const auto r2 = q_ppt(sep);
    CHECK(r2.solution.status == SdpStatus::Optimal);
    CHECK(r2.result.value <= 1e-6);
}

TEST_CASE("distance to PPT states equals the negativity on random states") {
    SeededStream s(53);
    for (auto [da, db] : {std::pair<Eigen::Index, Eigen::Index>{2, 2}, {2, 3}, {3, 3}}) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto rho = induced_mixed(SubsystemDims{da, db}, s);
            const auto r = q_ppt(rho);
            CHECK(r.solution.status == SdpStatus::Optimal);
            CHECK(r.result.value >= negativity(rho) - 1e-6);
            CHECK(std::abs(r.result.value - negativity(rho)) <= 1e-5);
        }
    }
}

TEST_CASE("even mixture example: no gap despite negative binegativity") {
    const auto ex = testing::even_mixture_example();
    const auto r = q_ppt(ex);
    CHECK(r.solution.status == SdpStatus::Optimal);
    CHECK(std::abs(r.result.value - negativity(ex)) <= 1e-5);

    const auto alt = check_conjecture_alt(ex);
    CHECK(alt.feasible);
    REQUIRE(alt.witness.has_value());
    const CMatrixXd sigma = partial_transpose<double>(*alt.witness, ex.dims());
    CHECK(std::abs(pt_distance<double>(ex.matrix(), sigma, ex.dims()) - negativity(ex)) <= 1e-5);
}

TEST_CASE("feasibility form: witness satisfies the constraints") {
    SeededStream s(54);
    const auto rho = induced_mixed(SubsystemDims{3, 3}, s);
    const auto alt = check_conjecture_alt(rho);
    REQUIRE(alt.feasible);
    const CMatrixXd& x = *alt.witness;
    CHECK(x.trace().real() == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(min_eigenvalue<double>(x, 1e-6) > -1e-5);
    CHECK(min_eigenvalue<double>(partial_transpose<double>(x, rho.dims()), 1e-6) > -1e-5);
    const CMatrixXd pos = psd_part<double>(partial_transpose(rho));
    CHECK(min_eigenvalue<double>(CMatrixXd(pos - x), 1e-6) > -1e-5);
}

TEST_CASE("PPT measurements cannot beat the partial transpose distance") {
    SeededStream s(55);
    for (int trial = 0; trial < 5; ++trial) {
        const auto rho = induced_mixed(SubsystemDims{2, 2}, s);
        const auto sigma = induced_mixed(SubsystemDims{2, 2}, s);
        const auto r = ppt_povm_discrimination(rho, sigma);
        CHECK(r.solution.status == SdpStatus::Optimal);
        CHECK(r.success_probability <= 0.5 + 0.5 * pt_distance(rho, sigma) + 1e-5);
        CHECK(r.success_probability >= 0.5 - 1e-6);
    }
    const auto a = basis_state<double>(SubsystemDims{2, 2}, {0, 0}).density();
    const auto b = basis_state<double>(SubsystemDims{2, 2}, {1, 1}).density();
    CHECK(ppt_povm_discrimination(a, b).success_probability == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(ppt_povm_discrimination(a, a).success_probability == doctest::Approx(0.5).epsilon(1e-5));
}

TEST_CASE("program export") {
    const auto inst = build_qppt(max_entangled<double>(2).density());
    const auto j = nlohmann::json::parse(inst.to_json());
    CHECK(j["format"] == "ptdist-sdp-v1");
    CHECK(j["blocks"].size() == inst.blocks().size());
    CHECK(j["equalities"].size() == inst.equalities().size());
}
