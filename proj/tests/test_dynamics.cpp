#include <doctest.h>

#include "ptdist/dynamics.hpp"
#include "support.hpp"

using namespace ptdist;

namespace {

// Peak of N_A:B on the default grid (g = 1, n_max = 4, t in [0, 10], dt = 0.01),
// frozen from a reference run.
constexpr double kFrozenPeak = 1.909641783599643;
constexpr double kFrozenPeakTime = 7.83;

}  // namespace

TEST_CASE("Jaynes-Cummings Hamiltonian structure") {
    const FockSpec spec{4, 1.0};
    const CMatrixXd h = jc_hamiltonian(spec);
    CHECK(h.rows() == 50);
    CHECK(hermiticity_error(h) <= 1e-12);
    const CMatrixXd n = jc_excitation_number(spec);
    CHECK((h * n - n * h).cwiseAbs().maxCoeff() <= 1e-10);

    const CMatrixXd h0 = jc_hamiltonian(FockSpec{0, 1.0});
    CHECK(h0.rows() == 2);
    CHECK(h0.cwiseAbs().maxCoeff() == 0.0);

    // Single excitation: |1, 0, g> couples to |0, 0, e> with strength g.
    const FockSpec one{1, 0.7};
    const CMatrixXd h1 = jc_hamiltonian(one);
    const Eigen::Index from = (1 * 2 + 0) * 2 + 0, to = (0 * 2 + 0) * 2 + 1;
    CHECK(h1(to, from).real() == doctest::Approx(0.7));
    CHECK_THROWS_AS((void)jc_hamiltonian(FockSpec{-1, 1.0}), ValidationError);
}

TEST_CASE("evolution preserves the spectrum") {
    SeededStream s(61);
    const auto rho0 = induced_mixed(SubsystemDims{3, 2}, s);
    const CMatrixXd g = ginibre(6, 6, s);
    const CMatrixXd h = (g + g.adjoint()) / 2.0;
    const auto times = time_grid(3.0, 0.1);
    const auto traj = evolve(h, rho0, times);
    CHECK(traj.states.size() == times.size());
    const auto ref = hermitian_eig<double>(rho0.matrix()).values;
    for (const auto& st : traj.states) {
        CHECK((hermitian_eig<double>(st.matrix()).values - ref).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK(st.purity() == doctest::Approx(rho0.purity()).epsilon(1e-9));
        CHECK(std::abs(st.matrix().trace().real() - 1.0) <= 1e-9);
    }

    const auto still = evolve(CMatrixXd::Zero(6, 6), rho0, times);
    for (const auto& st : still.states) CHECK((st.matrix() - rho0.matrix()).norm() <= 1e-14);

    CHECK_THROWS_AS((void)evolve(CMatrixXd::Zero(4, 4), rho0, times), DimensionError);
}

TEST_CASE("time grid") {
    const auto t = time_grid(10.0, 0.01);
    CHECK(t.size() == 1001);
    CHECK(t.front() == 0.0);
    CHECK(t.back() == doctest::Approx(10.0));
    CHECK_THROWS_AS((void)time_grid(1.0, 0.0), ValidationError);
}

TEST_CASE("NOON state negativities at t = 0") {
    const FockSpec spec{4, 1.0};
    const auto psi = noon_state(spec);
    const auto dims = spec.dims();
    CHECK(negativity<double>(psi.projector(), dims, Bipartition{{0, 2}, {1}}) == doctest::Approx(0.5).epsilon(1e-12));
    const CMatrixXd ab = partial_trace_matrix<double>(psi.projector(), dims, std::vector<std::size_t>{0, 1});
    CHECK(negativity<double>(ab, SubsystemDims{5, 5}, Bipartition::standard()) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS((void)noon_state(FockSpec{3, 1.0}), ValidationError);
}

TEST_CASE("Jaynes-Cummings witness on the default grid") {
    const auto w = jc_witness(FockSpec{4, 1.0}, time_grid(10.0, 0.01));
    CHECK(std::abs(w.bound - 1.5) <= 1e-12);
    CHECK(w.terms.classical_term == 0.5);
    CHECK(w.terms.mediator_term == 0.5);
    CHECK(std::abs(w.negativity_ab.front() - 0.5) <= 1e-9);
    CHECK(w.violated);
    REQUIRE(w.t_first_violation.has_value());
    CHECK(w.max_negativity > 1.5);
    CHECK(std::abs(w.max_negativity - kFrozenPeak) <= 1e-10);
    CHECK(w.t_max == doctest::Approx(kFrozenPeakTime));
    CHECK(w.max_sector_leakage <= 1e-10);
    CHECK_THROWS_AS((void)jc_witness(FockSpec{3, 1.0}, time_grid(1.0, 0.1)), ValidationError);
}

TEST_CASE("a larger cutoff changes nothing") {
    const auto times = time_grid(2.0, 0.05);
    const auto w4 = jc_witness(FockSpec{4, 1.0}, times);
    const auto w5 = jc_witness(FockSpec{5, 1.0}, times);
    for (std::size_t i = 0; i < times.size(); ++i)
        CHECK(w4.negativity_ab[i] == doctest::Approx(w5.negativity_ab[i]).epsilon(1e-9));
}

TEST_CASE("coupling only rescales time") {
    const auto w1 = jc_witness(FockSpec{4, 1.0}, time_grid(2.0, 0.1));
    const auto w2 = jc_witness(FockSpec{4, 2.0}, time_grid(1.0, 0.05));
    for (std::size_t i = 0; i < w1.times.size(); ++i)
        CHECK(w1.negativity_ab[i] == doctest::Approx(w2.negativity_ab[i]).epsilon(1e-9));
}

TEST_CASE("negativity-increase witness on built-in models") {
    const auto times = time_grid(10.0, 0.05);
    CHECK_FALSE(markov_witness(exchange_model(times), Bipartition::standard()).empty());
    CHECK(markov_witness(damping_model(times), Bipartition::standard()).empty());
    CHECK(markov_witness(cp_divisible_model(50, 3), Bipartition::standard()).empty());
    CHECK_FALSE(builtin_model("nope", times, 1).has_value());
}

TEST_CASE("global unitaries leave negativity unchanged") {
    // Local unitary evolution U_A (x) U_B of a fixed entangled state.
    SeededStream s(62);
    const auto rho0 = induced_mixed(SubsystemDims{2, 3}, s);
    const CMatrixXd ga = ginibre(2, 2, s), gb = ginibre(3, 3, s);
    const CMatrixXd ha = (ga + ga.adjoint()) / 2.0, hb = (gb + gb.adjoint()) / 2.0;
    const CMatrixXd h = kron<double>(ha, CMatrixXd::Identity(3, 3)) + kron<double>(CMatrixXd::Identity(2, 2), hb);
    const auto traj = evolve(h, rho0, time_grid(5.0, 0.1));
    CHECK(markov_witness(traj, Bipartition::standard()).empty());
}

TEST_CASE("cumulative channels never raise negativity") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed)
        CHECK(markov_witness(cp_divisible_model(30, seed), Bipartition::standard()).empty());
}

TEST_CASE("trajectory validation") {
    const auto t = damping_model(time_grid(1.0, 0.5));
    auto bad = t;
    std::swap(bad.times[0], bad.times[1]);
    CHECK_THROWS_AS(bad.validate(), ValidationError);
    auto short_one = t;
    short_one.times.pop_back();
    CHECK_THROWS_AS(short_one.validate(), ValidationError);
    const Trajectory single{{0.0}, {t.states[0]}, t.dims};
    CHECK_THROWS_AS((void)markov_witness(single, Bipartition::standard()), ValidationError);
}

TEST_CASE("trajectory JSON round trip") {
    const auto t = exchange_model(time_grid(1.0, 0.25));
    const auto back = trajectory_from_json(trajectory_to_json(t));
    CHECK(back.times == t.times);
    CHECK(back.dims == t.dims);
    for (std::size_t i = 0; i < t.states.size(); ++i) CHECK(back.states[i].matrix() == t.states[i].matrix());

    auto j = trajectory_to_json(t);
    j["states"][0][0] = "x";
    CHECK_THROWS_AS((void)trajectory_from_json(j), FormatError);
    CHECK_THROWS_AS((void)trajectory_from_json(nlohmann::json::array()), FormatError);
}
