#include "ptdist/dynamics.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ptdist/matrix_io.hpp"

namespace ptdist {

namespace {

Eigen::Index jc_index(const FockSpec& spec, Eigen::Index a, Eigen::Index b, Eigen::Index c) {
    return (a * spec.mode_dim() + b) * 2 + c;
}

CMatrixXd pauli_raise() {
    CMatrixXd s = CMatrixXd::Zero(2, 2);
    s(1, 0) = 1.0;
    return s;
}

Bipartition two_party_cut() { return Bipartition::standard(); }

}  // namespace

void FockSpec::validate() const {
    if (n_max < 0) throw ValidationError("FockSpec: n_max must be non-negative");
    if (!std::isfinite(g)) throw ValidationError("FockSpec: coupling must be finite");
}

void Trajectory::validate() const {
    if (times.empty()) throw ValidationError("trajectory: no time points");
    if (times.size() != states.size()) throw ValidationError("trajectory: times and states differ in length");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1])) throw ValidationError("trajectory: times must be strictly ascending");
    for (const auto& s : states)
        if (s.dims() != dims) throw DimensionError("trajectory: state dims differ from trajectory dims");
}

CMatrixXd jc_hamiltonian(const FockSpec& spec) {
    spec.validate();
    const Eigen::Index m = spec.mode_dim();
    const Eigen::Index n = m * m * 2;
    CMatrixXd h = CMatrixXd::Zero(n, n);
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = 0; b < m; ++b) {
            // a s+ : |a, b, g> -> sqrt(a) |a-1, b, e>, and likewise for b.
            const Eigen::Index from = jc_index(spec, a, b, 0);
            if (a > 0) {
                const Eigen::Index to = jc_index(spec, a - 1, b, 1);
                h(to, from) += spec.g * std::sqrt(double(a));
                h(from, to) += spec.g * std::sqrt(double(a));
            }
            if (b > 0) {
                const Eigen::Index to = jc_index(spec, a, b - 1, 1);
                h(to, from) += spec.g * std::sqrt(double(b));
                h(from, to) += spec.g * std::sqrt(double(b));
            }
        }
    return h;
}

CMatrixXd jc_excitation_number(const FockSpec& spec) {
    spec.validate();
    const Eigen::Index m = spec.mode_dim();
    CMatrixXd out = CMatrixXd::Zero(m * m * 2, m * m * 2);
    for (Eigen::Index a = 0; a < m; ++a)
        for (Eigen::Index b = 0; b < m; ++b)
            for (Eigen::Index c = 0; c < 2; ++c) {
                const Eigen::Index i = jc_index(spec, a, b, c);
                out(i, i) = double(a + b + c);
            }
    return out;
}

PureStated noon_state(const FockSpec& spec, int photons) {
    spec.validate();
    if (photons < 0 || photons > spec.n_max)
        throw ValidationError("noon_state: photon number exceeds the Fock cutoff");
    const SubsystemDims dims = spec.dims();
    CVectorXd v = CVectorXd::Zero(dims.total());
    v(jc_index(spec, photons, 0, 0)) += 1.0 / std::sqrt(2.0);
    v(jc_index(spec, 0, photons, 0)) += 1.0 / std::sqrt(2.0);
    // photons = 0 collapses both branches onto the vacuum.
    v /= v.norm();
    return {std::move(v), dims};
}

std::vector<double> time_grid(double tmax, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("time grid: dt must be positive");
    if (!(tmax >= 0.0) || !std::isfinite(tmax)) throw ValidationError("time grid: tmax must be non-negative");
    const auto steps = static_cast<std::size_t>(std::floor(tmax / dt + 0.5));
    std::vector<double> out(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) out[i] = double(i) * dt;
    return out;
}

Trajectory evolve(const CMatrixXd& hamiltonian, const DensityMatrixd& rho0, std::span<const double> times) {
    detail::require_square(hamiltonian, "evolve");
    if (hamiltonian.rows() != rho0.dim()) throw DimensionError("evolve: Hamiltonian and state dimensions differ");
    if (times.empty()) throw ValidationError("evolve: no time points");
    const auto eig = hermitian_eig<double>(hamiltonian, 1e-10);

    Trajectory traj{{times.begin(), times.end()}, {}, rho0.dims()};
    traj.states.reserve(times.size());
    for (double t : times) {
        const CMatrixXd u = exp_spectral(eig, t);
        CMatrixXd rho = u * rho0.matrix() * u.adjoint();
        rho = (rho + rho.adjoint()) / 2.0;
        traj.states.emplace_back(std::move(rho), rho0.dims());
    }
    traj.validate();
    return traj;
}

JcWitness jc_witness(const FockSpec& spec, std::span<const double> times) {
    constexpr int kPhotons = 4;
    spec.validate();
    if (spec.n_max < kPhotons) throw ValidationError("jc_witness: n_max must be at least 4 for the NOON state");
    const SubsystemDims dims = spec.dims();
    const auto psi = noon_state(spec, kPhotons);

    JcWitness w;
    w.terms.negativity_ac_b = negativity<double>(psi.projector(), dims, Bipartition{{0, 2}, {1}});
    w.terms.classical_term = 0.5 * 1.0;
    w.terms.mediator_term = 0.5 * double(dims[2] - 1);
    w.bound = w.terms.total();

    const auto traj = evolve(jc_hamiltonian(spec), psi.density(), times);
    const CMatrixXd n_tot = jc_excitation_number(spec);
    const std::array<std::size_t, 2> keep_ab{0, 1};
    const SubsystemDims ab{dims[0], dims[1]};
    w.times = traj.times;
    w.negativity_ab.reserve(times.size());
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
        const CMatrixXd& rho = traj.states[i].matrix();
        const CMatrixXd reduced = partial_trace_matrix<double>(rho, dims, keep_ab);
        const double n_ab = negativity<double>(reduced, ab, two_party_cut());
        w.negativity_ab.push_back(n_ab);
        if (n_ab > w.max_negativity || i == 0) {
            w.max_negativity = n_ab;
            w.t_max = traj.times[i];
        }
        if (n_ab > w.bound && !w.t_first_violation) w.t_first_violation = traj.times[i];

        double leak = 0.0;
        for (Eigen::Index k = 0; k < rho.rows(); ++k)
            if (std::abs(n_tot(k, k).real() - kPhotons) > 0.5) leak += std::abs(rho(k, k).real());
        w.max_sector_leakage = std::max(w.max_sector_leakage, leak);
    }
    w.violated = w.t_first_violation.has_value();
    return w;
}

std::vector<NegativityIncrease> markov_witness(const Trajectory& trajectory, const Bipartition& cut, double tol) {
    trajectory.validate();
    if (trajectory.states.size() < 2) throw ValidationError("markov_witness: need at least two states");
    cut.validate(trajectory.dims);
    std::vector<double> n;
    n.reserve(trajectory.states.size());
    for (const auto& s : trajectory.states) n.push_back(negativity(s, cut));
    std::vector<NegativityIncrease> out;
    for (std::size_t i = 0; i + 1 < n.size(); ++i) {
        const double delta = n[i + 1] - n[i];
        if (delta > tol) out.push_back({trajectory.times[i], trajectory.times[i + 1], delta});
    }
    return out;
}

Trajectory exchange_model(std::span<const double> times) {
    // Layout S (x) R (x) E; the swap-type coupling acts on S and E only.
    const CMatrixXd sp = pauli_raise();
    const CMatrixXd id = CMatrixXd::Identity(2, 2);
    const CMatrixXd coupling = kron<double>(kron<double>(sp, id), CMatrixXd(sp.adjoint()));
    const CMatrixXd h = coupling + coupling.adjoint();

    const auto phi = max_entangled<double>(2);
    const auto env = basis_state<double>(SubsystemDims{2}, {0});
    const DensityMatrixd rho0(kron<double>(phi.projector(), env.projector()), SubsystemDims{2, 2, 2});
    const auto full = evolve(h, rho0, times);

    Trajectory out{full.times, {}, SubsystemDims{2, 2}};
    out.states.reserve(full.states.size());
    for (const auto& s : full.states) out.states.push_back(partial_trace(s, {0, 1}));
    return out;
}

Trajectory damping_model(std::span<const double> times) {
    const auto phi = max_entangled<double>(2);
    const CMatrixXd id = CMatrixXd::Identity(2, 2);
    Trajectory out{{times.begin(), times.end()}, {}, SubsystemDims{2, 2}};
    for (double t : times) {
        const double gamma = -std::expm1(-t);
        CMatrixXd k0 = CMatrixXd::Zero(2, 2), k1 = CMatrixXd::Zero(2, 2);
        k0(0, 0) = 1.0;
        k0(1, 1) = std::sqrt(1.0 - gamma);
        k1(0, 1) = std::sqrt(gamma);
        const CMatrixXd a = kron<double>(k0, id), b = kron<double>(k1, id);
        CMatrixXd rho = a * phi.projector() * a.adjoint() + b * phi.projector() * b.adjoint();
        out.states.emplace_back(std::move(rho), out.dims);
    }
    out.validate();
    return out;
}

Trajectory cp_divisible_model(int steps, std::uint64_t seed) {
    if (steps < 1) throw ValidationError("cp_divisible_model: need at least one step");
    SeededStream stream(seed);
    const auto channel = random_cptp<double>(2, 2, 2, stream);
    CMatrixXd rho = max_entangled<double>(2).projector();
    Trajectory out{{}, {}, SubsystemDims{2, 2}};
    for (int k = 0; k <= steps; ++k) {
        if (k > 0) {
            rho = channel.apply_first(rho, 2);
            rho = (rho + rho.adjoint()) / 2.0;
        }
        out.times.push_back(double(k));
        out.states.emplace_back(rho, out.dims);
    }
    out.validate();
    return out;
}

std::vector<std::string> builtin_model_names() { return {"exchange", "damping", "cp-divisible"}; }

std::optional<Trajectory> builtin_model(const std::string& name, std::span<const double> times, std::uint64_t seed) {
    if (name == "exchange") return exchange_model(times);
    if (name == "damping") return damping_model(times);
    if (name == "cp-divisible") return cp_divisible_model(static_cast<int>(std::max<std::size_t>(times.size(), 2) - 1), seed);
    return std::nullopt;
}

nlohmann::json trajectory_to_json(const Trajectory& trajectory) {
    trajectory.validate();
    nlohmann::json states = nlohmann::json::array();
    for (const auto& s : trajectory.states) states.push_back(matrix_to_json(s.matrix(), s.dims())["data"]);
    return {{"dims", trajectory.dims.values()}, {"times", trajectory.times}, {"states", std::move(states)}};
}

Trajectory trajectory_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("dims") || !j.contains("times") || !j.contains("states"))
        throw FormatError("trajectory file: expected an object with \"dims\", \"times\" and \"states\"");
    if (!j["times"].is_array() || !j["states"].is_array())
        throw FormatError("trajectory file: \"times\" and \"states\" must be arrays");
    std::vector<double> times;
    for (const auto& t : j["times"]) {
        if (!t.is_number()) throw FormatError("trajectory file: times must be numbers");
        times.push_back(t.get<double>());
    }
    std::vector<DensityMatrixd> states;
    std::optional<SubsystemDims> dims;
    for (const auto& data : j["states"]) {
        auto file = matrix_from_json({{"dims", j["dims"]}, {"data", data}});
        if (!dims) dims = file.dims;
        try {
            states.emplace_back(std::move(file.matrix), std::move(file.dims));
        } catch (const std::invalid_argument& e) {
            throw FormatError(std::string("trajectory file: ") + e.what());
        }
    }
    if (!dims) throw FormatError("trajectory file: no states");
    Trajectory out{std::move(times), std::move(states), *dims};
    try {
        out.validate();
    } catch (const std::invalid_argument& e) {
        throw FormatError(std::string("trajectory file: ") + e.what());
    }
    return out;
}

Trajectory read_trajectory_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("trajectory file: invalid JSON: ") + e.what());
    }
    return trajectory_from_json(j);
}

}  // namespace ptdist
