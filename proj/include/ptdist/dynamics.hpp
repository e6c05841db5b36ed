#ifndef PTDIST_DYNAMICS_HPP
#define PTDIST_DYNAMICS_HPP

// Closed-system evolution and negativity-based dynamics witnesses.
//
// The Jaynes-Cummings model couples two field modes A and B through a
// two-level atom C; the composite layout is A (x) B (x) C with the atom
// last, atom basis |0> = ground and |1> = excited. Times are measured in
// units of 1/g.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptdist/measures.hpp"

namespace ptdist {

struct FockSpec {
    int n_max = 4;   // photon-number cutoff per mode
    double g = 1.0;  // atom-field coupling

    [[nodiscard]] Eigen::Index mode_dim() const { return n_max + 1; }
    [[nodiscard]] SubsystemDims dims() const { return {mode_dim(), mode_dim(), 2}; }
    void validate() const;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrixd> states;
    SubsystemDims dims;

    /// Throws unless times ascend, lengths match and every state has `dims`.
    void validate() const;
};

/// H = g (a s+ + a^dag s-) + g (b s+ + b^dag s-).
[[nodiscard]] CMatrixXd jc_hamiltonian(const FockSpec& spec);
/// a^dag a + b^dag b + s+ s-.
[[nodiscard]] CMatrixXd jc_excitation_number(const FockSpec& spec);
/// (|N 0 g> + |0 N g>) / sqrt(2).
[[nodiscard]] PureStated noon_state(const FockSpec& spec, int photons = 4);

/// Uniform grid 0, dt, 2 dt, ... up to and including tmax (within dt/2).
[[nodiscard]] std::vector<double> time_grid(double tmax, double dt);

/// rho(t) = U(t) rho0 U(t)^dag with U(t) = exp(-i H t) from one
/// eigendecomposition of H.
[[nodiscard]] Trajectory evolve(const CMatrixXd& hamiltonian, const DensityMatrixd& rho0, std::span<const double> times);

/// Terms of the decomposable-dynamics bound N_A:B(t) <= N_AC:B(0) + C_T/2 + sup N_A:C.
struct DecomposabilityBound {
    double negativity_ac_b = 0.0;   // N_AC:B of the initial state
    double classical_term = 0.5;    // C_T / 2 with C_T <= 1
    double mediator_term = 0.5;     // sup over pure AC states of N_A:C = (d_C - 1) / 2
    [[nodiscard]] double total() const { return negativity_ac_b + classical_term + mediator_term; }
};

struct JcWitness {
    std::vector<double> times;
    std::vector<double> negativity_ab;  // N_A:B of Tr_C rho(t)
    DecomposabilityBound terms;
    double bound = 0.0;
    bool violated = false;
    std::optional<double> t_first_violation;
    double max_negativity = 0.0;
    double t_max = 0.0;
    double max_sector_leakage = 0.0;  // population outside the initial excitation sector
};

/// Non-decomposability witness for the NOON initial state (requires n_max >= 4).
[[nodiscard]] JcWitness jc_witness(const FockSpec& spec, std::span<const double> times);

struct NegativityIncrease {
    double t_start;
    double t_end;
    double delta;
};

inline constexpr double kMarkovTol = 1e-8;

/// Consecutive increases of negativity across `cut` larger than `tol`.
[[nodiscard]] std::vector<NegativityIncrease> markov_witness(const Trajectory& trajectory, const Bipartition& cut,
                                                             double tol = kMarkovTol);

// Built-in two-qubit trajectories on system (x) ancilla, dims (2, 2).

/// System qubit exchanging its excitation with an environment qubit
/// (partial swap), starting maximally entangled with the ancilla.
[[nodiscard]] Trajectory exchange_model(std::span<const double> times);
/// Amplitude damping with decay probability 1 - exp(-t) on the system half
/// of a maximally entangled pair.
[[nodiscard]] Trajectory damping_model(std::span<const double> times);
/// A fixed random channel applied repeatedly to the system half; time k is
/// the state after k applications.
[[nodiscard]] Trajectory cp_divisible_model(int steps, std::uint64_t seed);

[[nodiscard]] std::optional<Trajectory> builtin_model(const std::string& name, std::span<const double> times,
                                                      std::uint64_t seed);
[[nodiscard]] std::vector<std::string> builtin_model_names();

/// {"dims": [...], "times": [...], "states": [[[re, im], ...], ...]}
[[nodiscard]] nlohmann::json trajectory_to_json(const Trajectory& trajectory);
[[nodiscard]] Trajectory trajectory_from_json(const nlohmann::json& j);
[[nodiscard]] Trajectory read_trajectory_file(const std::filesystem::path& path);

}  // namespace ptdist

#endif  // PTDIST_DYNAMICS_HPP
