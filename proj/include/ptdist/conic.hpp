#ifndef PTDIST_CONIC_HPP
#define PTDIST_CONIC_HPP

// Semidefinite programs around the partial transpose distance: the
// distance to PPT states, the feasibility form of the negativity
// conjecture, and two-state discrimination with PPT measurements.

#include <optional>

#include "ptdist/measures.hpp"
#include "ptdist/sdp.hpp"

namespace ptdist {

/// min 1/2 Tr(P + Q)  s.t.  P - Q = rho^T - Y,  Tr Y = 1,
///                          P, Q, Y >= 0,  W = Y^T >= 0.
/// Y plays sigma^T for the candidate PPT state sigma = W.
[[nodiscard]] SdpInstance build_qppt(const DensityMatrixd& rho);

struct QPptOutcome {
    QuantifierResult<double> result;  // closest_state set when the solve is Optimal
    SdpSolution solution;
};

/// Q_PPT(rho) = inf over PPT sigma of d_T(rho, sigma).
[[nodiscard]] QPptOutcome q_ppt(const DensityMatrixd& rho, const SdpSettings& settings = {});

/// find X >= 0 with X^T >= 0, Tr X = 1 and [rho^T]_+ - X >= 0.
[[nodiscard]] SdpInstance build_conjecture_alt(const DensityMatrixd& rho);

struct ConjectureAltResult {
    bool feasible = false;
    std::optional<CMatrixXd> witness;  // X; its partial transpose is the PPT state
    SdpSolution solution;
};

[[nodiscard]] ConjectureAltResult check_conjecture_alt(const DensityMatrixd& rho, const SdpSettings& settings = {});

/// max 1/2 (Tr M rho + Tr (I - M) sigma) over 0 <= M <= I with
/// M^T >= 0 and (I - M)^T >= 0.
[[nodiscard]] SdpInstance build_ppt_povm(const DensityMatrixd& rho, const DensityMatrixd& sigma);

struct PptPovmResult {
    double success_probability = 0.0;
    std::optional<CMatrixXd> effect;  // M
    SdpSolution solution;
};

[[nodiscard]] PptPovmResult ppt_povm_discrimination(const DensityMatrixd& rho, const DensityMatrixd& sigma,
                                                    const SdpSettings& settings = {});

}  // namespace ptdist

#endif  // PTDIST_CONIC_HPP
