#include "ptdist/conic.hpp"

#include <utility>
#include <vector>

namespace ptdist {

namespace {

const std::complex<double> kMinusI{0.0, -1.0};

/// One block contribution to a matrix equality: sign * X_block, read
/// through the partial transpose when `transposed` is set.
struct Contribution {
    std::size_t block;
    double sign;
    bool transposed;
};

/// sum of contributions = rhs, entrywise, as n*n real equalities.
void add_matrix_equality(SdpInstance& inst, const std::vector<Contribution>& parts, const CMatrixXd& rhs,
                         const SubsystemDims& dims) {
    const Eigen::Index n = rhs.rows();
    const std::vector<bool> mask{false, true};
    for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index r = 0; r <= c; ++r) {
            LinearFunctional re, im;
            for (const auto& p : parts) {
                const auto [sr, sc] = p.transposed ? transposed_source(r, c, dims, mask) : std::pair{r, c};
                re.add(p.block, sr, sc, p.sign);
                if (r != c) im.add(p.block, sr, sc, p.sign * kMinusI);
            }
            inst.add_equality(std::move(re), rhs(r, c).real());
            if (r != c) inst.add_equality(std::move(im), rhs(r, c).imag());
        }
}

LinearFunctional trace_of(std::size_t block, Eigen::Index n, double scale = 1.0) {
    LinearFunctional f;
    for (Eigen::Index i = 0; i < n; ++i) f.add(block, i, i, scale);
    return f;
}

void require_bipartite(const DensityMatrixd& rho, const char* what) {
    if (rho.dims().count() != 2) throw DimensionError(std::string(what) + ": state must be bipartite");
}

}  // namespace

SdpInstance build_qppt(const DensityMatrixd& rho) {
    require_bipartite(rho, "build_qppt");
    const Eigen::Index n = rho.dim();
    const auto& dims = rho.dims();
    SdpInstance inst;
    const auto p = inst.add_block("P", n);
    const auto q = inst.add_block("Q", n);
    const auto y = inst.add_block("Y", n);
    const auto w = inst.add_block("W", n);

    add_matrix_equality(inst, {{p, 1.0, false}, {q, -1.0, false}, {y, 1.0, false}}, partial_transpose(rho), dims);
    add_matrix_equality(inst, {{w, 1.0, false}, {y, -1.0, true}}, CMatrixXd::Zero(n, n), dims);
    inst.add_equality(trace_of(y, n), 1.0);

    LinearFunctional objective = trace_of(p, n, 0.5);
    for (auto& t : trace_of(q, n, 0.5).terms) objective.terms.push_back(t);
    inst.set_objective(std::move(objective));
    return inst;
}

QPptOutcome q_ppt(const DensityMatrixd& rho, const SdpSettings& settings) {
    auto solution = solve(build_qppt(rho), settings);
    std::optional<DensityMatrixd> closest;
    if (solution.status == SdpStatus::Optimal) {
        CMatrixXd sigma = psd_part<double>(solution.blocks[3]);
        sigma /= sigma.trace().real();
        closest.emplace(std::move(sigma), rho.dims(), 1e-6);
    }
    const double value = std::max(0.0, solution.value);
    return {{value, std::move(closest), QuantifierMethod::Sdp}, std::move(solution)};
}

SdpInstance build_conjecture_alt(const DensityMatrixd& rho) {
    require_bipartite(rho, "build_conjecture_alt");
    const Eigen::Index n = rho.dim();
    const auto& dims = rho.dims();
    SdpInstance inst;
    const auto x = inst.add_block("X", n);
    const auto w = inst.add_block("W", n);
    const auto s = inst.add_block("S", n);

    const CMatrixXd positive = jordan_parts<double>(partial_transpose(rho)).positive;
    add_matrix_equality(inst, {{w, 1.0, false}, {x, -1.0, true}}, CMatrixXd::Zero(n, n), dims);
    add_matrix_equality(inst, {{s, 1.0, false}, {x, 1.0, false}}, positive, dims);
    inst.add_equality(trace_of(x, n), 1.0);
    inst.set_objective({});
    return inst;
}

ConjectureAltResult check_conjecture_alt(const DensityMatrixd& rho, const SdpSettings& settings) {
    ConjectureAltResult out;
    out.solution = solve(build_conjecture_alt(rho), settings);
    out.feasible = out.solution.status == SdpStatus::Optimal;
    if (out.feasible) out.witness = out.solution.blocks[0];
    return out;
}

SdpInstance build_ppt_povm(const DensityMatrixd& rho, const DensityMatrixd& sigma) {
    require_bipartite(rho, "build_ppt_povm");
    if (rho.dims() != sigma.dims()) throw DimensionError("build_ppt_povm: states have different dims");
    const Eigen::Index n = rho.dim();
    const auto& dims = rho.dims();
    SdpInstance inst;
    const auto m = inst.add_block("M", n);
    const auto rest = inst.add_block("I-M", n);
    const auto mt = inst.add_block("M^T", n);
    const auto rest_t = inst.add_block("(I-M)^T", n);

    const CMatrixXd identity = CMatrixXd::Identity(n, n);
    add_matrix_equality(inst, {{m, 1.0, false}, {rest, 1.0, false}}, identity, dims);
    add_matrix_equality(inst, {{mt, 1.0, false}, {m, -1.0, true}}, CMatrixXd::Zero(n, n), dims);
    add_matrix_equality(inst, {{rest_t, 1.0, false}, {m, 1.0, true}}, identity, dims);

    // minimize -p = -1/2 - 1/2 Tr(M (rho - sigma)).
    const CMatrixXd diff = rho.matrix() - sigma.matrix();
    LinearFunctional objective;
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c)
            if (diff(c, r) != 0.0) objective.add(m, r, c, -0.5 * diff(c, r));
    inst.set_objective(std::move(objective), -0.5);
    return inst;
}

PptPovmResult ppt_povm_discrimination(const DensityMatrixd& rho, const DensityMatrixd& sigma,
                                      const SdpSettings& settings) {
    PptPovmResult out;
    out.solution = solve(build_ppt_povm(rho, sigma), settings);
    out.success_probability = std::clamp(-out.solution.value, 0.0, 1.0);
    if (out.solution.status == SdpStatus::Optimal) out.effect = out.solution.blocks[0];
    return out;
}

}  // namespace ptdist
