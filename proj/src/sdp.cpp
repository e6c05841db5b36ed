#include "ptdist/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <json.hpp>

#include "ptdist/error.hpp"

namespace ptdist {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

/// Position of the real part of entry (r, c), r < c, inside a block vector.
Eigen::Index offdiag_slot(Eigen::Index n, Eigen::Index r, Eigen::Index c) {
    return n + 2 * (c * (c - 1) / 2 + r);
}

struct Layout {
    std::vector<Eigen::Index> offsets;  // start of each block
    Eigen::Index free_offset = 0;
    Eigen::Index size = 0;

    explicit Layout(const SdpInstance& inst) {
        Eigen::Index o = 0;
        for (const auto& b : inst.blocks()) {
            offsets.push_back(o);
            o += b.dim * b.dim;
        }
        free_offset = o;
        size = o + static_cast<Eigen::Index>(inst.free_scalars());
    }
};

/// Row of real coefficients for a linear functional.
void append_row(const SdpInstance& inst, const Layout& layout, const LinearFunctional& f, Eigen::Index row,
                std::vector<Eigen::Triplet<double>>& out) {
    for (const auto& t : f.terms) {
        const Eigen::Index n = inst.blocks()[t.block].dim;
        const Eigen::Index base = layout.offsets[t.block];
        if (t.row == t.col) {
            out.emplace_back(row, base + t.row, t.coef.real());
        } else if (t.row < t.col) {
            const Eigen::Index s = base + offdiag_slot(n, t.row, t.col);
            out.emplace_back(row, s, t.coef.real() / kSqrt2);
            out.emplace_back(row, s + 1, -t.coef.imag() / kSqrt2);
        } else {
            const Eigen::Index s = base + offdiag_slot(n, t.col, t.row);
            out.emplace_back(row, s, t.coef.real() / kSqrt2);
            out.emplace_back(row, s + 1, t.coef.imag() / kSqrt2);
        }
    }
    for (const auto& [idx, coef] : f.free_terms) out.emplace_back(row, layout.free_offset + static_cast<Eigen::Index>(idx), coef);
}

Eigen::VectorXd dense_functional(const SdpInstance& inst, const Layout& layout, const LinearFunctional& f) {
    std::vector<Eigen::Triplet<double>> trips;
    append_row(inst, layout, f, 0, trips);
    Eigen::VectorXd v = Eigen::VectorXd::Zero(layout.size);
    for (const auto& t : trips) v(t.col()) += t.value();
    return v;
}

/// Projects every block of v onto the PSD cone in place.
void project_cone(const SdpInstance& inst, const Layout& layout, Eigen::VectorXd& v) {
    for (std::size_t k = 0; k < inst.blocks().size(); ++k) {
        const Eigen::Index n = inst.blocks()[k].dim;
        auto seg = v.segment(layout.offsets[k], n * n);
        const CMatrixXd h = vec_to_hermitian(seg, n);
        Eigen::SelfAdjointEigenSolver<CMatrixXd> eig(h);
        const Eigen::VectorXd lam = eig.eigenvalues();
        if (lam(0) >= 0.0) continue;
        const Eigen::VectorXd clipped = lam.cwiseMax(0.0);
        const CMatrixXd p = eig.eigenvectors() * clipped.cast<std::complex<double>>().asDiagonal() *
                            eig.eigenvectors().adjoint();
        hermitian_to_vec(p, seg);
    }
}

}  // namespace

void hermitian_to_vec(const CMatrixXd& h, Eigen::Ref<Eigen::VectorXd> out) {
    const Eigen::Index n = h.rows();
    for (Eigen::Index r = 0; r < n; ++r) out(r) = h(r, r).real();
    for (Eigen::Index c = 1; c < n; ++c)
        for (Eigen::Index r = 0; r < c; ++r) {
            const Eigen::Index s = offdiag_slot(n, r, c);
            // Average with the mirrored entry so slight asymmetry is removed.
            const std::complex<double> z = (h(r, c) + std::conj(h(c, r))) / 2.0;
            out(s) = kSqrt2 * z.real();
            out(s + 1) = kSqrt2 * z.imag();
        }
}

CMatrixXd vec_to_hermitian(const Eigen::Ref<const Eigen::VectorXd>& v, Eigen::Index n) {
    CMatrixXd h(n, n);
    for (Eigen::Index r = 0; r < n; ++r) h(r, r) = v(r);
    for (Eigen::Index c = 1; c < n; ++c)
        for (Eigen::Index r = 0; r < c; ++r) {
            const Eigen::Index s = offdiag_slot(n, r, c);
            const std::complex<double> z(v(s) / kSqrt2, v(s + 1) / kSqrt2);
            h(r, c) = z;
            h(c, r) = std::conj(z);
        }
    return h;
}

std::size_t SdpInstance::add_block(std::string name, Eigen::Index dim) {
    if (dim < 1) throw DimensionError("SdpInstance: block dimension must be positive");
    blocks_.push_back({std::move(name), dim});
    return blocks_.size() - 1;
}

std::size_t SdpInstance::add_free_scalars(std::size_t count) {
    const std::size_t first = free_scalars_;
    free_scalars_ += count;
    return first;
}

void SdpInstance::check(const LinearFunctional& f) const {
    for (const auto& t : f.terms) {
        if (t.block >= blocks_.size()) throw DimensionError("SdpInstance: term references an undeclared block");
        const Eigen::Index n = blocks_[t.block].dim;
        if (t.row < 0 || t.col < 0 || t.row >= n || t.col >= n)
            throw DimensionError("SdpInstance: term index outside its block");
        if (!std::isfinite(t.coef.real()) || !std::isfinite(t.coef.imag()))
            throw ValidationError("SdpInstance: non-finite coefficient");
    }
    for (const auto& [idx, coef] : f.free_terms) {
        if (idx >= free_scalars_) throw DimensionError("SdpInstance: term references an undeclared free scalar");
        if (!std::isfinite(coef)) throw ValidationError("SdpInstance: non-finite coefficient");
    }
}

void SdpInstance::add_equality(LinearFunctional lhs, double rhs) {
    check(lhs);
    if (!std::isfinite(rhs)) throw ValidationError("SdpInstance: non-finite right-hand side");
    equalities_.push_back({std::move(lhs), rhs});
}

void SdpInstance::set_objective(LinearFunctional objective, double offset) {
    check(objective);
    objective_ = std::move(objective);
    offset_ = offset;
}

Eigen::Index SdpInstance::variable_count() const { return Layout(*this).size; }

std::string SdpInstance::to_json() const {
    using nlohmann::json;
    auto functional = [](const LinearFunctional& f) {
        json terms = json::array();
        for (const auto& t : f.terms) terms.push_back({t.block, t.row, t.col, t.coef.real(), t.coef.imag()});
        json free = json::array();
        for (const auto& [idx, coef] : f.free_terms) free.push_back({idx, coef});
        return json{{"terms", terms}, {"free_terms", free}};
    };
    json blocks = json::array();
    for (const auto& b : blocks_) blocks.push_back({{"name", b.name}, {"dim", b.dim}});
    json eqs = json::array();
    for (const auto& e : equalities_) {
        json item = functional(e.lhs);
        item["rhs"] = e.rhs;
        eqs.push_back(std::move(item));
    }
    json objective = functional(objective_);
    objective["offset"] = offset_;
    json out{{"format", "ptdist-sdp-v1"},
             {"term_layout", {"block", "row", "col", "re", "im"}},
             {"blocks", blocks},
             {"free_scalars", free_scalars_},
             {"equalities", eqs},
             {"objective", objective}};
    return out.dump(2);
}

const char* to_string(SdpStatus status) {
    switch (status) {
        case SdpStatus::Optimal: return "Optimal";
        case SdpStatus::Infeasible: return "Infeasible";
        case SdpStatus::MaxIter: return "MaxIter";
        case SdpStatus::NumericalTrouble: return "NumericalTrouble";
    }
    return "Unknown";
}

SdpSolution solve(const SdpInstance& inst, const SdpSettings& settings) {
    const Layout layout(inst);
    const Eigen::Index nvar = layout.size;
    const auto ncon = static_cast<Eigen::Index>(inst.equalities().size());

    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd b(ncon);
    for (Eigen::Index i = 0; i < ncon; ++i) {
        const auto& eq = inst.equalities()[static_cast<std::size_t>(i)];
        append_row(inst, layout, eq.lhs, i, trips);
        b(i) = eq.rhs;
    }
    Eigen::SparseMatrix<double> a(ncon, nvar);
    a.setFromTriplets(trips.begin(), trips.end());
    const Eigen::SparseMatrix<double> at = a.transpose();
    const Eigen::VectorXd c = dense_functional(inst, layout, inst.objective());

    Eigen::SparseMatrix<double> aat = a * at;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor;
    if (ncon > 0) {
        factor.compute(aat);
        if (factor.info() != Eigen::Success || (factor.vectorD().array() <= 1e-13).any()) {
            // Redundant equalities: regularize the normal equations.
            Eigen::SparseMatrix<double> reg(ncon, ncon);
            reg.setIdentity();
            aat += 1e-10 * reg;
            factor.compute(aat);
        }
        if (factor.info() != Eigen::Success) throw ValidationError("solve: cannot factor the equality constraints");
    }

    auto project_affine = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd {
        if (ncon == 0) return w;
        const Eigen::VectorXd nu = factor.solve(a * w - b);
        return w - at * nu;
    };
    const double bnorm = b.norm(), cnorm = c.norm();

    Eigen::VectorXd z = Eigen::VectorXd::Zero(nvar), u = Eigen::VectorXd::Zero(nvar);
    Eigen::VectorXd x(nvar), z_old(nvar), xr(nvar);
    double rho = settings.rho;
    const double alpha = settings.relaxation;

    SdpSolution sol;
    sol.status = SdpStatus::MaxIter;
    Eigen::VectorXd y = Eigen::VectorXd::Zero(ncon);

    // Infeasibility bookkeeping: residual history and dual norm at window start.
    struct Sample {
        long iter;
        double primal;
        double dual_norm;
    };
    std::deque<Sample> history;

    auto evaluate = [&](long iter) {
        const Eigen::VectorXd s = -rho * u;  // lies in the cone by construction
        const Eigen::VectorXd cs = c - s;
        if (ncon > 0) y = factor.solve(a * cs);
        const Eigen::VectorXd rd = cs - at * y;
        sol.primal_residual = ncon > 0 ? (a * z - b).norm() / (1.0 + bnorm) : 0.0;
        sol.dual_residual = rd.norm() / (1.0 + cnorm);
        const double pobj = c.dot(z) + inst.objective_offset();
        const double dobj = b.dot(y) + inst.objective_offset();
        sol.value = pobj;
        sol.dual_value = dobj;
        sol.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        sol.iterations = iter;
        history.push_back({iter, sol.primal_residual, s.norm()});
        while (history.size() > 1 && history.front().iter < iter - settings.stall_window) history.pop_front();
    };

    const double target = settings.tol * std::clamp(settings.inner_ratio, 1e-3, 1.0);
    long iter = 0;
    for (; iter < settings.max_iter; ++iter) {
        x = project_affine(z - u - c / rho);
        xr = alpha * x + (1.0 - alpha) * z;
        z_old = z;
        z = xr + u;
        project_cone(inst, layout, z);
        u += xr - z;

        if (!z.allFinite() || !u.allFinite()) {
            sol.status = SdpStatus::NumericalTrouble;
            break;
        }
        if ((iter + 1) % settings.check_every != 0) continue;

        evaluate(iter + 1);
        if (sol.primal_residual <= target && sol.dual_residual <= target && sol.gap <= target) {
            sol.status = SdpStatus::Optimal;
            ++iter;
            break;
        }

        if (iter + 1 >= settings.stall_window && history.front().iter <= iter + 1 - settings.stall_window) {
            const bool stalled = std::all_of(history.begin(), history.end(),
                                             [&](const Sample& h) { return h.primal > 1e3 * settings.tol; });
            const bool diverging = history.back().dual_norm > 10.0 * std::max(history.front().dual_norm, 1.0);
            if (stalled && diverging) {
                sol.status = SdpStatus::Infeasible;
                ++iter;
                break;
            }
        }

        // Residual balancing on the ADMM residuals.
        const double r_admm = (x - z).norm();
        const double s_admm = rho * (z - z_old).norm();
        if (r_admm > 10.0 * s_admm) {
            rho *= 2.0;
            u /= 2.0;
        } else if (s_admm > 10.0 * r_admm) {
            rho /= 2.0;
            u *= 2.0;
        }
        rho = std::clamp(rho, 1e-6, 1e6);
    }
    if (sol.status == SdpStatus::MaxIter) evaluate(iter);
    sol.iterations = iter;

    for (std::size_t k = 0; k < inst.blocks().size(); ++k) {
        const Eigen::Index n = inst.blocks()[k].dim;
        sol.blocks.push_back(vec_to_hermitian(z.segment(layout.offsets[k], n * n), n));
    }
    sol.free = z.tail(static_cast<Eigen::Index>(inst.free_scalars()));
    return sol;
}

}  // namespace ptdist
