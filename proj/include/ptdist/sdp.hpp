#ifndef PTDIST_SDP_HPP
#define PTDIST_SDP_HPP

// Block semidefinite programs over complex Hermitian matrices and a
// first-order operator-splitting (ADMM) solver for them.
//
//   minimize    <C, X> + offset
//   subject to  <A_i, X> = b_i          (real linear equalities)
//               X_k PSD                 (each declared block)
//               f free                  (optional free scalars)
//
// Linear functionals are written as sparse sums of Re(coef * X_k(r, c))
// plus real multiples of free scalars. Internally every Hermitian block is
// mapped isometrically onto R^(n*n) (diagonal entries, then sqrt(2)-scaled
// real and imaginary parts of the upper triangle) so that the Euclidean
// inner product equals Tr(XY).

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ptdist/linops.hpp"

namespace ptdist {

struct SdpTerm {
    std::size_t block;
    Eigen::Index row;
    Eigen::Index col;
    std::complex<double> coef;
};

struct LinearFunctional {
    std::vector<SdpTerm> terms;
    std::vector<std::pair<std::size_t, double>> free_terms;

    LinearFunctional& add(std::size_t block, Eigen::Index row, Eigen::Index col, std::complex<double> coef) {
        terms.push_back({block, row, col, coef});
        return *this;
    }
    LinearFunctional& add_free(std::size_t index, double coef) {
        free_terms.emplace_back(index, coef);
        return *this;
    }
};

struct SdpBlock {
    std::string name;
    Eigen::Index dim;
};

struct SdpEquality {
    LinearFunctional lhs;
    double rhs;
};

class SdpInstance {
public:
    std::size_t add_block(std::string name, Eigen::Index dim);
    /// Returns the index of the first new free scalar.
    std::size_t add_free_scalars(std::size_t count);
    void add_equality(LinearFunctional lhs, double rhs);
    void set_objective(LinearFunctional objective, double offset = 0.0);

    [[nodiscard]] const std::vector<SdpBlock>& blocks() const { return blocks_; }
    [[nodiscard]] std::size_t free_scalars() const { return free_scalars_; }
    [[nodiscard]] const std::vector<SdpEquality>& equalities() const { return equalities_; }
    [[nodiscard]] const LinearFunctional& objective() const { return objective_; }
    [[nodiscard]] double objective_offset() const { return offset_; }

    /// Total real dimension of the variable vector.
    [[nodiscard]] Eigen::Index variable_count() const;

    /// Debug description: blocks, equalities and objective as sparse
    /// (block, row, col, re, im) triplets, serialized as JSON.
    [[nodiscard]] std::string to_json() const;

private:
    void check(const LinearFunctional& f) const;

    std::vector<SdpBlock> blocks_;
    std::size_t free_scalars_ = 0;
    std::vector<SdpEquality> equalities_;
    LinearFunctional objective_;
    double offset_ = 0.0;
};

enum class SdpStatus { Optimal, Infeasible, MaxIter, NumericalTrouble };

[[nodiscard]] const char* to_string(SdpStatus status);

struct SdpSettings {
    double tol = 1e-6;
    // Iterate until residuals reach tol * inner_ratio so the returned
    // objective is itself accurate to about tol.
    double inner_ratio = 0.1;
    long max_iter = 50000;
    double relaxation = 1.6;   // over-relaxation factor in (0, 2)
    double rho = 1.0;          // initial penalty
    int check_every = 10;      // residual evaluation period
    long stall_window = 5000;  // infeasibility stall window (iterations)
};

struct SdpSolution {
    SdpStatus status = SdpStatus::NumericalTrouble;
    double value = 0.0;       // primal objective at the returned point
    double dual_value = 0.0;  // b^T y + offset for the recovered multipliers
    std::vector<CMatrixXd> blocks;
    Eigen::VectorXd free;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double gap = 0.0;
    long iterations = 0;
};

/// ADMM with a cached factorization of A A^T for the affine projection,
/// eigendecomposition-based PSD projection, over-relaxation, and
/// residual-balancing penalty updates. Returns Optimal only when the
/// normalized primal residual, dual residual and duality gap are all at or
/// below settings.tol. Deterministic for identical inputs.
[[nodiscard]] SdpSolution solve(const SdpInstance& instance, const SdpSettings& settings = {});

/// Hermitian matrix <-> isometric real vector (length n*n).
void hermitian_to_vec(const CMatrixXd& h, Eigen::Ref<Eigen::VectorXd> out);
[[nodiscard]] CMatrixXd vec_to_hermitian(const Eigen::Ref<const Eigen::VectorXd>& v, Eigen::Index n);

}  // namespace ptdist

#endif  // PTDIST_SDP_HPP
