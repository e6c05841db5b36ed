#ifndef PTDIST_PROD_ORACLE_HPP
#define PTDIST_PROD_ORACLE_HPP

// Brute-force distance from sum_i p_i |ii><ii| to product states.
//
// Minimizes f(u) = sum_i max{0, p_i - u_i^2} over the probability simplex
// by exhaustive dynamic programming on a coarse mass grid, followed by
// pairwise exchange line searches at the requested resolution that are
// refined geometrically. It shares no code with q_prod_classical and is
// meant as a cross-check for small dimensions.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ptdist/states.hpp"

namespace ptdist {

namespace detail {

template <typename Scalar>
Scalar prod_objective(const RVector<Scalar>& p, const std::vector<Scalar>& u) {
    Scalar f = 0;
    for (Eigen::Index i = 0; i < p.size(); ++i) f += std::max(Scalar(0), p(i) - u[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)]);
    return f;
}

/// Exhaustive minimum over u_i in {0, h, 2h, ...} with sum u_i = 1.
template <typename Scalar>
std::vector<Scalar> prod_grid_minimizer(const RVector<Scalar>& p, int cells) {
    const auto d = static_cast<std::size_t>(p.size());
    const Scalar h = Scalar(1) / Scalar(cells);
    const auto width = static_cast<std::size_t>(cells) + 1;
    const Scalar inf = std::numeric_limits<Scalar>::infinity();
    // best[i][k]: min of sum_{j<=i} g_j using total mass k*h; choice[i][k]: cells given to i.
    std::vector<Scalar> best(d * width, inf);
    std::vector<int> choice(d * width, 0);
    auto g = [&](std::size_t i, int k) { return std::max(Scalar(0), p(static_cast<Eigen::Index>(i)) - (k * h) * (k * h)); };
    for (int k = 0; k <= cells; ++k) {
        best[static_cast<std::size_t>(k)] = g(0, k);
        choice[static_cast<std::size_t>(k)] = k;
    }
    for (std::size_t i = 1; i < d; ++i)
        for (int k = 0; k <= cells; ++k) {
            Scalar b = inf;
            int arg = 0;
            for (int j = 0; j <= k; ++j) {
                const Scalar v = best[(i - 1) * width + static_cast<std::size_t>(k - j)] + g(i, j);
                if (v < b) {
                    b = v;
                    arg = j;
                }
            }
            best[i * width + static_cast<std::size_t>(k)] = b;
            choice[i * width + static_cast<std::size_t>(k)] = arg;
        }
    std::vector<Scalar> u(d);
    int remaining = cells;
    for (std::size_t i = d; i-- > 0;) {
        const int c = choice[i * width + static_cast<std::size_t>(remaining)];
        u[i] = c * h;
        remaining -= c;
    }
    return u;
}

}  // namespace detail

/// Minimum of sum_i max{0, p_i - u_i^2} over the simplex, i.e. Q_Prod of
/// the classically correlated state with probabilities p. `grid` is the
/// line-search resolution of the exchange phase.
template <typename Scalar>
[[nodiscard]] Scalar q_prod_oracle(const ClassicalState<Scalar>& state, Scalar grid = Scalar(1e-4)) {
    const RVector<Scalar>& p = state.probabilities();
    const Eigen::Index d = p.size();
    if (d > 6) throw DimensionError("q_prod_oracle: brute force limited to d <= 6");
    if (d == 1) return Scalar(0);

    const int cells = d <= 3 ? 4000 : (d <= 5 ? 1000 : 500);
    std::vector<Scalar> u = detail::prod_grid_minimizer(p, cells);
    Scalar f = detail::prod_objective(p, u);

    // Pairwise exchange: move mass between u_i and u_j along the whole
    // feasible segment, then zoom in around the best point.
    for (int sweep = 0; sweep < 100; ++sweep) {
        const Scalar before = f;
        for (Eigen::Index i = 0; i < d; ++i)
            for (Eigen::Index j = i + 1; j < d; ++j) {
                const auto si = static_cast<std::size_t>(i), sj = static_cast<std::size_t>(j);
                const Scalar total = u[si] + u[sj];
                if (total <= Scalar(0)) continue;
                auto eval = [&](Scalar x) {
                    auto trial = u;
                    trial[si] = x;
                    trial[sj] = total - x;
                    return detail::prod_objective(p, trial);
                };
                Scalar lo = 0, hi = total, step = std::min(grid, total);
                Scalar best_x = u[si], best_f = f;
                while (step > Scalar(1e-13)) {
                    for (Scalar x = lo;; x += step) {
                        const Scalar xc = std::min(x, hi);
                        const Scalar v = eval(xc);
                        if (v < best_f) {
                            best_f = v;
                            best_x = xc;
                        }
                        if (xc >= hi) break;
                    }
                    lo = std::max(Scalar(0), best_x - step);
                    hi = std::min(total, best_x + step);
                    step /= Scalar(10);
                }
                if (best_f < f) {
                    u[si] = best_x;
                    u[sj] = total - best_x;
                    f = best_f;
                }
            }
        if (before - f <= Scalar(1e-15)) break;
    }
    return f;
}

}  // namespace ptdist

#endif  // PTDIST_PROD_ORACLE_HPP
