#ifndef PTDIST_TESTS_SUPPORT_HPP
#define PTDIST_TESTS_SUPPORT_HPP

#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "ptdist/measures.hpp"

namespace ptdist::testing {

/// Even mixture of (|00> + |01> + |12>)/sqrt3 and (|10> + |21> + |22>)/sqrt3:
/// sigma_N^T of this state is not PSD.
inline DensityMatrixd even_mixture_example() {
    CVectorXd a = CVectorXd::Zero(9), b = CVectorXd::Zero(9);
    const double s = 1.0 / std::sqrt(3.0);
    a(0 * 3 + 0) = s;
    a(0 * 3 + 1) = s;
    a(1 * 3 + 2) = s;
    b(1 * 3 + 0) = s;
    b(2 * 3 + 1) = s;
    b(2 * 3 + 2) = s;
    CMatrixXd rho = 0.5 * (a * a.adjoint() + b * b.adjoint());
    return {std::move(rho), SubsystemDims{3, 3}};
}

/// Scratch directory unique to one test, wiped on construction.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("ptdist-test-" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace ptdist::testing

#endif  // PTDIST_TESTS_SUPPORT_HPP
