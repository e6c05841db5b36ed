#ifndef PTDIST_MATRIX_IO_HPP
#define PTDIST_MATRIX_IO_HPP

// Matrix file format shared by every tool:
//
//   {"dims": [d1, d2, ...], "data": [[re, im], ...]}
//
// with row-major data of length (d1 * d2 * ...)^2.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "ptdist/states.hpp"

namespace ptdist {

struct MatrixFile {
    CMatrixXd matrix;
    SubsystemDims dims;
};

/// Throws FormatError on malformed or dimension-inconsistent payloads.
[[nodiscard]] MatrixFile matrix_from_json(const nlohmann::json& j);
[[nodiscard]] MatrixFile parse_matrix(const std::string& text);
[[nodiscard]] MatrixFile read_matrix_file(const std::filesystem::path& path);

/// Parses and validates as a density matrix (FormatError on invalid state).
[[nodiscard]] DensityMatrixd read_density_matrix(const std::filesystem::path& path, double tol = kDefaultTol);

[[nodiscard]] nlohmann::json matrix_to_json(const CMatrixXd& m, const SubsystemDims& dims);
[[nodiscard]] std::string format_matrix(const CMatrixXd& m, const SubsystemDims& dims);
void write_matrix_file(const std::filesystem::path& path, const CMatrixXd& m, const SubsystemDims& dims);

}  // namespace ptdist

#endif  // PTDIST_MATRIX_IO_HPP
