#include "ptdist/matrix_io.hpp"

#include <fstream>
#include <sstream>

namespace ptdist {

MatrixFile matrix_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw FormatError("matrix file: top level must be an object");
    if (!j.contains("dims") || !j["dims"].is_array() || j["dims"].empty())
        throw FormatError("matrix file: missing or empty \"dims\" array");
    if (!j.contains("data") || !j["data"].is_array()) throw FormatError("matrix file: missing \"data\" array");

    std::vector<Eigen::Index> dims;
    for (const auto& d : j["dims"]) {
        if (!d.is_number_integer() || d.get<long long>() < 1)
            throw FormatError("matrix file: dims must be positive integers");
        dims.push_back(d.get<Eigen::Index>());
    }
    SubsystemDims sd(std::move(dims));
    const Eigen::Index n = sd.total();
    const auto& data = j["data"];
    if (static_cast<Eigen::Index>(data.size()) != n * n)
        throw FormatError("matrix file: data length " + std::to_string(data.size()) + " is not " +
                          std::to_string(n * n) + " for dims " + sd.str());

    CMatrixXd m(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) {
            const auto& e = data[static_cast<std::size_t>(r * n + c)];
            if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
                throw FormatError("matrix file: entries must be [re, im] number pairs");
            const double re = e[0].get<double>(), im = e[1].get<double>();
            if (!std::isfinite(re) || !std::isfinite(im)) throw FormatError("matrix file: non-finite entry");
            m(r, c) = {re, im};
        }
    return {std::move(m), std::move(sd)};
}

MatrixFile parse_matrix(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("matrix file: invalid JSON: ") + e.what());
    }
    return matrix_from_json(j);
}

MatrixFile read_matrix_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_matrix(ss.str());
}

DensityMatrixd read_density_matrix(const std::filesystem::path& path, double tol) {
    auto file = read_matrix_file(path);
    try {
        return {std::move(file.matrix), std::move(file.dims), tol};
    } catch (const std::invalid_argument& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

nlohmann::json matrix_to_json(const CMatrixXd& m, const SubsystemDims& dims) {
    detail::require_square(m, "matrix_to_json");
    detail::require_match(m.rows(), dims, "matrix_to_json");
    nlohmann::json data = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back({m(r, c).real(), m(r, c).imag()});
    return {{"dims", dims.values()}, {"data", std::move(data)}};
}

std::string format_matrix(const CMatrixXd& m, const SubsystemDims& dims) { return matrix_to_json(m, dims).dump(); }

void write_matrix_file(const std::filesystem::path& path, const CMatrixXd& m, const SubsystemDims& dims) {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot write " + path.string());
    out << format_matrix(m, dims) << '\n';
}

}  // namespace ptdist
