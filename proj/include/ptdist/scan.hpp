#ifndef PTDIST_SCAN_HPP
#define PTDIST_SCAN_HPP

// Sampling harness comparing the SDP distance to PPT states with the
// negativity on induced-measure random states.
//
// Output is a CSV whose leading '#' lines carry the run manifest and the
// config, followed by a header row, one row per sample (appended and
// flushed as soon as it is in order), and a '# summary:' footer. A JSON
// sidecar repeats config and summary.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ptdist/conic.hpp"

namespace ptdist {

struct ScanDims {
    Eigen::Index da = 2;
    Eigen::Index db = 2;
    bool operator==(const ScanDims&) const = default;
};

enum class ScanMode { Distance, Alternative };

struct ScanConfig {
    std::vector<ScanDims> dims;
    std::uint64_t samples = 100;  // per entry of dims
    std::uint64_t seed = 42;
    double sdp_tol = 1e-6;
    double gap_threshold = 1e-5;
    std::filesystem::path output;  // empty: keep records in memory only
    unsigned parallelism = 0;      // worker threads; 0 picks the hardware concurrency
    Eigen::Index ancilla = 0;      // induced-measure ancilla; 0 means dA * dB
    ScanMode mode = ScanMode::Distance;
    bool resume = false;                   // keep matching rows of an unfinished output file
    std::vector<DensityMatrixd> injected;  // scanned after the random samples
    std::vector<std::string> manifest;     // written verbatim as '#' lines

    void validate() const;
    [[nodiscard]] nlohmann::json to_json() const;
};

struct ScanRecord {
    Eigen::Index da = 0;
    Eigen::Index db = 0;
    std::uint64_t sample_index = 0;
    std::string origin;  // "induced" or "injected"
    double negativity = 0.0;
    double sdp_value = 0.0;
    double gap = 0.0;  // sdp_value - negativity
    double binegativity_min_eig = 0.0;
    bool negative_binegativity = false;
    std::string status;  // SdpStatus name, or "Error"
    long iterations = 0;
    double wall_time_s = 0.0;
    bool flagged = false;  // violation, or counterexample candidate in the alternative form
};

struct ScanSummary {
    std::uint64_t records = 0;
    std::uint64_t optimal = 0;
    std::uint64_t non_optimal = 0;
    std::uint64_t infeasible = 0;
    std::uint64_t negative_binegativity = 0;
    std::uint64_t violations = 0;  // Optimal with gap > threshold
    std::uint64_t flagged = 0;
    double max_gap = 0.0;      // over Optimal records
    double max_abs_gap = 0.0;  // over Optimal records
    double mean_gap = 0.0;     // over Optimal records

    [[nodiscard]] nlohmann::json to_json() const;
    bool operator==(const ScanSummary&) const = default;
};

struct ScanReport {
    ScanConfig config;
    std::vector<ScanRecord> records;
    ScanSummary summary;
    std::optional<std::filesystem::path> summary_path;
    std::optional<std::filesystem::path> violations_path;  // written only when something is flagged
};

inline const std::vector<std::string>& scan_columns() {
    static const std::vector<std::string> cols{
        "da",     "db",         "sample_index", "origin",      "negativity",   "sdp_value", "gap",
        "binegativity_min_eig", "negative_binegativity",       "status",       "iterations", "wall_time_s",
        "flagged"};
    return cols;
}

[[nodiscard]] ScanSummary summarize(const std::vector<ScanRecord>& records, double gap_threshold);

/// Distance SDP on every sample; failures are recorded, never thrown.
[[nodiscard]] ScanReport run_scan(const ScanConfig& cfg);
/// Same sampling with the feasibility form; sdp_value is the distance to
/// the PPT state it returns, and Infeasible records are flagged.
[[nodiscard]] ScanReport run_alt_scan(ScanConfig cfg);

/// Single-sample evaluation used by the scans.
[[nodiscard]] ScanRecord scan_state(const DensityMatrixd& rho, ScanMode mode, const SdpSettings& settings,
                                    double gap_threshold);

[[nodiscard]] std::string format_double(double v);
[[nodiscard]] std::string format_record(const ScanRecord& r);
[[nodiscard]] ScanRecord parse_record(const std::string& line);

struct ScanFile {
    std::vector<std::string> comments;  // '#' lines without the marker
    std::vector<ScanRecord> records;
    std::optional<nlohmann::json> summary;
};

[[nodiscard]] ScanFile read_scan_csv(const std::filesystem::path& path);

}  // namespace ptdist

#endif  // PTDIST_SCAN_HPP
