#ifndef PTDIST_CLI_HPP
#define PTDIST_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace ptdist {

inline constexpr const char* kVersion = "1.0.0";
inline constexpr const char* kOutDirEnv = "PTDIST_OUT_DIR";

enum ExitCode : int { kExitOk = 0, kExitInput = 2, kExitSolver = 3 };

struct RunManifest {
    std::string command;
    std::string flags;  // the full argument list as given
    std::uint64_t seed = 0;
    std::string version = kVersion;
    std::string timestamp;  // UTC, ISO 8601

    [[nodiscard]] std::vector<std::string> lines() const;
};

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ptdist

#endif  // PTDIST_CLI_HPP
