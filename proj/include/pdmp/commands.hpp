#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pdmp/config.hpp"
#include "pdmp/error.hpp"

namespace pdmp {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class Command { SolveFpe, SimulateMc, Stationary, Classify, Correlate, Compare, Verify };

std::string_view to_string(Command c);
std::optional<Command> parse_command(std::string_view name);
std::vector<std::string> command_names();

inline constexpr int kExitConfig = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitVerification = 3;

/// 1 for configuration and I/O errors, 2 for numerical failures.
int exit_code(ErrorCode code);

/// What a command produced. Written to `manifest.json` in the output
/// directory; every listed file exists when the command returns.
struct RunManifest {
    std::string command;
    std::string version{kToolVersion};
    std::uint64_t master_seed = 0;
    std::map<std::string, std::string> config;
    std::vector<std::string> files;
    std::map<std::string, double> timings;
    double shed_mass = 0.0;
    std::vector<std::string> notes;
    /// Headline numbers of the run (lambda, kappa, distances, ...).
    std::map<std::string, std::string> results;
    /// 0, or kExitVerification when a comparison exceeded its tolerance.
    int exit_code = 0;
};

/// Runs `cmd` with `cfg`, writing into `cfg`'s output directory. Progress
/// lines go to `log` when it is non-null. Library errors propagate as Error.
RunManifest run_command(Command cmd, const RunConfig& cfg, std::ostream* log = nullptr);

}  // namespace pdmp
