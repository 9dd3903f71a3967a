#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pdmp/fpe.hpp"
#include "pdmp/grid.hpp"
#include "pdmp/model.hpp"
#include "pdmp/transport.hpp"

namespace pdmp {

/// Raw value of one key and the line it was read from (0 when it came from a
/// preset or a command-line override).
struct ConfigEntry {
    std::string value;
    int line = 0;
};

/// A configuration document: `section.key = value` assignments, one per line,
/// `#` starting a comment. Every key is checked against the schema and every
/// value against its type when the document is parsed.
struct RunConfig {
    std::map<std::string, ConfigEntry> entries;
    std::string origin;
    /// Remarks attached by presets (e.g. known inconsistencies).
    std::vector<std::string> notes;

    bool has(const std::string& key) const { return entries.count(key) != 0; }
    /// Validates `key` and `value` like a parsed line, then stores them.
    void set(const std::string& key, const std::string& value, int line = 0);
};

RunConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");
RunConfig parse_config(const std::string& path);

/// Entries of `overrides` replace those of `base`.
RunConfig merge(RunConfig base, const RunConfig& overrides);

/// The typed settings a command runs with.
struct ResolvedRun {
    ModelSpec spec;
    std::string model_name;
    Grid1D grid;
    std::size_t cells_2d = 64;
    std::size_t theta_cells = 128;
    SolverConfig solver;

    std::size_t n_paths = 10000;
    std::uint64_t master_seed = 1;
    MCOptions mc;
    std::vector<double> mc_times;

    double compare_tolerance = 0.05;
    double window_lo = 0.1;
    double window_hi = 0.9;
    std::optional<double> x0;

    std::string out_dir = "out";
    bool write_csv = true;
    bool write_gnuplot = true;
};

/// Builds the model and fills defaults. Throws ConstraintViolation or
/// MissingParam naming the offending key.
ResolvedRun resolve(const RunConfig& cfg);

/// Every resolved setting as `key = value` text, defaults included.
std::map<std::string, std::string> echo(const RunConfig& cfg, const ResolvedRun& run);

}  // namespace pdmp
