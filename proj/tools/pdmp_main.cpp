#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "pdmp/commands.hpp"
#include "pdmp/config.hpp"
#include "pdmp/presets.hpp"

namespace {

std::string joined(const std::vector<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Switching-environment transport: moment solver, Monte Carlo and large-time analysis"};
    app.set_version_flag("--version", std::string(pdmp::kToolVersion));

    std::string command;
    std::string config_path;
    std::string preset;
    std::string out_dir;
    std::uint64_t seed = 0;
    std::size_t paths = 0;
    std::size_t cells = 0;
    bool quiet = false;

    app.add_option("command", command, "one of: " + joined(pdmp::command_names()))->required();
    app.add_option("--config", config_path, "configuration file")->check(CLI::ExistingFile);
    app.add_option("--preset", preset, "named preset: " + joined(pdmp::preset_names()));
    auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides output.directory)");
    auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides mc.master_seed)");
    auto* paths_opt = app.add_option("--paths", paths, "Monte Carlo paths (overrides mc.n_paths)");
    auto* cells_opt = app.add_option("--cells", cells, "grid cells (overrides grid.n_cells)");
    app.add_flag("--quiet", quiet, "suppress progress lines");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : pdmp::kExitConfig;
    }

    try {
        const auto cmd = pdmp::parse_command(command);
        if (!cmd) {
            throw pdmp::Error(pdmp::ErrorCode::ParseError,
                              "unknown command '" + command + "' (expected " + joined(pdmp::command_names()) + ")");
        }
        if (config_path.empty() && preset.empty() && *cmd != pdmp::Command::Verify) {
            throw pdmp::Error(pdmp::ErrorCode::MissingParam, "pass --config or --preset");
        }

        pdmp::RunConfig cfg;
        if (!preset.empty()) cfg = pdmp::preset_config(preset);
        if (!config_path.empty()) {
            const pdmp::RunConfig file = pdmp::parse_config(config_path);
            cfg = preset.empty() ? file : pdmp::merge(cfg, file);
        }
        if (cfg.entries.empty()) cfg = pdmp::preset_config("fig1");

        pdmp::RunConfig overrides;
        if (*out_opt) overrides.set("output.directory", out_dir);
        if (*seed_opt) overrides.set("mc.master_seed", std::to_string(seed));
        if (*paths_opt) overrides.set("mc.n_paths", std::to_string(paths));
        if (*cells_opt) overrides.set("grid.n_cells", std::to_string(cells));
        cfg = pdmp::merge(cfg, overrides);

        const pdmp::RunManifest m = pdmp::run_command(*cmd, cfg, quiet ? nullptr : &std::cerr);
        if (!quiet) {
            for (const auto& [key, value] : m.results) std::cout << key << " = " << value << "\n";
            std::cout << "wrote " << m.files.size() << " files and manifest.json\n";
        }
        return m.exit_code;
    } catch (const pdmp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return pdmp::exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return pdmp::kExitNumerical;
    }
}
