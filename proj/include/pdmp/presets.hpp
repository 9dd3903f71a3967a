#pragma once

#include <string>
#include <vector>

#include "pdmp/config.hpp"

namespace pdmp {

/// Canonical preset names: fig1, fig2a, fig2b, fig2c, fig3, hopf-rotating.
std::vector<std::string> preset_names();

/// Accepts canonical names and their model-qualified aliases
/// (e.g. "transcritical-fig1").
bool is_preset(const std::string& name);

/// Full configuration of a preset: model parameters, grid, snapshot times and
/// Monte Carlo settings. Throws UnknownKey for an unknown name.
RunConfig preset_config(const std::string& name);

}  // namespace pdmp
