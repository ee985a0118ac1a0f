#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "rpid/rolling.hpp"

namespace rpid {

/// Parse the flat `key = value` scenario format. `#` starts a comment;
/// vectors are comma-separated. Unknown keys and missing required keys are
/// rejected by name, parse errors carry the line number. Defaults:
/// criterion=ise, x0=1,1, bounds=[0,10]^3, s_max=20, term_k_tol=1e-6,
/// term_e_tol=1e-4, optimizer settings as in OptSettings.
Scenario parse_scenario_text(std::string_view text, std::string_view origin);

/// Read and parse a scenario file; the scenario name is the file stem.
Scenario parse_scenario(const std::filesystem::path& path);

}  // namespace rpid
