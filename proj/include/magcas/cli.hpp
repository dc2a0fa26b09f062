#pragma once

// Command-line front end. Subcommands: params, dispersion, regime, sweep, analyze.

#include <ostream>
#include <string>
#include <vector>

namespace magcas {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalid = 1;
inline constexpr int kExitQuadrature = 2;

/// Runs one command. `args` excludes the program name. Data goes to `out` unless
/// an output path is configured; diagnostics go to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace magcas
