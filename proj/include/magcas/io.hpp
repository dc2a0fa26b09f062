#pragma once

// Machine-readable output and the sweep-file reader used by `analyze`.

#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "magcas/analysis.hpp"
#include "magcas/config.hpp"

namespace magcas {

/// Shortest round-trip rendering, locale-independent.
std::string format_number(double value);

/// Header: N_z,re_Ecas_meV,im_Ecas_meV,re_coeff,im_coeff,b,alpha. LF line ends.
void write_sweep_csv(std::ostream& out, const std::vector<SweepSeries>& runs);

/// Sweep results with the configuration echo and library version.
nlohmann::json sweep_to_json(const RunConfig& config, const std::vector<SweepSeries>& runs);

/// Reads either writer's output back. CSV carries no material, so `material` is
/// used for it; JSON supplies its own. Rows are grouped into runs by alpha.
std::vector<SweepSeries> read_sweep(std::string_view text, const MaterialParams& material);

/// Library version baked in at build time.
std::string_view library_version();

}  // namespace magcas
