#pragma once

// Run configuration: JSON ingestion, validation and the per-alpha run plan.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "magcas/casimir.hpp"
#include "magcas/core.hpp"

namespace magcas {

/// Malformed JSON, a value of the wrong type, or an unknown key.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int column, std::string key = {})
      : std::runtime_error(what), line_(line), column_(column), key_(std::move(key)) {}

  int line() const { return line_; }      ///< 1-based; 0 when not tied to a position
  int column() const { return column_; }  ///< 1-based; 0 when not tied to a position
  const std::string& key() const { return key_; }

 private:
  int line_;
  int column_;
  std::string key_;
};

enum class OutputFormat { csv, json };

const char* to_string(OutputFormat format);
OutputFormat parse_format(std::string_view text);

struct SweepRange {
  int n_z_min = 1;
  int n_z_max = 300;
  std::optional<double> b;  ///< default: 3 in regime (i), 1.5 otherwise
};

struct OutputSpec {
  OutputFormat format = OutputFormat::csv;
  std::string path;  ///< empty: standard output
};

struct RunConfig {
  MaterialParams material = nio();
  std::vector<double> alphas;
  SweepRange sweep;
  QuadratureSpec quadrature;
  OutputSpec output;
  int workers = 1;

  void validate() const;
};

/// Parses and validates a JSON document. `material` (all five constants) and
/// `alpha` (number or non-empty array) are required; everything else defaults.
RunConfig parse_config(std::string_view document);
RunConfig load_config(const std::filesystem::path& path);

/// The configuration as JSON, in the schema parse_config accepts.
nlohmann::json to_json(const RunConfig& config);

struct PlannedRun {
  double alpha = 0.0;
  Regime regime = Regime::gap_melting;
  double b = 0.0;
};

/// One run per alpha, in the given order, with the exponent resolved.
std::vector<PlannedRun> plan_runs(const RunConfig& config);

/// Built-in copy of presets/nio.json.
std::string_view nio_preset();

}  // namespace magcas
