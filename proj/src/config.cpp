#include "magcas/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

namespace magcas {

namespace {

using nlohmann::json;

[[noreturn]] void fail_at_key(const std::string& key, const std::string& what) {
  throw ParseError(key + ": " + what, 0, 0, key);
}

void reject_unknown(const json& object, const std::string& where, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      fail_at_key(where.empty() ? key : where + "." + key, "unknown key");
    }
  }
}

const json& object_at(const json& parent, const std::string& key, const std::string& path) {
  const json& value = parent.at(key);
  if (!value.is_object()) fail_at_key(path, "expected an object");
  return value;
}

double number_at(const json& value, const std::string& path) {
  if (!value.is_number()) fail_at_key(path, "expected a number");
  return value.get<double>();
}

int integer_at(const json& value, const std::string& path) {
  if (!value.is_number_integer()) fail_at_key(path, "expected an integer");
  const auto wide = value.get<long long>();
  if (wide < std::numeric_limits<int>::min() || wide > std::numeric_limits<int>::max()) {
    throw ValidationError(path + " is out of range");
  }
  return static_cast<int>(wide);
}

MaterialParams material_from(const json& object) {
  reject_unknown(object, "material", {"J", "K_e", "K_h", "S", "a"});
  auto required = [&](const char* key) {
    if (!object.contains(key)) throw ValidationError(std::string("missing required key: material.") + key);
    return number_at(object.at(key), std::string("material.") + key);
  };
  return MaterialParams{required("J"), required("K_e"), required("K_h"), required("S"), required("a")};
}

std::vector<double> alphas_from(const json& value) {
  std::vector<double> out;
  if (value.is_array()) {
    for (std::size_t i = 0; i < value.size(); ++i) out.push_back(number_at(value[i], "alpha[" + std::to_string(i) + "]"));
    if (out.empty()) throw ValidationError("alpha must not be an empty list");
  } else {
    out.push_back(number_at(value, "alpha"));
  }
  return out;
}

std::pair<int, int> line_and_column(std::string_view text, std::size_t byte) {
  int line = 1;
  int column = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  // nlohmann reports the offset one past the offending character.
  return {line, std::max(1, column - 1)};
}

}  // namespace

const char* to_string(OutputFormat format) { return format == OutputFormat::csv ? "csv" : "json"; }

OutputFormat parse_format(std::string_view text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  throw ValidationError("format must be csv or json, got '" + std::string(text) + "'");
}

void RunConfig::validate() const {
  material.validate();
  if (alphas.empty()) throw ValidationError("alpha: at least one value is required");
  for (const double alpha : alphas) {
    if (!std::isfinite(alpha) || alpha < 0.0) throw ValidationError("alpha must be finite and >= 0");
  }
  if (sweep.n_z_min < 1) throw ValidationError("sweep.n_z_min must be >= 1");
  if (sweep.n_z_max < sweep.n_z_min) throw ValidationError("sweep.n_z_max must be >= sweep.n_z_min");
  if (sweep.b && !std::isfinite(*sweep.b)) throw ValidationError("sweep.b must be finite");
  quadrature.validate();
  if (workers < 1) throw ValidationError("workers must be >= 1");
}

RunConfig parse_config(std::string_view document) {
  json root;
  try {
    root = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_and_column(document, e.byte);
    throw ParseError("invalid JSON at line " + std::to_string(line) + ", column " + std::to_string(column), line,
                     column);
  }
  if (!root.is_object()) throw ParseError("configuration must be a JSON object", 1, 1);
  reject_unknown(root, "", {"material", "alpha", "sweep", "quadrature", "output", "workers"});

  RunConfig config;
  if (!root.contains("material")) throw ValidationError("missing required key: material");
  config.material = material_from(object_at(root, "material", "material"));
  if (!root.contains("alpha")) throw ValidationError("missing required key: alpha");
  config.alphas = alphas_from(root.at("alpha"));

  if (root.contains("sweep")) {
    const json& sweep = object_at(root, "sweep", "sweep");
    reject_unknown(sweep, "sweep", {"n_z_min", "n_z_max", "b"});
    if (sweep.contains("n_z_min")) config.sweep.n_z_min = integer_at(sweep.at("n_z_min"), "sweep.n_z_min");
    if (sweep.contains("n_z_max")) config.sweep.n_z_max = integer_at(sweep.at("n_z_max"), "sweep.n_z_max");
    if (sweep.contains("b") && !sweep.at("b").is_null()) config.sweep.b = number_at(sweep.at("b"), "sweep.b");
  }
  if (root.contains("quadrature")) {
    const json& quad = object_at(root, "quadrature", "quadrature");
    reject_unknown(quad, "quadrature", {"inplane_points", "kz_points", "refine_factor", "tol_rel", "check_convergence"});
    QuadratureSpec& q = config.quadrature;
    if (quad.contains("inplane_points")) q.inplane_points = integer_at(quad.at("inplane_points"), "quadrature.inplane_points");
    if (quad.contains("kz_points")) q.kz_points = integer_at(quad.at("kz_points"), "quadrature.kz_points");
    if (quad.contains("refine_factor")) q.refine_factor = integer_at(quad.at("refine_factor"), "quadrature.refine_factor");
    if (quad.contains("tol_rel")) q.tol_rel = number_at(quad.at("tol_rel"), "quadrature.tol_rel");
    if (quad.contains("check_convergence")) {
      if (!quad.at("check_convergence").is_boolean()) fail_at_key("quadrature.check_convergence", "expected a boolean");
      q.check_convergence = quad.at("check_convergence").get<bool>();
    }
  }
  if (root.contains("output")) {
    const json& output = object_at(root, "output", "output");
    reject_unknown(output, "output", {"format", "path"});
    if (output.contains("format")) {
      if (!output.at("format").is_string()) fail_at_key("output.format", "expected a string");
      config.output.format = parse_format(output.at("format").get<std::string>());
    }
    if (output.contains("path")) {
      if (!output.at("path").is_string()) fail_at_key("output.path", "expected a string");
      config.output.path = output.at("path").get<std::string>();
    }
  }
  if (root.contains("workers")) config.workers = integer_at(root.at("workers"), "workers");

  config.validate();
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

nlohmann::json to_json(const RunConfig& config) {
  json out;
  out["material"] = {{"J", config.material.J},
                     {"K_e", config.material.K_e},
                     {"K_h", config.material.K_h},
                     {"S", config.material.S},
                     {"a", config.material.a}};
  out["alpha"] = config.alphas;
  out["sweep"] = {{"n_z_min", config.sweep.n_z_min}, {"n_z_max", config.sweep.n_z_max}};
  out["sweep"]["b"] = config.sweep.b ? json(*config.sweep.b) : json(nullptr);
  out["quadrature"] = {{"inplane_points", config.quadrature.inplane_points},
                       {"kz_points", config.quadrature.kz_points},
                       {"refine_factor", config.quadrature.refine_factor},
                       {"tol_rel", config.quadrature.tol_rel},
                       {"check_convergence", config.quadrature.check_convergence}};
  out["output"] = {{"format", to_string(config.output.format)}, {"path", config.output.path}};
  out["workers"] = config.workers;
  return out;
}

std::vector<PlannedRun> plan_runs(const RunConfig& config) {
  config.validate();
  std::vector<PlannedRun> runs;
  for (const double alpha : config.alphas) {
    const Regime regime = classify_regime(config.material, alpha).regime;
    runs.push_back(PlannedRun{alpha, regime, config.sweep.b.value_or(default_exponent(config.material, alpha))});
  }
  return runs;
}

}  // namespace magcas
