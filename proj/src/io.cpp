#include "magcas/io.hpp"

#include <charconv>

namespace magcas {

namespace {

using nlohmann::json;

constexpr std::string_view kSweepHeader = "N_z,re_Ecas_meV,im_Ecas_meV,re_coeff,im_coeff,b,alpha";

double parse_number(std::string_view field, int line) {
  double value = 0.0;
  const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || end != field.data() + field.size()) {
    throw ParseError("line " + std::to_string(line) + ": '" + std::string(field) + "' is not a number", line, 0);
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line, char separator) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t end = line.find(separator, start);
    out.push_back(line.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
    if (end == std::string_view::npos) return out;
    start = end + 1;
  }
}

// Appends to the run with this alpha, or starts a new one.
SweepSeries& run_for(std::vector<SweepSeries>& runs, const MaterialParams& material, double alpha, double b) {
  for (SweepSeries& run : runs) {
    if (run.alpha == alpha) return run;
  }
  runs.push_back(SweepSeries{material, alpha, b, {}});
  return runs.back();
}

std::vector<SweepSeries> read_csv(std::string_view text, const MaterialParams& material) {
  std::vector<SweepSeries> runs;
  int line_number = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_number == 1) {
      if (line != kSweepHeader) throw ParseError("unexpected sweep header '" + std::string(line) + "'", 1, 1);
      continue;
    }
    if (line.empty()) continue;
    const std::vector<std::string_view> fields = split(line, ',');
    if (fields.size() != 7) {
      throw ParseError("line " + std::to_string(line_number) + ": expected 7 fields", line_number, 1);
    }
    double values[7];
    for (int i = 0; i < 7; ++i) values[i] = parse_number(fields[i], line_number);
    const int n_z = static_cast<int>(values[0]);
    SweepSeries& run = run_for(runs, material, values[6], values[5]);
    run.points.push_back(CasimirPoint{n_z, {values[1], values[2]}, {values[3], values[4]}, values[5]});
  }
  if (runs.empty()) throw ParseError("sweep file has no data rows", line_number, 0);
  return runs;
}

std::vector<SweepSeries> read_json(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid sweep JSON: ") + e.what(), 0, 0);
  }
  try {
    const RunConfig config = parse_config(root.at("config").dump());
    std::vector<SweepSeries> runs;
    for (const json& run : root.at("runs")) {
      SweepSeries series{config.material, run.at("alpha").get<double>(), run.at("b").get<double>(), {}};
      for (const json& p : run.at("points")) {
        series.points.push_back(CasimirPoint{p.at("N_z").get<int>(),
                                             {p.at("re_Ecas_meV").get<double>(), p.at("im_Ecas_meV").get<double>()},
                                             {p.at("re_coeff").get<double>(), p.at("im_coeff").get<double>()},
                                             series.b});
      }
      runs.push_back(std::move(series));
    }
    return runs;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed sweep JSON: ") + e.what(), 0, 0);
  }
}

}  // namespace

std::string format_number(double value) {
  char buffer[64];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ec == std::errc() ? end : buffer);
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepSeries>& runs) {
  out << kSweepHeader << '\n';
  for (const SweepSeries& run : runs) {
    for (const CasimirPoint& p : run.points) {
      out << p.n_z << ',' << format_number(p.e_cas.real()) << ',' << format_number(p.e_cas.imag()) << ','
          << format_number(p.coeff.real()) << ',' << format_number(p.coeff.imag()) << ',' << format_number(p.b)
          << ',' << format_number(run.alpha) << '\n';
    }
  }
}

nlohmann::json sweep_to_json(const RunConfig& config, const std::vector<SweepSeries>& runs) {
  json out;
  out["version"] = std::string(library_version());
  out["config"] = to_json(config);
  // Worker count does not affect the numbers, so identical runs produce identical files.
  out["config"].erase("workers");
  out["runs"] = json::array();
  for (const SweepSeries& run : runs) {
    json points = json::array();
    for (const CasimirPoint& p : run.points) {
      points.push_back({{"N_z", p.n_z},
                        {"re_Ecas_meV", p.e_cas.real()},
                        {"im_Ecas_meV", p.e_cas.imag()},
                        {"re_coeff", p.coeff.real()},
                        {"im_coeff", p.coeff.imag()},
                        {"b", p.b}});
    }
    out["runs"].push_back({{"alpha", run.alpha},
                           {"regime", to_string(classify_regime(run.material, run.alpha).regime)},
                           {"b", run.b},
                           {"points", std::move(points)}});
  }
  return out;
}

std::string_view library_version() { return MAGCAS_VERSION; }

std::vector<SweepSeries> read_sweep(std::string_view text, const MaterialParams& material) {
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return read_json(text);
  return read_csv(text, material);
}

}  // namespace magcas
