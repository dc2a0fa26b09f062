#include "magcas/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "magcas/analysis.hpp"
#include "magcas/casimir.hpp"
#include "magcas/config.hpp"
#include "magcas/io.hpp"

namespace magcas {

namespace {

using nlohmann::json;

struct Options {
  std::string config_path;
  std::optional<double> alpha;
  std::string out_path;
  std::string format;
  std::optional<int> workers;
  bool seedless = false;
  // dispersion
  double q_max = std::numbers::pi;
  int q_points = 201;
  std::string form = "lattice";
  // analyze
  std::string in_path;
};

std::string short_number(double value) {
  char buffer[32];
  const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value, std::chars_format::general, 3);
  return std::string(buffer, ec == std::errc() ? end : buffer);
}

std::optional<int> workers_from_env(std::ostream& err) {
  const char* text = std::getenv("MAGNON_CASIMIR_WORKERS");
  if (!text || !*text) return std::nullopt;
  int value = 0;
  const std::string_view view(text);
  const auto [end, ec] = std::from_chars(view.data(), view.data() + view.size(), value);
  if (ec != std::errc() || end != view.data() + view.size() || value < 1) {
    err << "warning: ignoring MAGNON_CASIMIR_WORKERS='" << view << "' (expected a positive integer)\n";
    return std::nullopt;
  }
  return value;
}

// Config file (or the NiO preset) with command-line overrides applied.
RunConfig resolve_config(const Options& opts, std::ostream& err) {
  RunConfig config = opts.config_path.empty() ? parse_config(nio_preset()) : load_config(opts.config_path);
  if (opts.alpha) config.alphas = {*opts.alpha};
  if (!opts.out_path.empty()) config.output.path = opts.out_path;
  if (!opts.format.empty()) config.output.format = parse_format(opts.format);
  if (opts.workers) {
    config.workers = *opts.workers;
  } else if (const auto env = workers_from_env(err)) {
    config.workers = *env;
  }
  config.validate();
  return config;
}

// Writes `text` to the configured path, or to `out` when there is none.
void emit(const RunConfig& config, const std::string& text, std::ostream& out) {
  if (config.output.path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(config.output.path, std::ios::binary);
  if (!file) throw ValidationError("cannot write output file " + config.output.path);
  file << text;
}

std::string dump(const json& document) { return document.dump(2) + "\n"; }

std::string run_params(const RunConfig& config) {
  std::ostringstream csv;
  json rows = json::array();
  csv << "alpha,sigma,A_meV,delta_meV,D_meV,C_meV,alpha_cri,gap_meV\n";
  for (const double alpha : config.alphas) {
    for (const Mode mode : kModes) {
      const DerivedParams dp = derive_params(config.material, mode, alpha);
      const double alpha_cri = critical_alpha(config.material, mode);
      const double gap = energy_gap(dp, config.material);
      csv << format_number(alpha) << ',' << to_string(mode) << ',' << format_number(dp.A) << ','
          << format_number(dp.delta) << ',' << format_number(dp.D) << ',' << format_number(dp.C) << ','
          << format_number(alpha_cri) << ',' << format_number(gap) << '\n';
      rows.push_back({{"alpha", alpha},
                      {"sigma", to_string(mode)},
                      {"A_meV", dp.A},
                      {"delta_meV", dp.delta},
                      {"D_meV", dp.D},
                      {"C_meV", dp.C},
                      {"alpha_cri", alpha_cri},
                      {"gap_meV", gap}});
    }
  }
  return config.output.format == OutputFormat::csv ? csv.str() : dump(rows);
}

std::string run_dispersion(const RunConfig& config, const Options& opts) {
  if (opts.q_points < 2) throw ValidationError("q-points must be >= 2");
  if (!(opts.q_max > 0.0) || !std::isfinite(opts.q_max)) throw ValidationError("q-max must be > 0");
  if (opts.form != "lattice" && opts.form != "continuum") throw ValidationError("form must be lattice or continuum");
  const Form form = opts.form == "lattice" ? Form::lattice : Form::continuum;

  std::ostringstream csv;
  json rows = json::array();
  csv << "sigma,q,re_meV,im_meV,alpha\n";
  for (const double alpha : config.alphas) {
    for (const Mode mode : kModes) {
      const DerivedParams dp = derive_params(config.material, mode, alpha);
      for (int i = 0; i < opts.q_points; ++i) {
        const double q = opts.q_max * i / (opts.q_points - 1);
        const ComplexEnergy e = dispersion(dp, config.material, ReducedWavevector{q, 0.0, 0.0}, form);
        csv << to_string(mode) << ',' << format_number(q) << ',' << format_number(e.re) << ','
            << format_number(e.im) << ',' << format_number(alpha) << '\n';
        rows.push_back({{"sigma", to_string(mode)}, {"q", q}, {"re_meV", e.re}, {"im_meV", e.im}, {"alpha", alpha}});
      }
    }
  }
  return config.output.format == OutputFormat::csv ? csv.str() : dump(rows);
}

std::string regime_line(const RegimeReport& r) {
  std::string line = to_string(r.regime);
  if (!r.k_cri_plus && !r.k_cri_minus) {
    line += ", alpha_cri_+=" + short_number(r.alpha_cri_plus) + ", alpha_cri_-=" + short_number(r.alpha_cri_minus);
  }
  if (r.k_cri_plus) line += ", k_cri_+=" + short_number(*r.k_cri_plus) + ", Lambda_+=" + short_number(*r.lambda_plus);
  if (r.k_cri_minus) {
    line += ", k_cri_-=" + short_number(*r.k_cri_minus) + ", Lambda_-=" + short_number(*r.lambda_minus);
  }
  if (r.beat_period) line += ", beat_period=" + short_number(*r.beat_period);
  return line;
}

json optional_json(const std::optional<double>& value) {
  if (!value) return nullptr;
  if (!std::isfinite(*value)) return "inf";
  return *value;
}

std::string run_regime(const RunConfig& config) {
  std::string text;
  json rows = json::array();
  for (const double alpha : config.alphas) {
    const RegimeReport r = classify_regime(config.material, alpha);
    text += regime_line(r) + "\n";
    rows.push_back({{"alpha", alpha},
                    {"regime", to_string(r.regime)},
                    {"alpha_cri_plus", r.alpha_cri_plus},
                    {"alpha_cri_minus", r.alpha_cri_minus},
                    {"k_cri_plus", optional_json(r.k_cri_plus)},
                    {"k_cri_minus", optional_json(r.k_cri_minus)},
                    {"lambda_plus", optional_json(r.lambda_plus)},
                    {"lambda_minus", optional_json(r.lambda_minus)},
                    {"beat_period", optional_json(r.beat_period)}});
  }
  return config.output.format == OutputFormat::csv ? text : dump(rows);
}

std::string run_sweep(const RunConfig& config) {
  std::vector<SweepSeries> runs;
  for (const PlannedRun& plan : plan_runs(config)) {
    SweepSeries series{config.material, plan.alpha, plan.b, {}};
    series.points = thickness_sweep(config.material, plan.alpha, config.sweep.n_z_min, config.sweep.n_z_max, plan.b,
                                    config.quadrature, config.workers);
    runs.push_back(std::move(series));
  }
  if (config.output.format == OutputFormat::json) return dump(sweep_to_json(config, runs));
  std::ostringstream csv;
  write_sweep_csv(csv, runs);
  return csv.str();
}

struct Quantity {
  std::string name;
  double value = 0.0;
  double uncertainty = 0.0;
};

// Every analysis that applies to this run; the ones that cannot be done are
// reported on `err` and skipped.
std::vector<Quantity> analyze_run(const SweepSeries& s, std::ostream& err) {
  std::vector<Quantity> out;
  auto attempt = [&](const char* what, auto&& body) {
    try {
      body();
    } catch (const AnalysisError& e) {
      err << "alpha=" << format_number(s.alpha) << ": " << what << " skipped (" << to_string(e.code()) << ": "
          << e.what() << ")\n";
    }
  };
  const RegimeReport report = classify_regime(s.material, s.alpha);
  if (report.lambda_plus) out.push_back({"predicted_period_plus", *report.lambda_plus, 0.0});
  if (report.lambda_minus) out.push_back({"predicted_period_minus", *report.lambda_minus, 0.0});
  if (report.k_cri_plus) {
    attempt("peak-spacing period", [&] {
      const PeriodEstimate p = measure_period(s, SeriesPart::real, PeriodMethod::peak_spacing);
      out.push_back({"period_peak_spacing", p.period, p.uncertainty});
    });
    attempt("dominant-frequency period", [&] {
      const PeriodEstimate p = measure_period(s, SeriesPart::real, PeriodMethod::dominant_frequency);
      out.push_back({"period_dominant_frequency", p.period, p.uncertainty});
    });
    attempt("spectral peaks", [&] {
      int index = 0;
      for (const SpectralPeak& peak : spectral_peaks(s, SeriesPart::real)) {
        out.push_back({"spectral_peak_" + std::to_string(++index), peak.period, peak.uncertainty});
      }
    });
  }
  if (report.beat_period && std::isfinite(*report.beat_period)) {
    out.push_back({"predicted_beat_period", *report.beat_period, 0.0});
    attempt("beat period", [&] {
      const PeriodEstimate p = measure_beat_period(s);
      out.push_back({"beat_period", p.period, p.uncertainty});
    });
  }
  attempt("asymptote", [&] {
    const Asymptote a = estimate_asymptote(s);
    out.push_back({"asymptote_re", a.value.real(), a.max_deviation});
    out.push_back({"asymptote_im", a.value.imag(), a.max_deviation});
  });
  for (const auto& [a, b] : sign_changes(s)) out.push_back({"sign_change", 0.5 * (a + b), 0.5 * (b - a)});
  return out;
}

std::string run_analyze(const RunConfig& config, const Options& opts, std::ostream& err) {
  if (opts.in_path.empty()) throw ValidationError("analyze needs --in PATH (a sweep CSV or JSON file)");
  std::ifstream in(opts.in_path, std::ios::binary);
  if (!in) throw ValidationError("cannot read sweep file " + opts.in_path);
  std::ostringstream text;
  text << in.rdbuf();
  const std::vector<SweepSeries> runs = read_sweep(text.str(), config.material);

  std::ostringstream csv;
  csv << "alpha,quantity,value,uncertainty\n";
  json document = {{"version", std::string(library_version())}, {"runs", json::array()}};
  for (const SweepSeries& run : runs) {
    run.validate();
    json quantities = json::array();
    for (const Quantity& q : analyze_run(run, err)) {
      csv << format_number(run.alpha) << ',' << q.name << ',' << format_number(q.value) << ','
          << format_number(q.uncertainty) << '\n';
      quantities.push_back({{"quantity", q.name}, {"value", q.value}, {"uncertainty", q.uncertainty}});
    }
    document["runs"].push_back({{"alpha", run.alpha},
                                {"regime", to_string(classify_regime(run.material, run.alpha).regime)},
                                {"b", run.b},
                                {"quantities", std::move(quantities)}});
  }
  return config.output.format == OutputFormat::csv ? csv.str() : dump(document);
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opts;
  CLI::App app{"Non-Hermitian magnon dispersion and lattice magnonic Casimir energy", "magcas"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--config", opts.config_path, "Run configuration (JSON); default: built-in NiO preset");
  app.add_option("--alpha", opts.alpha, "Gilbert damping; replaces the configured list");
  app.add_option("--out", opts.out_path, "Output file; default: standard output");
  app.add_option("--format", opts.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--workers", opts.workers, "Sweep worker threads (default: MAGNON_CASIMIR_WORKERS or config)");
  app.add_flag("--seedless", opts.seedless, "Reserved; always rejected (no randomness is used)");

  CLI::App* params = app.add_subcommand("params", "Derived constants and critical dampings");
  CLI::App* disp = app.add_subcommand("dispersion", "Complex dispersion along q_x");
  disp->add_option("--q-max", opts.q_max, "Largest reduced wavenumber (default pi)");
  disp->add_option("--q-points", opts.q_points, "Grid points from 0 to q-max (default 201)");
  disp->add_option("--form", opts.form, "lattice or continuum (default lattice)");
  CLI::App* regime = app.add_subcommand("regime", "Damping regime, EP wavenumbers and periods");
  CLI::App* sweep = app.add_subcommand("sweep", "Casimir energy versus film thickness");
  CLI::App* analyze = app.add_subcommand("analyze", "Periods, asymptote and sign changes of a sweep file");
  analyze->add_option("--in", opts.in_path, "Sweep file written by `sweep`")->required();

  // CLI11 consumes the vector from the back.
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }

  try {
    if (opts.seedless) {
      throw ValidationError("--seedless is reserved and not accepted: every computation is deterministic");
    }
    const RunConfig config = resolve_config(opts, err);
    std::string result;
    if (params->parsed()) {
      result = run_params(config);
    } else if (disp->parsed()) {
      result = run_dispersion(config, opts);
    } else if (regime->parsed()) {
      result = run_regime(config);
    } else if (sweep->parsed()) {
      result = run_sweep(config);
    } else if (analyze->parsed()) {
      result = run_analyze(config, opts, err);
    }
    emit(config, result, out);
    return kExitOk;
  } catch (const QuadratureFailure& e) {
    err << "quadrature failure: " << e.what() << "\n";
    return kExitQuadrature;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const ValidationError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}

}  // namespace magcas
