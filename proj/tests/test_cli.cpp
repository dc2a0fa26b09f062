#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "magcas/cli.hpp"
#include "magcas/config.hpp"
#include "magcas/io.hpp"

using namespace magcas;

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int status = run_command(args, out, err);
  return {status, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() /
            ("magcas-test-" + std::to_string(reinterpret_cast<std::uintptr_t>(this)) + "-" +
             std::to_string(std::rand()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }

  std::string write(const std::string& name, const std::string& text) const {
    const auto file = path_ / name;
    std::ofstream(file, std::ios::binary) << text;
    return file.string();
  }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

const char* kSmallSweep = R"({
  "material": {"J": 47.1, "K_e": 0.00172, "K_h": 0.0395, "S": 1.21, "a": 0.417},
  "alpha": 0.05,
  "sweep": {"n_z_min": 1, "n_z_max": 12}
})";

}  // namespace

TEST_CASE("preset") {
  const RunConfig c = parse_config(nio_preset());
  CHECK(c.material.J == 47.1);
  CHECK(c.material.K_h == 0.0395);
  CHECK(c.material.K_e == 0.00172);
  CHECK(c.material.S == 1.21);
  CHECK(c.material.a == 0.417);
  CHECK(c.alphas == std::vector<double>{0.005, 0.04, 0.05});
  CHECK(c.sweep.n_z_min == 1);
  CHECK(c.sweep.n_z_max == 300);

  const auto plan = plan_runs(c);
  REQUIRE(plan.size() == 3);
  CHECK(plan[0].regime == Regime::gap_melting);
  CHECK(plan[1].regime == Regime::oscillating);
  CHECK(plan[2].regime == Regime::beating);
  CHECK(plan[0].b == 3.0);
  CHECK(plan[1].b == 1.5);
  CHECK(plan[2].b == 1.5);
}

TEST_CASE("config errors") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"material": {"K_e": 0.1, "K_h": 0, "S": 1, "a": 1}, "alpha": 0.1})"),
                       doctest::Contains("J"), ValidationError);
  CHECK_THROWS_WITH_AS(parse_config(R"({"material": {"J": 1, "K_e": 0.1, "K_h": 0, "S": 1, "a": 1}})"),
                       doctest::Contains("alpha"), ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"material": {"J": -1, "K_e": 0.1, "K_h": 0, "S": 1, "a": 1}, "alpha": 0.1})"),
                  ValidationError);
  CHECK_THROWS_AS(parse_config(R"({"material": {"J": 1, "K_e": 0.1, "K_h": 0, "S": 1, "a": 1}, "alpha": []})"),
                  ValidationError);

  try {
    parse_config(R"({"material": {"J": 1, "K_e": 0.1, "K_h": 0, "S": 1, "a": 1, "B": 2}, "alpha": 0.1})");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.key() == "material.B");
  }
  try {
    parse_config(R"({"material": {"J": 1, "K_e": 0.1, "K_h": 0, "S": 1, "a": 1}, "alpha": "big"})");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.key() == "alpha");
  }
  try {
    parse_config("{\n  \"alpha\": 0.1,\n  oops\n}");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 3);
  }
}

TEST_CASE("config round trip") {
  RunConfig c = parse_config(kSmallSweep);
  c.sweep.b = 2.0;
  c.workers = 3;
  c.output.format = OutputFormat::json;
  const RunConfig back = parse_config(to_json(c).dump());
  CHECK(back.alphas == c.alphas);
  CHECK(*back.sweep.b == 2.0);
  CHECK(back.workers == 3);
  CHECK(back.output.format == OutputFormat::json);
  CHECK(back.quadrature.tol_rel == c.quadrature.tol_rel);
}

TEST_CASE("number formatting is exact") {
  for (const double v : {0.1, -3.063466690172784, 1e-300, 123456789.0, 0.0}) {
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(0.04) == "0.04");
}

TEST_CASE("regime subcommand") {
  CHECK(run({"regime", "--alpha", "0.04"}).out == "Oscillating, k_cri_+=0.0391, Lambda_+=80.4\n");
  TempDir dir;
  const std::string preset = dir.write("nio.json", std::string(nio_preset()));
  const Run r = run({"regime", "--config", preset, "--alpha", "0.04"});
  CHECK(r.status == kExitOk);
  CHECK(r.out == "Oscillating, k_cri_+=0.0391, Lambda_+=80.4\n");
  CHECK(r.err.empty());

  const std::string all = run({"regime"}).out;
  CHECK(all.find("GapMelting") == 0);
  CHECK(all.find("beat_period=143") != std::string::npos);
}

TEST_CASE("params and dispersion") {
  const Run p = run({"params", "--alpha", "0"});
  CHECK(p.status == kExitOk);
  CHECK(p.out.rfind("alpha,sigma,A_meV,delta_meV,D_meV,C_meV,alpha_cri,gap_meV\n", 0) == 0);
  CHECK(std::count(p.out.begin(), p.out.end(), '\n') == 3);

  const Run d = run({"dispersion", "--alpha", "0.05", "--q-points", "5"});
  CHECK(d.status == kExitOk);
  CHECK(d.out.rfind("sigma,q,re_meV,im_meV,alpha\n", 0) == 0);
  CHECK(std::count(d.out.begin(), d.out.end(), '\n') == 11);
  CHECK(run({"dispersion", "--q-points", "1"}).status == kExitInvalid);
  CHECK(run({"dispersion", "--form", "spline"}).status == kExitInvalid);
}

TEST_CASE("exit codes and diagnostics") {
  CHECK(run({}).status == kExitInvalid);
  CHECK(run({"frobnicate"}).status == kExitInvalid);
  CHECK(run({"--help"}).status == kExitOk);

  const Run seedless = run({"params", "--seedless"});
  CHECK(seedless.status == kExitInvalid);
  CHECK(seedless.out.empty());
  CHECK(seedless.err.find("seedless") != std::string::npos);

  TempDir dir;
  const Run missing = run({"params", "--config", dir.write("bad.json", R"({"material": {"K_e": 1}, "alpha": 0})")});
  CHECK(missing.status == kExitInvalid);
  CHECK(missing.err.find("material.J") != std::string::npos);
  CHECK(run({"params", "--config", dir.write("broken.json", "{")}).status == kExitInvalid);
  CHECK(run({"params", "--config", dir.file("absent.json")}).status == kExitInvalid);
  CHECK(run({"params", "--alpha", "-1"}).status == kExitInvalid);
  CHECK(run({"params", "--workers", "0"}).status == kExitInvalid);

  const std::string strict = dir.write("strict.json", R"({
    "material": {"J": 47.1, "K_e": 0.00172, "K_h": 0.0395, "S": 1.21, "a": 0.417},
    "alpha": 0.05, "sweep": {"n_z_min": 1, "n_z_max": 1},
    "quadrature": {"inplane_points": 16, "kz_points": 16, "tol_rel": 1e-300}})");
  const Run failure = run({"sweep", "--config", strict});
  CHECK(failure.status == kExitQuadrature);
  CHECK(failure.out.empty());
}

TEST_CASE("sweep output") {
  TempDir dir;
  const std::string config = dir.write("small.json", kSmallSweep);

  const Run hermitian = run({"sweep", "--config", config, "--alpha", "0"});
  REQUIRE(hermitian.status == kExitOk);
  std::istringstream lines(hermitian.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "N_z,re_Ecas_meV,im_Ecas_meV,re_coeff,im_coeff,b,alpha");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    const auto first = line.find(',');
    const auto second = line.find(',', first + 1);
    const auto third = line.find(',', second + 1);
    CHECK(line.substr(second + 1, third - second - 1) == "0");
    CHECK(line.find('\r') == std::string::npos);
  }
  CHECK(rows == 12);

  const std::string one = run({"sweep", "--config", config, "--workers", "1"}).out;
  CHECK(run({"sweep", "--config", config, "--workers", "4"}).out == one);
  CHECK(run({"sweep", "--config", config, "--workers", "3", "--format", "json"}).out ==
        run({"sweep", "--config", config, "--format", "json"}).out);

  ::setenv("MAGNON_CASIMIR_WORKERS", "2", 1);
  CHECK(run({"sweep", "--config", config}).out == one);
  ::setenv("MAGNON_CASIMIR_WORKERS", "many", 1);
  const Run ignored = run({"sweep", "--config", config});
  CHECK(ignored.out == one);
  CHECK(ignored.err.find("MAGNON_CASIMIR_WORKERS") != std::string::npos);
  ::unsetenv("MAGNON_CASIMIR_WORKERS");

  const std::string out_path = dir.file("sweep.csv");
  const Run to_file = run({"sweep", "--config", config, "--out", out_path});
  CHECK(to_file.status == kExitOk);
  CHECK(to_file.out.empty());
  CHECK(slurp(out_path) == one);
}

TEST_CASE("sweep files round-trip through analyze") {
  TempDir dir;
  const std::string config = dir.write("small.json", kSmallSweep);
  const std::string csv = dir.file("s.csv");
  const std::string json = dir.file("s.json");
  REQUIRE(run({"sweep", "--config", config, "--out", csv}).status == kExitOk);
  REQUIRE(run({"sweep", "--config", config, "--format", "json", "--out", json}).status == kExitOk);

  // Both files carry the same numbers as an in-process sweep, bit for bit.
  const RunConfig parsed = parse_config(kSmallSweep);
  const auto direct = thickness_sweep(parsed.material, 0.05, 1, 12, 1.5, parsed.quadrature, 1);
  for (const std::string& path : {csv, json}) {
    const auto runs = read_sweep(slurp(path), parsed.material);
    REQUIRE(runs.size() == 1);
    CHECK(runs[0].alpha == 0.05);
    CHECK(runs[0].b == 1.5);
    REQUIRE(runs[0].points.size() == direct.size());
    for (std::size_t i = 0; i < direct.size(); ++i) {
      CHECK(runs[0].points[i].n_z == direct[i].n_z);
      CHECK(runs[0].points[i].e_cas == direct[i].e_cas);
      CHECK(runs[0].points[i].coeff == direct[i].coeff);
    }
  }

  const Run from_csv = run({"analyze", "--in", csv});
  const Run from_json = run({"analyze", "--in", json});
  CHECK(from_csv.status == kExitOk);
  CHECK(from_csv.out == from_json.out);
  CHECK(from_csv.out.find("0.05,predicted_beat_period,") != std::string::npos);
  // Twelve points cannot carry a period; that is reported, not fatal.
  CHECK(from_csv.err.find("InsufficientSpan") != std::string::npos);

  const Run as_json = run({"analyze", "--in", csv, "--format", "json"});
  CHECK(as_json.status == kExitOk);
  CHECK(as_json.out.find("\"quantities\"") != std::string::npos);

  CHECK(run({"analyze", "--in", dir.write("junk.csv", "not,a,sweep\n")}).status == kExitInvalid);
  CHECK(run({"analyze"}).status == kExitInvalid);
}
