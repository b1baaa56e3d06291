#include <doctest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "ahcount/errors.hpp"
#include "ahcount/harness.hpp"

using namespace ahc;
namespace fs = std::filesystem;

namespace {
ExperimentConfig config_from(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string csv_of(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  write_csv(os, rows);
  return os.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ahcount-tests";
  fs::create_directories(dir);
  return dir / name;
}

SweepRow synthetic(double E, double log10N) {
  SweepRow r;
  r.family = "power-law";
  r.E = E;
  r.log10_NE = log10N;
  return r;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(AHCOUNT_CLI_PATH) + " " + args + " > " + scratch("cli.out").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST_CASE("config parsing") {
  const auto cfg = config_from(R"(
# comment
[potential]
family = critical
c = 2.5
rho0 = 1.5

[boundary]
kind = sphere
n = 2

[sweep]
bc = both
E_max = 0.1
E_min = 0.001
E_count = 3

[output]
workers = 2
fit_level = 1
)");
  CHECK(cfg.family == "critical");
  CHECK(cfg.c == 2.5);
  REQUIRE(cfg.rho0.has_value());
  CHECK(*cfg.rho0 == 1.5);
  CHECK(cfg.n == 2);
  CHECK(cfg.bcs.size() == 2);
  CHECK(cfg.workers == 2);
  const auto grid = cfg.E_grid();
  REQUIRE(grid.size() == 3);
  CHECK(grid[0] == doctest::Approx(0.1));
  CHECK(grid[1] == doctest::Approx(0.01));
  CHECK(grid[2] == doctest::Approx(0.001));
  CHECK(cfg.spec().family() == Family::Critical);
  CHECK(cfg.spec().rho0() == 1.5);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(config_from("[potential]\nfamly = critical\n"), ConfigError);
  CHECK_THROWS_AS(config_from("[potentials]\nfamily = critical\n"), ConfigError);
  CHECK_THROWS_AS(config_from("family = critical\n"), ConfigError);
  CHECK_THROWS_AS(config_from("[potential]\nc = abc\n"), ConfigError);
  CHECK_THROWS_AS(config_from("[potential]\nfamily = cubic\n"), ConfigError);
  CHECK_THROWS_AS(config_from("[sweep]\nE_max = 0.01\nE_min = 0.1\nE_count = 4\n"), ConfigError);
  CHECK_THROWS_AS(config_from("[sweep]\nE_min = -1\n"), ConfigError);
  CHECK_THROWS_AS(config_from("[sweep]\nbc = robin\n"), ConfigError);
  CHECK_THROWS_AS(load_config(scratch("missing.ini").string()), ConfigError);
}

TEST_CASE("worker resolution") {
  CHECK(resolve_workers(3) == 3);
  CHECK(resolve_workers(0) >= 1);
}

TEST_CASE("CSV round trip") {
  std::vector<SweepRow> rows;
  SweepRow a = synthetic(0.1, 2.5);
  a.c = 1.0 / 3.0;
  a.delta = 0.7;
  a.rho0 = std::exp(1.0);
  a.boundary = "torus";
  a.n = 2;
  a.bc = BoundaryCondition::Neumann;
  a.Z0 = 12;
  a.breakpoints = 12;
  a.log10_mu_upper = 123.456789012345678;
  a.probes = 77;
  a.flags = {"zeta level near breakpoint, resolved", "error: quoted \"x\"\nline | pipe"};
  rows.push_back(a);
  SweepRow b = synthetic(0.05, -INFINITY);
  b.family = "iterated-log";
  b.N = 2;
  b.cN = 0.9;
  rows.push_back(b);
  rows.push_back(synthetic(0.01, NAN));
  const std::string text = csv_of(rows);
  std::istringstream in(text);
  const auto back = read_csv(in);
  REQUIRE(back.size() == rows.size());
  CHECK(back[1] == rows[1]);
  CHECK(back[0].flags.size() == 2);
  CHECK(back[0].log10_mu_upper == a.log10_mu_upper);
  CHECK(back[0].rho0 == a.rho0);
  CHECK(std::isnan(back[2].log10_NE));
  CHECK(csv_of(back) == text);
  CHECK(text.rfind(csv_header(), 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
}

TEST_CASE("CSV rejects foreign schemas") {
  std::istringstream in("schema,x\n");
  CHECK_THROWS_AS(read_csv(in), ConfigError);
}

TEST_CASE("sweep rows") {
  ExperimentConfig cfg;
  cfg.family = "power-law";
  cfg.c = 1.0;
  cfg.delta = 1.0;
  cfg.E_max = 0.2;
  cfg.E_min = 0.05;
  cfg.E_count = 3;
  cfg.workers = 2;
  const auto rows = run_sweep(cfg);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].E == doctest::Approx(0.2));
  CHECK(rows[1].E == doctest::Approx(0.1));
  CHECK(std::isinf(rows[0].log10_NE));
  CHECK(std::isinf(rows[1].log10_NE));
  CHECK(rows[2].log10_NE == doctest::Approx(std::log10(791.0)));
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].log10_NE >= rows[i - 1].log10_NE);
  for (const auto& r : rows) CHECK(r.ms == 0);
}

TEST_CASE("sweeps with no attraction and with a finite spectrum") {
  ExperimentConfig cfg;
  cfg.family = "critical";
  cfg.c = 0.0;
  cfg.E_count = 4;
  cfg.bcs = {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann};
  for (const auto& r : run_sweep(cfg)) CHECK(std::isinf(r.log10_NE));
  cfg.family = "power-law";
  cfg.c = 1.0;
  cfg.delta = -1.0;
  const auto rows = run_sweep(cfg);
  for (const auto& r : rows) CHECK(std::isinf(r.log10_NE));
  CHECK(eventually_constant(rows));
}

TEST_CASE("sweep output is identical for any worker count") {
  ExperimentConfig cfg;
  cfg.family = "power-law";
  cfg.delta = 1.0;
  cfg.E_max = 0.2;
  cfg.E_min = 0.04;
  cfg.E_count = 6;
  cfg.bcs = {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann};
  std::string first;
  for (int w : {1, 3, 8}) {
    cfg.workers = w;
    cfg.csv_path = scratch("det-" + std::to_string(w) + ".csv").string();
    run_sweep(cfg);
    const std::string text = slurp(cfg.csv_path);
    if (first.empty()) first = text;
    CHECK(text == first);
  }
}

TEST_CASE("slope fits") {
  std::vector<SweepRow> rows;
  for (double E : {0.2, 0.1, 0.05, 0.02, 0.01}) rows.push_back(synthetic(E, std::exp(std::log(1 / E) + 0.3) / std::log(10.0)));
  const auto fit = fit_iterated_log_slope(rows, 2);
  CHECK(fit.slope == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(fit.stderr_slope < 1e-10);
  CHECK(fit.used == 5);

  std::mt19937_64 rng(9);
  std::normal_distribution<double> noise(0.0, 0.02);
  std::vector<SweepRow> noisy;
  for (int i = 0; i < 12; ++i) {
    const double E = 0.2 * std::pow(0.6, i);
    noisy.push_back(synthetic(E, std::exp(0.5 * std::log(1 / E) + 1.0 + noise(rng)) / std::log(10.0)));
  }
  const auto nf = fit_iterated_log_slope(noisy, 2);
  CHECK(std::abs(nf.slope - 0.5) <= 3 * nf.stderr_slope);

  rows.push_back(synthetic(0.005, -INFINITY));
  rows.push_back(synthetic(0.004, NAN));
  rows.push_back(synthetic(0.003, 0.0));  // N = 1: log log undefined
  const auto dropped = fit_iterated_log_slope(rows, 2);
  CHECK(dropped.dropped == 3);
  CHECK(dropped.used == 5);
  std::vector<SweepRow> few(rows.begin(), rows.begin() + 3);
  CHECK_THROWS_AS(fit_iterated_log_slope(few, 2), InsufficientData);
}

TEST_CASE("SVG output") {
  std::vector<SweepRow> rows{synthetic(0.2, 3.0), synthetic(0.1, 5.0), synthetic(0.05, 9.0)};
  const fs::path p = scratch("plot.svg");
  render_svg(rows, p.string());
  const std::string doc = slurp(p);
  std::size_t circles = 0;
  for (std::size_t at = doc.find("<circle class=\"data\""); at != std::string::npos;
       at = doc.find("<circle class=\"data\"", at + 1))
    ++circles;
  CHECK(circles == 3);
  CHECK(doc.find("class=\"xlabel\"") != std::string::npos);
  CHECK(doc.find("class=\"ylabel\"") != std::string::npos);
  CHECK(doc.find("log_(2) N_E") != std::string::npos);
  boost::property_tree::ptree tree;
  std::istringstream in(doc);
  CHECK_NOTHROW(boost::property_tree::read_xml(in, tree));
  CHECK_THROWS(render_svg({}, scratch("empty.svg").string()));
}

TEST_CASE("random oracle instances are reproducible") {
  const auto a = random_oracle_instances(30, 4);
  const auto b = random_oracle_instances(30, 4);
  REQUIRE(a.size() == 30);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].label == b[i].label);
  long matched = 0;
  for (const auto& inst : a) {
    const auto cmp = compare_with_oracle(inst);
    if (!cmp.ambiguous && !cmp.oracle_ambiguous) matched += cmp.match;
    if (!cmp.ambiguous && !cmp.oracle_ambiguous) CHECK(cmp.Z == cmp.oracle);
  }
  CHECK(matched >= 25);
}

TEST_CASE("command line") {
  CHECK(run_cli("count --family power-law --c 1 --delta 1 --n 1 --E 0.2 --bc dirichlet") == 0);
  CHECK(slurp(scratch("cli.out")).find("N_E=0") != std::string::npos);
  const fs::path csv = scratch("count.csv");
  CHECK(run_cli("count --family power-law --c 1 --delta 1 --E 0.05 --bc both --csv " + csv.string()) == 0);
  std::ifstream in(csv);
  const auto rows = read_csv(in);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].log10_NE == doctest::Approx(std::log10(791.0)));
  CHECK(run_cli("sweep " + scratch("missing.ini").string()) == 1);
  CHECK(run_cli("count --family cubic --E 0.1") == 1);
  CHECK(run_cli("count --E -1") == 1);
  CHECK(run_cli("") == 1);
  CHECK(run_cli("oracle-check --instances 20 --seed 7") == 0);
  CHECK(run_cli("bracketing --family critical --c 1 --E 0.05") == 0);
  CHECK(run_cli("breakpoints --family power-law --c 1 --delta 1 --E 0.1 --bc neumann") == 0);
  CHECK(slurp(scratch("cli.out")).find("Z(0)=") != std::string::npos);

  const fs::path ini = scratch("sweep.ini");
  {
    std::ofstream out(ini);
    out << "[potential]\nfamily = power-law\nc = 1\ndelta = 1\n[sweep]\nE_max = 0.2\nE_min = 0.05\nE_count = 3\n"
        << "[output]\ncsv = " << scratch("sweep.csv").string() << "\nsvg = " << scratch("sweep.svg").string() << "\n";
  }
  CHECK(run_cli("--workers 2 sweep " + ini.string()) == 0);
  CHECK(fs::exists(scratch("sweep.csv")));
}
