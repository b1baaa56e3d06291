#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "ahcount/aggregation.hpp"
#include "ahcount/errors.hpp"
#include "ahcount/harness.hpp"
#include "ahcount/oracle.hpp"
#include "ahcount/prufer.hpp"

namespace ahc {

namespace {

struct SpecArgs {
  std::string family = "power-law";
  double c = 1.0;
  double delta = 1.0;
  int N = 1;
  double a = 0.0;
  double eps = 1.0;
  std::optional<double> rho0;

  void attach(CLI::App* app) {
    app->add_option("--family", family, "power-law | critical | iterated-log")
        ->check(CLI::IsMember({"power-law", "critical", "iterated-log"}));
    app->add_option("--c", c, "coupling c (cN for iterated-log)");
    app->add_option("--delta", delta, "power-law exponent delta");
    app->add_option("--N", N, "iterated-log depth");
    app->add_option("--a", a, "perturbation amplitude");
    app->add_option("--eps", eps, "perturbation log exponent");
    app->add_option("--rho0", rho0, "base point (default: automatic)");
  }
  PotentialSpec spec() const { return make_spec(family, c, delta, N, a, eps, rho0); }
};

struct BoundaryArgs {
  std::string kind = "sphere";
  int n = 1;
  std::vector<double> lengths;

  void attach(CLI::App* app) {
    app->add_option("--boundary", kind, "sphere | torus")->check(CLI::IsMember({"sphere", "torus"}));
    app->add_option("--n", n, "boundary dimension")->check(CLI::PositiveNumber);
    app->add_option("--lengths", lengths, "torus side lengths");
  }
  BoundarySpectrum spectrum() const {
    ExperimentConfig cfg;
    cfg.boundary = kind;
    cfg.n = n;
    cfg.lengths = lengths;
    return cfg.boundary_spectrum();
  }
};

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Eigenvalue counting for radial Schrodinger operators on asymptotically hyperbolic ends"};
  app.require_subcommand(1);
  app.fallthrough();
  int workers = 0;
  app.add_option("--workers", workers, "worker threads (default: AHCOUNT_WORKERS or all cores)");

  // count
  auto* count = app.add_subcommand("count", "count eigenvalues below -E for one E");
  SpecArgs count_spec;
  BoundaryArgs count_boundary;
  double count_E = 0.0;
  std::string count_bc = "dirichlet";
  std::string count_csv;
  count_spec.attach(count);
  count_boundary.attach(count);
  count->add_option("--E", count_E, "spectral offset E > 0")->required();
  count->add_option("--bc", count_bc, "dirichlet | neumann | both");
  count->add_option("--csv", count_csv, "also write the row(s) as CSV");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run a configured E sweep");
  std::string sweep_config;
  std::string sweep_csv, sweep_svg;
  sweep->add_option("config", sweep_config, "configuration file")->required();
  sweep->add_option("--csv", sweep_csv, "override the CSV output path");
  sweep->add_option("--svg", sweep_svg, "override the SVG output path");

  // oracle-check
  auto* oracle = app.add_subcommand("oracle-check", "randomized comparison against finite-difference inertia");
  std::size_t oracle_instances = 200;
  std::uint64_t oracle_seed = 7;
  double oracle_h = 0.005;
  bool oracle_verbose = false;
  oracle->add_option("--instances", oracle_instances, "number of instances")->check(CLI::PositiveNumber);
  oracle->add_option("--seed", oracle_seed, "random seed");
  oracle->add_option("--step", oracle_h, "finite-difference step");
  oracle->add_flag("--verbose", oracle_verbose, "print every instance");

  // bracketing
  auto* brk = app.add_subcommand("bracketing", "discrete Dirichlet-Neumann bracketing at a split point");
  SpecArgs brk_spec;
  double brk_zeta = 0.0, brk_E = 0.05, brk_L = 0.0, brk_h = 0.01, brk_split = 0.5;
  std::string brk_bc = "dirichlet";
  brk_spec.attach(brk);
  brk->add_option("--zeta", brk_zeta, "mode parameter");
  brk->add_option("--E", brk_E, "spectral offset");
  brk->add_option("--L", brk_L, "domain end (default: past the certified truncation point)");
  brk->add_option("--step", brk_h, "grid step");
  brk->add_option("--split", brk_split, "split position as a fraction of the grid")->check(CLI::Range(0.0, 1.0));
  brk->add_option("--bc", brk_bc, "condition at rho0");

  // breakpoints
  auto* bp = app.add_subcommand("breakpoints", "dump the step function zeta -> Z(zeta)");
  SpecArgs bp_spec;
  double bp_E = 0.0;
  std::string bp_bc = "dirichlet";
  bp_spec.attach(bp);
  bp->add_option("--E", bp_E, "spectral offset E > 0")->required();
  bp->add_option("--bc", bp_bc, "dirichlet | neumann");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*count) {
      if (!(count_E > 0.0)) throw ConfigError("--E must be > 0");
      const PotentialSpec spec = count_spec.spec();
      const BoundarySpectrum boundary = count_boundary.spectrum();
      std::vector<SweepRow> rows;
      for (BoundaryCondition bc : parse_bc_list(count_bc)) {
        const CountResult r = assemble_count(spec, boundary, count_E, bc);
        std::cout << "bc=" << to_string(bc) << " N_E=" << r.N_E.to_string();
        if (!r.N_E.is_exact() && !r.N_E.is_zero()) std::cout << " (+-" << r.N_E.log10_error() << " in log10)";
        std::cout << " Z0=" << r.Z0 << " breakpoints=" << r.breakpoints.size() << " probes=" << r.probes
                  << " log10_mu_upper=" << fmt(r.cutoff.log10_mu_upper()) << '\n';
        for (const auto& f : r.flags) std::cerr << "flag: " << f << '\n';
        SweepRow row;
        row.family = count_spec.family;
        row.c = count_spec.c;
        row.delta = spec.family() == Family::PowerLaw ? count_spec.delta : 0.0;
        row.N = spec.log_depth();
        row.cN = spec.family() == Family::IteratedLog ? count_spec.c : 0.0;
        row.a = count_spec.a;
        row.eps = count_spec.a != 0.0 ? count_spec.eps : 0.0;
        row.rho0 = spec.rho0();
        row.boundary = count_boundary.kind;
        row.n = count_boundary.n;
        row.bc = bc;
        row.E = count_E;
        row.log10_NE = r.N_E.log10();
        row.Z0 = r.Z0;
        row.breakpoints = static_cast<long>(r.breakpoints.size());
        row.log10_mu_upper = r.cutoff.log10_mu_upper();
        row.probes = r.probes;
        row.flags = r.flags;
        rows.push_back(row);
      }
      if (!count_csv.empty()) {
        std::ofstream out(count_csv, std::ios::binary);
        if (!out) throw ConfigError("cannot write '" + count_csv + "'");
        write_csv(out, rows);
      }
      return 0;
    }
    if (*sweep) {
      ExperimentConfig cfg = load_config(sweep_config);
      if (workers > 0) cfg.workers = workers;
      if (!sweep_csv.empty()) cfg.csv_path = sweep_csv;
      if (!sweep_svg.empty()) cfg.svg_path = sweep_svg;
      const std::vector<SweepRow> rows = run_sweep(cfg);
      if (cfg.csv_path.empty()) write_csv(std::cout, rows);
      try {
        for (BoundaryCondition bc : cfg.bcs) {
          std::vector<SweepRow> sub;
          for (const auto& r : rows) {
            if (r.bc == bc) sub.push_back(r);
          }
          const SlopeFit fit = fit_iterated_log_slope(sub, cfg.fit_level);
          std::cerr << "fit level " << cfg.fit_level << " bc=" << to_string(bc) << ": slope " << fmt(fit.slope)
                    << " +- " << fmt(fit.stderr_slope) << " (" << fit.used << " rows, " << fit.dropped
                    << " dropped)\n";
        }
      } catch (const InsufficientData& e) {
        std::cerr << "fit skipped: " << e.what() << '\n';
      }
      bool failed = false;
      for (const auto& r : rows) failed = failed || std::isnan(r.log10_NE);
      return failed ? 2 : 0;
    }
    if (*oracle) {
      const auto instances = random_oracle_instances(oracle_instances, oracle_seed);
      long compared = 0, matched = 0, skipped = 0;
      for (const auto& inst : instances) {
        const OracleComparison cmp = compare_with_oracle(inst, oracle_h);
        if (cmp.ambiguous) {
          ++skipped;
        } else {
          ++compared;
          if (cmp.match) ++matched;
        }
        if (oracle_verbose || (!cmp.ambiguous && !cmp.match)) {
          std::cout << (cmp.ambiguous ? "SKIP " : cmp.match ? "OK   " : "FAIL ") << inst.label << " Z=" << cmp.Z
                    << " oracle=" << cmp.oracle << " L=" << fmt(cmp.L) << '\n';
        }
      }
      std::cout << "oracle-check: " << matched << "/" << compared << " matched, " << skipped << " ambiguous skipped\n";
      return matched == compared ? 0 : 2;
    }
    if (*brk) {
      const PotentialSpec spec = brk_spec.spec();
      double L = brk_L;
      if (!(L > 0.0)) L = truncation_interval(spec, brk_zeta, brk_E).rho_stop + 10.0;
      const TridiagonalOperator T = fd_tridiagonal(spec, brk_zeta, L, brk_h, parse_bc(brk_bc));
      auto split = static_cast<std::size_t>(brk_split * static_cast<double>(T.size()));
      split = std::clamp<std::size_t>(split, 2, T.size() - 1);
      const BracketingResult r = bracketing_demo(T, split, -brk_E);
      std::cout << "split=" << split << " of " << T.size() << " lower_sum(dirichlet)=" << r.lower_sum
                << " full=" << r.full_count << " upper_sum(neumann)=" << r.upper_sum
                << " holds=" << (r.holds ? "yes" : "no") << '\n';
      return r.holds ? 0 : 2;
    }
    if (*bp) {
      if (!(bp_E > 0.0)) throw ConfigError("--E must be > 0");
      const BreakpointSearch s = zeta_breakpoints(bp_spec.spec(), bp_E, parse_bc(bp_bc));
      std::cout << "Z(0)=" << s.Z0 << " probes=" << s.probes << " log10_mu_upper=" << fmt(s.cutoff.log10_mu_upper())
                << '\n';
      for (auto it = s.breakpoints.begin(); it != s.breakpoints.end(); ++it) {
        std::cout << "level " << it->level << ": Z>=" << it->level << " for zeta < exp(" << fmt(it->log_zeta) << ")";
        if (it->log_zeta < 700.0) std::cout << " = " << fmt(it->zeta());
        std::cout << '\n';
      }
      for (const auto& f : s.flags) std::cerr << "flag: " << f << '\n';
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "computation failed: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace ahc
