#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ahcount/aggregation.hpp"
#include "ahcount/boundary_spectrum.hpp"
#include "ahcount/potential.hpp"

namespace ahc {

/// Sweep configuration. File format: INI-style sections with key = value
/// lines; unknown sections or keys are errors.
///
///   [potential] family (power-law|critical|iterated-log), c, delta, N, a, eps, rho0
///   [boundary]  kind (sphere|torus), n, lengths (comma separated, torus)
///   [sweep]     bc (dirichlet|neumann|both), E_max, E_min, E_count, precision (auto|exact|log)
///   [output]    csv, svg, workers, timing (true|false), fit_level
struct ExperimentConfig {
  std::string family = "power-law";
  double c = 1.0;
  double delta = 1.0;
  int N = 1;
  double a = 0.0;
  double eps = 1.0;
  std::optional<double> rho0;

  std::string boundary = "sphere";
  int n = 1;
  std::vector<double> lengths;

  std::vector<BoundaryCondition> bcs{BoundaryCondition::Dirichlet};
  double E_max = 0.2;
  double E_min = 0.03;
  int E_count = 6;
  std::string precision = "auto";

  std::string csv_path;
  std::string svg_path;
  int workers = 0;  // 0: AHCOUNT_WORKERS or hardware concurrency
  bool timing = false;
  int fit_level = 2;

  PotentialSpec spec() const;
  BoundarySpectrum boundary_spectrum() const;
  /// Geometric grid from E_max down to E_min (strictly decreasing).
  std::vector<double> E_grid() const;
  /// Throws ConfigError on invalid values.
  void validate() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

PotentialSpec make_spec(const std::string& family, double c, double delta, int N, double a, double eps,
                        std::optional<double> rho0);
BoundaryCondition parse_bc(const std::string& s);
std::vector<BoundaryCondition> parse_bc_list(const std::string& s);

/// Worker count: explicit value if positive, else AHCOUNT_WORKERS, else
/// hardware concurrency (at least 1).
int resolve_workers(int requested);

struct SweepRow {
  std::string family;
  double c = 0.0;
  double delta = 0.0;
  int N = 0;
  double cN = 0.0;
  double a = 0.0;
  double eps = 0.0;
  double rho0 = 0.0;
  std::string boundary;
  int n = 0;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  double E = 0.0;
  double log10_NE = 0.0;  // -inf for N_E = 0, NaN when the row failed
  long Z0 = 0;
  long breakpoints = 0;
  double log10_mu_upper = 0.0;
  long probes = 0;
  long ms = 0;
  std::vector<std::string> flags;

  bool operator==(const SweepRow&) const = default;
};

inline constexpr const char* kCsvSchema = "ahcount-sweep-1";
std::string csv_header();
std::string to_csv_line(const SweepRow& row);
SweepRow parse_csv_line(const std::string& line);
void write_csv(std::ostream& out, const std::vector<SweepRow>& rows);
std::vector<SweepRow> read_csv(std::istream& in);

/// Rows in decreasing E; within one E, bcs in configuration order.
/// Deterministic for any worker count (ms stays 0 unless timing is on).
/// Writes the CSV/SVG files named in the configuration.
std::vector<SweepRow> run_sweep(const ExperimentConfig& config);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  int used = 0;
  int dropped = 0;
};

/// Least squares of log_(level) N_E against log_(level-1)(1/E). Rows where
/// either side is undefined are dropped and counted. Needs >= 4 valid rows
/// (throws InsufficientData otherwise).
SlopeFit fit_iterated_log_slope(const std::vector<SweepRow>& rows, int level);

/// (x, y) = (log_(level-1)(1/E), log_(level) N_E) when both are defined.
std::optional<std::pair<double, double>> fit_point(const SweepRow& row, int level);

/// Standalone SVG of the fitted level against log(1/E) with the regression
/// line; one circle per plotted row. Throws on fewer than 2 rows.
void render_svg(const std::vector<SweepRow>& rows, const std::string& path, int level = 2);
std::string svg_document(const std::vector<SweepRow>& rows, int level = 2);

/// True when, per boundary condition, log10 N_E is identical over the
/// smallest-E half of the rows.
bool eventually_constant(const std::vector<SweepRow>& rows);

/// One randomized oracle-equivalence instance.
struct OracleInstance {
  PotentialSpec spec;
  double zeta = 0.0;
  double E = 0.0;
  BoundaryCondition bc = BoundaryCondition::Dirichlet;
  std::string label;
};

struct OracleComparison {
  long Z = 0;
  long oracle = 0;
  bool ambiguous = false;  // prufer flagged the count
  bool oracle_ambiguous = false;
  bool match = false;
  double rho_stop = 0.0;
  double L = 0.0;
  double h = 0.0;
  std::string note;
};

/// Random instances across the three families, with and without
/// perturbations and custom B, X, whose certified truncation point lies
/// within a few hundred units of rho0.
std::vector<OracleInstance> random_oracle_instances(std::size_t count, std::uint64_t seed);

/// Certified prufer_count against the inertia of the finite-difference
/// operator on [rho0, L] (Dirichlet at L, second-order Neumann at rho0),
/// L just past the point where the count was certified.
OracleComparison compare_with_oracle(const OracleInstance& inst, double h = 0.005);

/// Entry point of the command-line tool.
int cli_main(int argc, char** argv);

}  // namespace ahc
