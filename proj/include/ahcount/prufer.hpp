#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ahcount/potential.hpp"
#include "ahcount/transform.hpp"

namespace ahc {

enum class Certificate { PositivityTail, WkbEnvelope, FixedWindow };

std::string to_string(Certificate c);

/// Where a zero count stops.
struct StopRule {
  enum class Kind { Certified, FixedWindow, TransformedWindow };
  Kind kind = Kind::Certified;
  double limit = 0.0;  // rho_max for FixedWindow, t_max for TransformedWindow

  static StopRule certified() { return {Kind::Certified, 0.0}; }
  static StopRule fixed_window(double rho_max) { return {Kind::FixedWindow, rho_max}; }
  static StopRule transformed_window(double t_max) { return {Kind::TransformedWindow, t_max}; }
};

struct PruferOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  /// Refinement tolerance for crossing locations (coordinate units, relative to max(1,|t|)).
  double crossing_tol = 1e-10;
  /// A count whose end angle lies this close to a multiple of pi is flagged.
  double ambiguity_tol = 1e-6;
  /// Phase switch once the centrifugal ceiling drops below this fraction of |V0|.
  double switch_ratio = 1e-3;
  /// Integrate entirely in rho (FixedWindow only).
  bool raw_only = false;
  /// Certified mode gives up (flagging ambiguity) when the solution tracks the
  /// recessive branch beyond this many e-folds.
  double extension_cap = 50.0;
  /// Initial centrifugal barriers above this level are crossed analytically.
  double barrier_level = 1e4;
  long max_steps = 20'000'000;
};

/// Prufer angle snapshot: theta with tan(theta) = w / w'.
struct PruferState {
  double theta = 0.0;
  double logr = 0.0;
  double coord = 0.0;
  long crossings = 0;
};

struct ZResult {
  long Z = 0;
  double rho_stop = 0.0;       // certified truncation point or window end (rho)
  Certificate certificate = Certificate::FixedWindow;
  bool ambiguous = false;
  std::string note;            // reason for the ambiguity flag, if any
  double t_end = 0.0;          // coordinate where integration ended
  double rho_end = 0.0;        // same in rho (may be +inf)
  double theta_end = 0.0;
  double rho_switch = 0.0;     // start of the transformed phase (rho0 if none)
  bool transformed = false;    // whether the transformed phase ran
  double max_dtheta = 0.0;     // max |dtheta/dt| seen in the transformed phase
  long steps = 0;
};

struct TruncationInterval {
  double rho0 = 0.0;
  double rho_stop = 0.0;  // +inf when it lies past the double range
  double t_stop = 0.0;    // the same point in the transformed coordinate
  Certificate certificate = Certificate::PositivityTail;
};

/// Nonincreasing upper bound for -(V + exp(-rho) X) at rho:
/// |V0| + |a| V1 + sup|X| exp(-rho).
double attraction_envelope(const PotentialSpec& spec, double rho);

/// rho_stop beyond which the transformed coefficient stays positive, so the
/// Cauchy solution gains no zeros once it moves away from the axis. For
/// oscillatory families Q + E > 0 also holds in rho beyond rho_stop. The
/// centrifugal term is nonnegative and is ignored (zeta only moves the true
/// turning point inward). Throws DomainError when no certified point exists.
TruncationInterval truncation_interval(const PotentialSpec& spec, double zeta, double E);

/// Number of zeros of the Cauchy solution in (rho0, end] via the Prufer angle.
ZResult prufer_count(const RadialProblem& problem, StopRule stop = StopRule::certified(),
                     const PruferOptions& options = {});

/// Same for an arbitrary coefficient: u'' = q(rho) u on (a, b], in rho.
ZResult prufer_count_coefficient(const std::function<double(double)>& q, double a, double b,
                                 BoundaryCondition bc, const PruferOptions& options = {});

struct TrajectoryPoint {
  double rho = 0.0;
  double u = 0.0;
  double du = 0.0;
};

/// Error-controlled (u, u') of the untransformed Cauchy problem at the given
/// sample points (ascending, >= rho0).
std::vector<TrajectoryPoint> solve_cauchy(const RadialProblem& problem, const std::vector<double>& samples,
                                          double rtol = 1e-9, double atol = 1e-12);

std::vector<TrajectoryPoint> solve_cauchy_coefficient(const std::function<double(double)>& q, double a,
                                                      BoundaryCondition bc, const std::vector<double>& samples,
                                                      double rtol = 1e-9, double atol = 1e-12);

/// Prufer angle and log-amplitude of u'' = q u at the sample points, in rho.
std::vector<PruferState> prufer_trajectory(const std::function<double(double)>& q, double a, BoundaryCondition bc,
                                           const std::vector<double>& samples, double rtol = 1e-9,
                                           double atol = 1e-12);

}  // namespace ahc
