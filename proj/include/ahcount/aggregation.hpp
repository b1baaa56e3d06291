#pragma once

#include <string>
#include <vector>

#include "ahcount/boundary_spectrum.hpp"
#include "ahcount/count_value.hpp"
#include "ahcount/potential.hpp"
#include "ahcount/prufer.hpp"

namespace ahc {

/// Closed-form seeds for the mode cutoff, in log space.
struct CutoffEstimate {
  double rho_u = 0.0;         // turning-point scale, clamped to >= rho0
  double log_mu_upper = 0.0;  // natural log of mu_upper
  double log_mu_lower = 0.0;  // natural log of mu_lower
  double log10_mu_upper() const;
  double log10_mu_lower() const;
};

/// PowerLaw: rho_u = (2c/E)^(1/(2-delta)), mu_upper = 2E exp(2 rho_u).
/// Critical: rho_u = lambda sqrt(2/E), same mu_upper.
/// IteratedLog N = 1: A = sqrt(2 lambda^2/E), rho_u = 2A/log A,
///   mu_upper = 4 lambda^2 G_1(rho_u) exp(2 rho_u); N >= 2: rho_u solves
///   E = 2 lambda^2 G_N(rho), same mu_upper form.
/// mu_lower uses the analogous point with 2 replaced by 1/8 in the turning
/// condition. Non-oscillatory families clamp rho_u to rho0.
CutoffEstimate cutoff_estimate(const PotentialSpec& spec, double E);

/// One drop of the step function Z(zeta): Z >= level exactly on [0, b).
struct Breakpoint {
  long level = 0;
  double log_zeta = 0.0;  // natural log of b
  double zeta() const;
};

struct BreakpointOptions {
  PruferOptions prufer;
  double rel_tol = 1e-12;
};

struct BreakpointSearch {
  long Z0 = 0;
  /// b_1 >= b_2 >= ... >= b_Z0 (one entry per level).
  std::vector<Breakpoint> breakpoints;
  CutoffEstimate cutoff;
  long probes = 0;
  std::vector<std::string> flags;
};

/// Z(zeta) for one mode parameter given as log(zeta) (-inf for zeta = 0).
ZResult probe_zero_count(const PotentialSpec& spec, double log_zeta, double E, BoundaryCondition bc,
                         const PruferOptions& opt = {});

/// Drop points of the nonincreasing step function zeta -> Z(zeta), found by
/// bisection in s = log(1 + zeta). Throws ConsistencyError when a probe
/// contradicts monotonicity.
BreakpointSearch zeta_breakpoints(const PotentialSpec& spec, double E, BoundaryCondition bc,
                                  const BreakpointOptions& opt = {});

struct Band {
  long level = 0;   // Z on the band
  CountValue modes;  // boundary modes (with multiplicity) in the band
};

struct CountResult {
  CountValue N_E;
  std::vector<Breakpoint> breakpoints;  // descending
  std::vector<Band> bands;               // descending level
  CutoffEstimate cutoff;
  long Z0 = 0;
  long probes = 0;
  bool exact = true;                     // precision mode: exact integers or log10
  std::vector<std::string> flags;
};

/// N_E = sum_j m(zeta_j) Z(zeta_j) = sum_k #{j : zeta_j < b_k}.
CountResult assemble_count(const PotentialSpec& spec, const BoundarySpectrum& boundary, double E, BoundaryCondition bc,
                           const BreakpointOptions& opt = {});

/// N_E by direct enumeration of boundary levels (ascending, until Z = 0).
/// Throws OracleRefusal-like std::runtime_error past max_levels.
BigInt enumerate_count(const PotentialSpec& spec, const BoundarySpectrum& boundary, double E, BoundaryCondition bc,
                       std::size_t max_levels = 100'000, const PruferOptions& opt = {});

}  // namespace ahc
