#pragma once

#include <functional>
#include <string>

#include "ahcount/jet.hpp"

namespace ahc {

enum class Family { PowerLaw, Critical, IteratedLog };

enum class BoundaryCondition { Dirichlet, Neumann };

std::string to_string(Family family);
std::string to_string(BoundaryCondition bc);

/// A real function of the radial coordinate with a declared bound on |f|.
/// A default-constructed instance is identically zero.
struct BoundedFunction {
  std::function<double(double)> fn;
  double sup = 0.0;

  bool is_zero() const noexcept { return !fn; }
  double operator()(double rho) const { return fn ? fn(rho) : 0.0; }
};

/// Radial potential family with its perturbation data and base point.
///
/// The operator carries the potential -V0 + a V1:
///   PowerLaw     V0 = c rho^(delta-2),                   V1 = rho^(delta-2) (log rho)^-eps
///   Critical     V0 = c rho^-2,                          V1 = rho^-2 (log rho)^-eps
///   IteratedLog  V0 = rho^-2/4 + sum_{j<N} G_j/4 + cN G_N, V1 = G_N (log rho)^-eps
/// with G_j = rho^-2 prod_{k<=j} (log_(k) rho)^-2. The full one-dimensional
/// potential adds exp(-2 rho)(1 + exp(-rho) B) zeta + exp(-rho) X.
///
/// Instances are immutable; the `with_*` members return modified copies.
/// Callables must be pure and reentrant.
class PotentialSpec {
 public:
  static PotentialSpec power_law(double c, double delta);
  static PotentialSpec critical(double c);
  static PotentialSpec iterated_log(int N, double cN);

  PotentialSpec with_perturbation(double a, double eps) const;
  PotentialSpec with_B(BoundedFunction B) const;
  PotentialSpec with_X(BoundedFunction X) const;
  PotentialSpec with_rho0(double rho0) const;

  Family family() const noexcept { return family_; }
  double c() const noexcept { return c_; }
  double delta() const noexcept { return delta_; }
  int depth() const noexcept { return N_; }
  double cN() const noexcept { return c_; }
  double a() const noexcept { return a_; }
  double eps() const noexcept { return eps_; }
  const BoundedFunction& B() const noexcept { return B_; }
  const BoundedFunction& X() const noexcept { return X_; }

  /// Coupling of the leading term (c or cN).
  double coupling() const noexcept { return c_; }

  /// Number of iterated logarithms in the leading weight (0 for PowerLaw and Critical).
  int log_depth() const noexcept { return family_ == Family::IteratedLog ? N_ : 0; }

  bool has_user_rho0() const noexcept { return user_rho0_; }

  /// Base point: the user value, or the automatic choice for built-in
  /// perturbations. Throws std::logic_error when custom B or X are set and
  /// no base point was supplied.
  double rho0() const;

  /// Human-readable one-line description.
  std::string describe() const;

 private:
  PotentialSpec() = default;
  void validate_rho0(double rho0) const;
  void refresh_rho0();

  Family family_ = Family::Critical;
  double c_ = 0.0;
  double delta_ = 0.0;
  int N_ = 0;
  double a_ = 0.0;
  double eps_ = 1.0;
  BoundedFunction B_;
  BoundedFunction X_;
  double rho0_ = 0.0;
  bool user_rho0_ = false;
  bool rho0_resolved_ = false;
};

/// One radial Cauchy problem u'' = (Q(rho) + E) u on [rho0, inf) with
/// Dirichlet (u=0, u'=1) or Neumann (u=1, u'=0) data at rho0.
///
/// The mode parameter zeta is stored through its natural logarithm so that
/// values beyond the double range remain usable.
struct RadialProblem {
  PotentialSpec spec;
  double log_zeta;  // -infinity for zeta = 0
  double E;
  BoundaryCondition bc;

  RadialProblem(PotentialSpec spec, double zeta, double E, BoundaryCondition bc);
  static RadialProblem with_log_zeta(PotentialSpec spec, double log_zeta, double E, BoundaryCondition bc);

  double zeta() const;
};

/// j-fold natural logarithm; throws DomainError naming the depth at which an
/// intermediate value stops being positive.
double iter_log(int j, double rho);
Jet iter_log(int j, Jet rho);

/// rho^-2 prod_{k=1..j} (log_(k) rho)^-2.
double weight_G(int j, double rho);

/// -V0(rho) + a V1(rho).
double eval_V(const PotentialSpec& spec, double rho);
Jet eval_V(const PotentialSpec& spec, Jet rho);

/// exp(-2 rho)(1 + exp(-rho) B(rho)) zeta + eval_V + exp(-rho) X(rho).
double eval_Q(const PotentialSpec& spec, double zeta, double rho);

/// eval_Q with zeta passed as log(zeta).
double eval_Q_log(const PotentialSpec& spec, double log_zeta, double rho);

/// The centrifugal term exp(-2 rho)(1 + exp(-rho) B(rho)) zeta.
double centrifugal_term(const PotentialSpec& spec, double log_zeta, double rho);

/// Upper bound of the centrifugal term using sup|B| instead of B(rho).
double centrifugal_ceiling(const PotentialSpec& spec, double log_zeta, double rho);

/// |V0(rho)|.
double leading_magnitude(const PotentialSpec& spec, double rho);

/// |a| V1(rho) (zero when a = 0).
double perturbation_magnitude(const PotentialSpec& spec, double rho);

/// -g''/g for the Liouville weight g of the family's compressed coordinate;
/// nonnegative for all supported parameters.
double hardy_weight(const PotentialSpec& spec, double rho);

/// Smallest base point on which every iterated logarithm the family uses
/// exceeds 1 (e for PowerLaw/Critical, e^e for N=1, ...).
double rho0_floor(const PotentialSpec& spec);

/// Automatic base point: the floor, pushed outward until the family's
/// remainder condition holds for every larger rho (certified through a
/// monotone envelope). Throws DomainError when unsatisfiable in range.
double auto_rho0(const PotentialSpec& spec);

/// The monotone remainder envelope behind auto_rho0, evaluated at rho.
/// auto_rho0 returns the first rho with remainder_envelope(rho) <= 1/2.
double remainder_envelope(const PotentialSpec& spec, double rho);

}  // namespace ahc
