#pragma once

#include "ahcount/potential.hpp"

namespace ahc {

/// Compressed coordinate for a potential family and the Liouville-transformed
/// equation w'' = W(t) w, with u = omega(rho) w and omega = (dt/drho)^(-1/2)
/// up to a constant.
///
///   PowerLaw     t = (2 sqrt(c)/delta) rho^(delta/2)       (increasing for either sign of delta)
///   Critical     t = lambda log rho,  lambda = sqrt(c - 1/4)  (t = log rho when c <= 1/4)
///   IteratedLog  t = lambda log_(N+1) rho, lambda = sqrt(cN - 1/4)  (no rescale when cN <= 1/4)
///
/// W excludes the centrifugal term; a constant K may be added to Q + E in its
/// place. For the iterated-log family W is evaluated in log space so t may
/// correspond to rho beyond the double range.
class TransformDescriptor {
 public:
  explicit TransformDescriptor(PotentialSpec spec);

  const PotentialSpec& spec() const noexcept { return spec_; }
  Family family() const noexcept { return spec_.family(); }

  /// Frequency of the oscillatory leading term, 0 when the coupling is at or
  /// below 1/4 (Critical, IteratedLog); for PowerLaw it is 1.
  double lambda() const noexcept { return lambda_; }

  /// True when the leading part of W is -1 (oscillatory).
  bool oscillatory() const noexcept { return oscillatory_; }

  double forward(double rho) const;
  double inverse(double t) const;
  double dt_drho(double rho) const;

  /// Conjugation weight omega(rho) and its logarithmic derivative.
  double weight(double rho) const;
  double weight_log_derivative(double rho) const;

  /// Transformed coefficient at t for spectral offset E and an extra
  /// constant potential K >= 0.
  double W(double t, double E, double K = 0.0) const;

  /// Monotone nondecreasing lower bound for W(t', E, 0) valid at every t' >= t,
  /// built from the family's closed forms and the declared sup bounds.
  double lower_bound(double t, double E) const;

  /// K / (dt/drho)^2 at t: the contribution of a constant potential K to W.
  double scaled_constant(double t, double K) const;

  /// Prufer angle of (w, dw/dt) from the angle of (u, du/drho) at rho,
  /// preserving the integer branch (number of zeros already passed).
  double angle_to_transformed(double theta_raw, double rho) const;

 private:
  struct LogFrame {
    double log_rho;       // log rho = L_1
    double log_inv_G;     // log(1/G_N)
    double rho;           // may be +inf
  };
  LogFrame frame(double t) const;
  double scale2() const noexcept { return oscillatory_ ? lambda_ * lambda_ : 1.0; }

  PotentialSpec spec_;
  double lambda_ = 0.0;
  bool oscillatory_ = false;
  double base_ = 0.0;  // value of W's leading part when not oscillatory
};

TransformDescriptor transform_for(const PotentialSpec& spec);

}  // namespace ahc
