#pragma once

#include <functional>
#include <optional>
#include <string>

#include "ahcount/jet.hpp"
#include "ahcount/potential.hpp"

namespace ahc {

/// Positive coefficient f, evaluated on a jet so f' and f'' come for free.
using JetFunction = std::function<Jet(Jet)>;
using RealFunction = std::function<double(double)>;

/// Olver error envelopes for w'' = (f + g) w on (a1, a2).
struct WkbBound {
  double a1 = 0.0;
  double a2 = 0.0;  // may be +inf
  double V = 0.0;   // total variation of the error-control function F
  double eps1 = 0.0;
  double eps2 = 0.0;
};

/// V = integral of |f^(-1/4) (f^(-1/4))'' - g f^(-1/2)| over (a1, a2).
/// Infinite a2 is mapped to [0, 1) by rho = a1 - log(1 - sigma).
/// Throws DomainError when f <= 0 somewhere on the interval and
/// IntegrationError when the quadrature does not converge.
double total_variation_F(const JetFunction& f, const RealFunction& g, double a1, double a2, double rtol = 1e-8);

/// eps1 = eps2 = exp(V/2) - 1.
WkbBound olver_envelopes(const JetFunction& f, const RealFunction& g, double a1, double a2);

/// Envelope from a known variation.
WkbBound olver_envelopes_from_variation(double V, double a1, double a2);

enum class TailVerdict { Positivity, Wkb, Refusal };

std::string to_string(TailVerdict v);

struct TailCertificate {
  TailVerdict verdict = TailVerdict::Refusal;
  double rho_star = 0.0;
  /// Positivity: lower bound on the coefficient beyond rho_star
  /// (Q + E in rho, or the transformed W for non-oscillatory families).
  double margin = 0.0;
  std::optional<WkbBound> wkb;
  std::string reason;

  explicit operator bool() const noexcept { return verdict != TailVerdict::Refusal; }
};

/// Certifies that the Cauchy solution of the radial problem cannot gain
/// zeros beyond rho_star once it moves away from the axis there.
///
/// Positivity: Q + E > 0 on (rho_star, inf) from the family's monotone
/// envelopes (or the transformed coefficient is positive there for
/// non-oscillatory families). WKB: with f = E and g = Q, the Olver pair
/// w1, w2 has no zeros (eps < 1), so w2/w1 is strictly monotone and any
/// solution has at most one further zero. Otherwise a refusal.
TailCertificate certify_tail_positive(const PotentialSpec& spec, double zeta, double E, double rho_star);

/// Positivity certificate for an arbitrary coefficient given through a
/// nondecreasing lower bound of Q + E on [rho_star, inf).
TailCertificate certify_tail_positive(const RealFunction& nondecreasing_lower_bound, double rho_star);

}  // namespace ahc
