#include "ahcount/tail.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ahcount/errors.hpp"
#include "ahcount/prufer.hpp"
#include "ahcount/transform.hpp"

namespace ahc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double variation_density(const JetFunction& f, const RealFunction& g, double rho) {
  const Jet fj = f(Jet::variable(rho));
  if (!(fj.v > 0.0)) throw DomainError("total_variation_F: f must be positive, f(" + std::to_string(rho) + ") <= 0");
  const double pp = (5.0 / 16.0) * std::pow(fj.v, -2.5) * fj.d * fj.d - 0.25 * std::pow(fj.v, -1.5) * fj.dd;
  const double gv = g ? g(rho) : 0.0;
  return std::abs(pp - gv / std::sqrt(fj.v));
}

}  // namespace

double total_variation_F(const JetFunction& f, const RealFunction& g, double a1, double a2, double rtol) {
  if (!(a2 > a1)) throw std::invalid_argument("total_variation_F: need a2 > a1");
  using boost::math::quadrature::gauss_kronrod;
  constexpr unsigned kMaxDepth = 20;
  double err = 0.0;
  double l1 = 0.0;
  double value = 0.0;
  auto integrand = [&](double rho) { return variation_density(f, g, rho); };
  value = gauss_kronrod<double, 61>::integrate(integrand, a1, a2, kMaxDepth, rtol, &err, &l1);
  if (!std::isfinite(value) || err > 10.0 * rtol * std::max(l1, 1e-300)) {
    throw IntegrationError("total variation integral did not converge (divergent?)", a1);
  }
  return value;
}

WkbBound olver_envelopes_from_variation(double V, double a1, double a2) {
  if (!(V >= 0.0)) throw std::invalid_argument("olver_envelopes: variation must be >= 0");
  WkbBound b;
  b.a1 = a1;
  b.a2 = a2;
  b.V = V;
  b.eps1 = b.eps2 = std::expm1(0.5 * V);
  return b;
}

WkbBound olver_envelopes(const JetFunction& f, const RealFunction& g, double a1, double a2) {
  return olver_envelopes_from_variation(total_variation_F(f, g, a1, a2), a1, a2);
}

std::string to_string(TailVerdict v) {
  switch (v) {
    case TailVerdict::Positivity:
      return "positivity";
    case TailVerdict::Wkb:
      return "wkb";
    case TailVerdict::Refusal:
      return "refusal";
  }
  return "unknown";
}

TailCertificate certify_tail_positive(const RealFunction& nondecreasing_lower_bound, double rho_star) {
  TailCertificate out;
  out.rho_star = rho_star;
  const double m = nondecreasing_lower_bound(rho_star);
  if (m > 0.0) {
    out.verdict = TailVerdict::Positivity;
    out.margin = m;
  } else {
    out.reason = "lower bound is not positive at rho_star";
  }
  return out;
}

TailCertificate certify_tail_positive(const PotentialSpec& spec, double zeta, double E, double rho_star) {
  const double rho0 = spec.rho0();
  if (!(rho_star >= rho0)) throw std::invalid_argument("certify_tail_positive: rho_star must be >= rho0");
  if (!(zeta >= 0.0) || !(E >= 0.0)) throw std::invalid_argument("certify_tail_positive: need zeta >= 0, E >= 0");
  TailCertificate out;
  out.rho_star = rho_star;

  const double raw_margin = E - attraction_envelope(spec, rho_star);
  if (raw_margin > 0.0) {
    out.verdict = TailVerdict::Positivity;
    out.margin = raw_margin;
    return out;
  }
  const TransformDescriptor T(spec);
  if (!T.oscillatory() || (spec.family() == Family::PowerLaw && spec.delta() < 0.0)) {
    const double lb = T.lower_bound(T.forward(rho_star), E);
    if (lb > 0.0) {
      out.verdict = TailVerdict::Positivity;
      out.margin = lb;
      return out;
    }
  }

  if (!(E > 0.0)) {
    out.reason = "no positivity margin and the variation diverges at E = 0";
    return out;
  }
  if (spec.family() == Family::PowerLaw && spec.delta() >= 1.0) {
    out.reason = "no positivity margin and |V| ~ rho^(delta-2) is not integrable";
    return out;
  }
  const double lz = zeta > 0.0 ? std::log(zeta) : -kInf;
  const JetFunction f = [E](Jet) { return Jet::constant(E); };
  const RealFunction g = [&spec, lz](double rho) { return eval_Q_log(spec, lz, rho); };
  try {
    const WkbBound b = olver_envelopes(f, g, rho_star, kInf);
    if (b.eps1 < 1.0) {
      out.verdict = TailVerdict::Wkb;
      out.wkb = b;
      out.margin = 1.0 - b.eps1;
      return out;
    }
    out.wkb = b;
    out.reason = "Olver envelope too wide (eps >= 1)";
  } catch (const IntegrationError&) {
    out.reason = "variation integral did not converge";
  }
  return out;
}

}  // namespace ahc
