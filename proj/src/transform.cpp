#include "ahcount/transform.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace ahc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// sup over r >= rho of r^p e^{-r} (p > 0); the maximum sits at r = p.
double sup_power_exp(double p, double rho) {
  const double r = std::max(rho, p);
  return std::exp(p * std::log(r) - r);
}

double clamp_large(double x) { return std::isnan(x) ? kInf : x; }

}  // namespace

TransformDescriptor::TransformDescriptor(PotentialSpec spec) : spec_(std::move(spec)) {
  switch (spec_.family()) {
    case Family::PowerLaw:
      lambda_ = 1.0;
      oscillatory_ = true;
      break;
    case Family::Critical:
    case Family::IteratedLog: {
      const double c = spec_.coupling();
      oscillatory_ = c > 0.25;
      lambda_ = oscillatory_ ? std::sqrt(c - 0.25) : 0.0;
      base_ = 0.25 - c;
      break;
    }
  }
}

TransformDescriptor transform_for(const PotentialSpec& spec) { return TransformDescriptor(spec); }

double TransformDescriptor::forward(double rho) const {
  switch (family()) {
    case Family::PowerLaw: {
      const double d = spec_.delta();
      return 2.0 * std::sqrt(spec_.c()) / d * std::pow(rho, 0.5 * d);
    }
    case Family::Critical:
      return (oscillatory_ ? lambda_ : 1.0) * std::log(rho);
    case Family::IteratedLog:
      return (oscillatory_ ? lambda_ : 1.0) * std::log(iter_log(spec_.depth(), rho));
  }
  return 0.0;
}

double TransformDescriptor::inverse(double t) const {
  switch (family()) {
    case Family::PowerLaw: {
      const double d = spec_.delta();
      if (d < 0.0 && t >= 0.0) return std::numeric_limits<double>::infinity();
      return std::pow(d * t / (2.0 * std::sqrt(spec_.c())), 2.0 / d);
    }
    case Family::Critical:
      return std::exp(t / (oscillatory_ ? lambda_ : 1.0));
    case Family::IteratedLog: {
      double x = t / (oscillatory_ ? lambda_ : 1.0);
      for (int k = 0; k <= spec_.depth(); ++k) x = std::exp(x);
      return x;
    }
  }
  return 0.0;
}

double TransformDescriptor::dt_drho(double rho) const {
  switch (family()) {
    case Family::PowerLaw:
      return std::sqrt(spec_.c()) * std::pow(rho, 0.5 * spec_.delta() - 1.0);
    case Family::Critical:
      return (oscillatory_ ? lambda_ : 1.0) / rho;
    case Family::IteratedLog: {
      double denom = rho;
      double L = rho;
      for (int k = 1; k <= spec_.depth(); ++k) {
        L = std::log(L);
        denom *= L;
      }
      return (oscillatory_ ? lambda_ : 1.0) / denom;
    }
  }
  return 0.0;
}

double TransformDescriptor::weight(double rho) const { return 1.0 / std::sqrt(dt_drho(rho)); }

double TransformDescriptor::weight_log_derivative(double rho) const {
  switch (family()) {
    case Family::PowerLaw:
      return (1.0 - 0.5 * spec_.delta()) / (2.0 * rho);
    case Family::Critical:
      return 0.5 / rho;
    case Family::IteratedLog: {
      double sum = 1.0;
      double prod = 1.0;
      double L = rho;
      for (int k = 1; k <= spec_.depth(); ++k) {
        L = std::log(L);
        prod *= L;
        sum += 1.0 / prod;
      }
      return 0.5 * sum / rho;
    }
  }
  return 0.0;
}

TransformDescriptor::LogFrame TransformDescriptor::frame(double t) const {
  const int N = spec_.depth();
  double L = t / (oscillatory_ ? lambda_ : 1.0);  // L_{N+1}
  double sum = L;
  for (int k = N; k >= 1; --k) {
    L = std::exp(L);  // L_k
    sum += L;
  }
  return {L, 2.0 * sum, std::exp(L)};
}

double TransformDescriptor::W(double t, double E, double K) const {
  const double a = spec_.a();
  const double shift = E + K;
  switch (family()) {
    case Family::PowerLaw: {
      const double d = spec_.delta();
      const double rho = inverse(t);
      double r = 0.25 * (1.0 - 0.25 * d * d) * std::pow(rho, -d);
      if (a != 0.0) r += a * std::pow(std::log(rho), -spec_.eps());
      double tail = shift;
      if (!spec_.X().is_zero()) tail += std::exp(-rho) * spec_.X()(rho);
      if (tail != 0.0) r += std::pow(rho, 2.0 - d) * tail;
      return clamp_large(-1.0 + r / spec_.c());
    }
    case Family::Critical: {
      const double rho = inverse(t);
      double r = 0.0;
      if (a != 0.0) r += a * std::pow(std::log(rho), -spec_.eps());
      double tail = shift;
      if (!spec_.X().is_zero()) tail += std::exp(-rho) * spec_.X()(rho);
      if (tail != 0.0) r += rho * rho * tail;
      return clamp_large(oscillatory_ ? -1.0 + r / (lambda_ * lambda_) : base_ + r);
    }
    case Family::IteratedLog: {
      const LogFrame f = frame(t);
      double r = 0.0;
      if (a != 0.0) r += a * std::pow(f.log_rho, -spec_.eps());
      if (shift > 0.0) r += std::exp(std::log(shift) + f.log_inv_G);
      if (!spec_.X().is_zero() && std::isfinite(f.rho)) {
        r += spec_.X()(f.rho) * std::exp(f.log_inv_G - f.rho);
      }
      return clamp_large(oscillatory_ ? -1.0 + r / (lambda_ * lambda_) : base_ + r);
    }
  }
  return 0.0;
}

double TransformDescriptor::scaled_constant(double t, double K) const {
  if (K == 0.0) return 0.0;
  switch (family()) {
    case Family::PowerLaw:
      return std::pow(inverse(t), 2.0 - spec_.delta()) * K / spec_.c();
    case Family::Critical: {
      const double rho = inverse(t);
      return rho * rho * K / scale2();
    }
    case Family::IteratedLog:
      return std::exp(std::log(K) + frame(t).log_inv_G) / scale2();
  }
  return 0.0;
}

double TransformDescriptor::lower_bound(double t, double E) const {
  const double aa = std::abs(spec_.a());
  const double xbar = spec_.X().sup;
  switch (family()) {
    case Family::PowerLaw: {
      const double d = spec_.delta();
      const double c = spec_.c();
      const double rho = inverse(t);
      double neg = aa != 0.0 ? aa * std::pow(std::log(rho), -spec_.eps()) : 0.0;
      if (xbar != 0.0) neg += xbar * sup_power_exp(2.0 - d, rho);
      double pos = E * std::pow(rho, 2.0 - d);
      if (d < 0) pos += 0.25 * (1.0 - 0.25 * d * d) * std::pow(rho, -d);
      return clamp_large(-1.0 + (pos - neg) / c);
    }
    case Family::Critical: {
      const double rho = inverse(t);
      double neg = aa != 0.0 ? aa * std::pow(std::log(rho), -spec_.eps()) : 0.0;
      if (xbar != 0.0) neg += xbar * sup_power_exp(2.0, rho);
      const double pos = E * rho * rho;
      return clamp_large(oscillatory_ ? -1.0 + (pos - neg) / scale2() : base_ + pos - neg);
    }
    case Family::IteratedLog: {
      const LogFrame f = frame(t);
      double neg = aa != 0.0 ? aa * std::pow(f.log_rho, -spec_.eps()) : 0.0;
      if (xbar != 0.0) {
        // exp(-r)/G_N(r) decreases for r >= 8.
        double lg = f.log_inv_G - f.rho;
        if (f.rho < 8.0) {
          double L = 8.0;
          lg = 2.0 * std::log(8.0) - 8.0;
          for (int k = 1; k <= spec_.depth(); ++k) {
            L = std::log(L);
            lg += 2.0 * std::log(L);
          }
        }
        neg += xbar * std::exp(lg);
      }
      const double pos = E > 0.0 ? std::exp(std::log(E) + f.log_inv_G) : 0.0;
      return clamp_large(oscillatory_ ? -1.0 + (pos - neg) / scale2() : base_ + pos - neg);
    }
  }
  return 0.0;
}

double TransformDescriptor::angle_to_transformed(double theta_raw, double rho) const {
  const double k = std::floor(theta_raw / std::numbers::pi);
  const double r = theta_raw - k * std::numbers::pi;
  const double u = std::sin(r);
  const double du = std::cos(r);
  const double alpha = std::atan2(dt_drho(rho) * u, du - weight_log_derivative(rho) * u);
  return k * std::numbers::pi + alpha;
}

}  // namespace ahc
