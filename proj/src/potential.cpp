#include "ahcount/potential.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "ahcount/errors.hpp"

namespace ahc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename T>
T iter_log_impl(int j, T rho) {
  if (j < 0) throw std::invalid_argument("iter_log: depth must be >= 0");
  T x = rho;
  for (int k = 1; k <= j; ++k) {
    if (!(value_of(x) > 0)) {
      throw DomainError("iter_log: log_(" + std::to_string(k - 1) + ") is not positive, cannot take depth " +
                        std::to_string(k));
    }
    using std::log;
    x = log(x);
    if (!(value_of(x) > 0)) {
      throw DomainError("iter_log: log_(" + std::to_string(k) + ") of " + std::to_string(value_of(rho)) +
                        " is not positive");
    }
  }
  return x;
}

template <typename T>
T eval_V_impl(const PotentialSpec& spec, T rho) {
  using std::log;
  using std::pow;
  const double a = spec.a();
  switch (spec.family()) {
    case Family::PowerLaw: {
      const T base = pow(rho, spec.delta() - 2.0);
      T out = -spec.c() * base;
      if (a != 0.0) out = out + a * base * pow(iter_log_impl(1, rho), -spec.eps());
      return out;
    }
    case Family::Critical: {
      const T base = pow(rho, -2.0);
      T out = -spec.c() * base;
      if (a != 0.0) out = out + a * base * pow(iter_log_impl(1, rho), -spec.eps());
      return out;
    }
    case Family::IteratedLog: {
      const int N = spec.depth();
      T G = pow(rho, -2.0);
      T leading = 0.25 * G;
      T L = rho;
      T L1 = rho;
      for (int j = 1; j <= N; ++j) {
        if (!(value_of(L) > 0)) throw DomainError("eval_V: iterated logarithm undefined");
        L = log(L);
        if (!(value_of(L) > 0)) {
          throw DomainError("eval_V: log_(" + std::to_string(j) + ") rho is not positive");
        }
        if (j == 1) L1 = L;
        G = G * pow(L, -2.0);
        leading = leading + (j < N ? 0.25 : spec.cN()) * G;
      }
      T out = -leading;
      if (a != 0.0) out = out + a * G * pow(L1, -spec.eps());
      return out;
    }
  }
  return T{};
}

double exp_tower(int levels) {
  double x = 1.0;
  for (int i = 0; i < levels; ++i) x = std::exp(x);
  return x;
}

}  // namespace

std::string to_string(Family family) {
  switch (family) {
    case Family::PowerLaw:
      return "power-law";
    case Family::Critical:
      return "critical";
    case Family::IteratedLog:
      return "iterated-log";
  }
  return "unknown";
}

std::string to_string(BoundaryCondition bc) {
  return bc == BoundaryCondition::Dirichlet ? "dirichlet" : "neumann";
}

double iter_log(int j, double rho) { return iter_log_impl(j, rho); }
Jet iter_log(int j, Jet rho) { return iter_log_impl(j, rho); }

double weight_G(int j, double rho) {
  double G = 1.0 / (rho * rho);
  double L = rho;
  for (int k = 1; k <= j; ++k) {
    L = std::log(L);
    if (!(L > 0)) throw DomainError("weight_G: log_(" + std::to_string(k) + ") rho is not positive");
    G /= L * L;
  }
  return G;
}

// ---------------------------------------------------------------- PotentialSpec

PotentialSpec PotentialSpec::power_law(double c, double delta) {
  if (!(c > 0)) throw std::invalid_argument("power_law: c must be positive");
  if (!(delta < 2.0) || !(delta > -2.0) || delta == 0.0) {
    throw std::invalid_argument("power_law: delta must lie in (-2, 0) or (0, 2)");
  }
  PotentialSpec s;
  s.family_ = Family::PowerLaw;
  s.c_ = c;
  s.delta_ = delta;
  s.refresh_rho0();
  return s;
}

PotentialSpec PotentialSpec::critical(double c) {
  if (!(c >= 0)) throw std::invalid_argument("critical: c must be >= 0");
  PotentialSpec s;
  s.family_ = Family::Critical;
  s.c_ = c;
  s.refresh_rho0();
  return s;
}

PotentialSpec PotentialSpec::iterated_log(int N, double cN) {
  if (N < 1) throw std::invalid_argument("iterated_log: N must be >= 1");
  if (!(cN > 0)) throw std::invalid_argument("iterated_log: cN must be positive");
  PotentialSpec s;
  s.family_ = Family::IteratedLog;
  s.N_ = N;
  s.c_ = cN;
  s.refresh_rho0();
  return s;
}

PotentialSpec PotentialSpec::with_perturbation(double a, double eps) const {
  if (!std::isfinite(a)) throw std::invalid_argument("with_perturbation: a must be finite");
  if (!(eps > 0)) throw std::invalid_argument("with_perturbation: eps must be positive");
  PotentialSpec s = *this;
  s.a_ = a;
  s.eps_ = eps;
  s.refresh_rho0();
  return s;
}

PotentialSpec PotentialSpec::with_B(BoundedFunction B) const {
  if (!(B.sup >= 0)) throw std::invalid_argument("with_B: sup bound must be >= 0");
  PotentialSpec s = *this;
  s.B_ = std::move(B);
  s.refresh_rho0();
  return s;
}

PotentialSpec PotentialSpec::with_X(BoundedFunction X) const {
  if (!(X.sup >= 0)) throw std::invalid_argument("with_X: sup bound must be >= 0");
  PotentialSpec s = *this;
  s.X_ = std::move(X);
  s.refresh_rho0();
  return s;
}

PotentialSpec PotentialSpec::with_rho0(double rho0) const {
  PotentialSpec s = *this;
  s.validate_rho0(rho0);
  s.rho0_ = rho0;
  s.user_rho0_ = true;
  s.rho0_resolved_ = true;
  return s;
}

void PotentialSpec::validate_rho0(double rho0) const {
  if (!(rho0 > 0) || !std::isfinite(rho0)) throw DomainError("rho0 must be positive and finite");
  const int need = std::max(log_depth(), a_ != 0.0 ? 1 : 0);
  if (need > 0) iter_log(need, rho0);
  if (B_.sup * std::exp(-rho0) >= 1.0) {
    throw DomainError("rho0 too small: 1 + exp(-rho) B(rho) may vanish");
  }
}

void PotentialSpec::refresh_rho0() {
  if (user_rho0_) {
    validate_rho0(rho0_);
    return;
  }
  if (!B_.is_zero() || !X_.is_zero()) {
    rho0_resolved_ = false;
    return;
  }
  rho0_ = auto_rho0(*this);
  rho0_resolved_ = true;
}

double PotentialSpec::rho0() const {
  if (!rho0_resolved_) {
    throw std::logic_error("PotentialSpec: custom B or X requires an explicit rho0 (use with_rho0 or auto_rho0)");
  }
  return rho0_;
}

std::string PotentialSpec::describe() const {
  std::ostringstream os;
  os << to_string(family_);
  switch (family_) {
    case Family::PowerLaw:
      os << " c=" << c_ << " delta=" << delta_;
      break;
    case Family::Critical:
      os << " c=" << c_;
      break;
    case Family::IteratedLog:
      os << " N=" << N_ << " cN=" << c_;
      break;
  }
  if (a_ != 0.0) os << " a=" << a_ << " eps=" << eps_;
  if (rho0_resolved_) os << " rho0=" << rho0_;
  return os.str();
}

// ---------------------------------------------------------------- RadialProblem

RadialProblem::RadialProblem(PotentialSpec s, double zeta_value, double energy, BoundaryCondition b)
    : spec(std::move(s)), log_zeta(-kInf), E(energy), bc(b) {
  if (!(zeta_value >= 0) || !std::isfinite(zeta_value)) {
    throw std::invalid_argument("RadialProblem: zeta must be finite and >= 0");
  }
  if (!(energy >= 0) || !std::isfinite(energy)) throw std::invalid_argument("RadialProblem: E must be >= 0");
  log_zeta = zeta_value > 0 ? std::log(zeta_value) : -kInf;
}

RadialProblem RadialProblem::with_log_zeta(PotentialSpec s, double lz, double energy, BoundaryCondition b) {
  if (std::isnan(lz) || lz == kInf) throw std::invalid_argument("RadialProblem: invalid log zeta");
  RadialProblem p(std::move(s), 0.0, energy, b);
  p.log_zeta = lz;
  return p;
}

double RadialProblem::zeta() const { return std::exp(log_zeta); }

// ---------------------------------------------------------------- evaluation

double eval_V(const PotentialSpec& spec, double rho) { return eval_V_impl(spec, rho); }
Jet eval_V(const PotentialSpec& spec, Jet rho) { return eval_V_impl(spec, rho); }

double centrifugal_term(const PotentialSpec& spec, double log_zeta, double rho) {
  if (log_zeta == -kInf) return 0.0;
  const double q = spec.B().is_zero() ? 1.0 : 1.0 + std::exp(-rho) * spec.B()(rho);
  return std::exp(log_zeta - 2.0 * rho) * q;
}

double centrifugal_ceiling(const PotentialSpec& spec, double log_zeta, double rho) {
  if (log_zeta == -kInf) return 0.0;
  return std::exp(log_zeta - 2.0 * rho) * (1.0 + std::exp(-rho) * spec.B().sup);
}

double eval_Q_log(const PotentialSpec& spec, double log_zeta, double rho) {
  double q = centrifugal_term(spec, log_zeta, rho) + eval_V(spec, rho);
  if (!spec.X().is_zero()) q += std::exp(-rho) * spec.X()(rho);
  return q;
}

double eval_Q(const PotentialSpec& spec, double zeta, double rho) {
  if (!(zeta >= 0)) throw std::invalid_argument("eval_Q: zeta must be >= 0");
  return eval_Q_log(spec, zeta > 0 ? std::log(zeta) : -kInf, rho);
}

double leading_magnitude(const PotentialSpec& spec, double rho) {
  switch (spec.family()) {
    case Family::PowerLaw:
      return spec.c() * std::pow(rho, spec.delta() - 2.0);
    case Family::Critical:
      return spec.c() / (rho * rho);
    case Family::IteratedLog: {
      double G = 1.0 / (rho * rho);
      double total = 0.25 * G;
      double L = rho;
      for (int j = 1; j <= spec.depth(); ++j) {
        L = std::log(L);
        G /= L * L;
        total += (j < spec.depth() ? 0.25 : spec.cN()) * G;
      }
      return total;
    }
  }
  return 0.0;
}

double perturbation_magnitude(const PotentialSpec& spec, double rho) {
  if (spec.a() == 0.0) return 0.0;
  const double damp = std::pow(iter_log(1, rho), -spec.eps());
  switch (spec.family()) {
    case Family::PowerLaw:
      return std::abs(spec.a()) * std::pow(rho, spec.delta() - 2.0) * damp;
    case Family::Critical:
      return std::abs(spec.a()) * damp / (rho * rho);
    case Family::IteratedLog:
      return std::abs(spec.a()) * weight_G(spec.depth(), rho) * damp;
  }
  return 0.0;
}

double hardy_weight(const PotentialSpec& spec, double rho) {
  switch (spec.family()) {
    case Family::PowerLaw: {
      const double d = spec.delta();
      return 0.25 * (1.0 - 0.25 * d * d) / (rho * rho);
    }
    case Family::Critical:
      return 0.25 / (rho * rho);
    case Family::IteratedLog: {
      double G = 1.0 / (rho * rho);
      double total = G;
      double L = rho;
      for (int j = 1; j <= spec.depth(); ++j) {
        L = std::log(L);
        G /= L * L;
        total += G;
      }
      return 0.25 * total;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------- base point

double rho0_floor(const PotentialSpec& spec) { return exp_tower(spec.log_depth() + 1); }

double remainder_envelope(const PotentialSpec& spec, double rho) {
  const double xbar = spec.X().sup;
  const double aa = std::abs(spec.a());
  const double damp = aa != 0.0 ? aa * std::pow(std::log(rho), -spec.eps()) : 0.0;
  const double qfloor = spec.B().sup * std::exp(-rho);
  double env = 0.0;
  switch (spec.family()) {
    case Family::PowerLaw: {
      const double d = spec.delta();
      const double c = spec.c();
      const double tail = xbar != 0.0 ? xbar * std::exp((2.0 - d) * std::log(rho) - rho) : 0.0;
      const double hardy = 0.25 * (1.0 - 0.25 * d * d) * std::pow(rho, -d);
      if (d > 0) {
        env = (damp + tail + hardy) / c;
      } else {
        // Liouville potential must stay >= 1/2 beyond rho0: (hardy - damp - tail)/c >= 3/2.
        env = 2.0 - (hardy - damp - tail) / c;
      }
      break;
    }
    case Family::Critical: {
      const double tail = xbar != 0.0 ? xbar * rho * rho * std::exp(-rho) : 0.0;
      env = damp + tail;
      break;
    }
    case Family::IteratedLog: {
      double tail = 0.0;
      if (xbar != 0.0) {
        double logw = 2.0 * std::log(rho);
        double L = rho;
        for (int j = 1; j <= spec.depth(); ++j) {
          L = std::log(L);
          logw += 2.0 * std::log(L);
        }
        tail = xbar * std::exp(logw - rho);
      }
      env = damp + tail;
      break;
    }
  }
  return std::max(env, qfloor);
}

double auto_rho0(const PotentialSpec& spec) {
  const double floor = rho0_floor(spec);
  if (!std::isfinite(floor)) {
    throw DomainError("auto_rho0: iterated-log floor exceeds the double range; supply rho0");
  }
  // Envelope terms are monotone only past max(e, 2 - delta).
  double lo = floor;
  if (spec.family() == Family::PowerLaw) lo = std::max(lo, 2.0 - spec.delta());
  auto ok = [&](double rho) { return remainder_envelope(spec, rho) <= 0.5; };
  if (ok(lo)) return lo;
  double hi = lo;
  while (!ok(hi)) {
    lo = hi;
    hi *= 2.0;
    if (!(hi < 1e300)) throw DomainError("auto_rho0: remainder condition unsatisfiable in double range");
  }
  while ((hi - lo) > 1e-7 * hi) {
    const double mid = 0.5 * (lo + hi);
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace ahc
