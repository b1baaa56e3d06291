#include "ahcount/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "ahcount/errors.hpp"

namespace ahc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
using Float50 = boost::multiprecision::cpp_bin_float_50;

// log G_N(rho) = -2 (log rho + sum_k log log_(k) rho).
double log_G(int N, double rho) {
  double s = std::log(rho);
  double L = rho;
  for (int k = 1; k <= N; ++k) {
    L = std::log(L);
    s += std::log(L);
  }
  return -2.0 * s;
}

// Smallest rho >= rho0 with log(coef) + log G_N(rho) <= log E (log G_N is decreasing).
double iterated_turning_point(int N, double coef, double E, double rho0) {
  const double target = std::log(E) - std::log(coef);
  if (log_G(N, rho0) <= target) return rho0;
  double lo = rho0;
  double hi = 2.0 * rho0;
  while (log_G(N, hi) > target) {
    lo = hi;
    hi *= 2.0;
    if (!(hi < 1e300)) throw DomainError("cutoff_estimate: turning point beyond double range");
  }
  while (hi - lo > 1e-13 * hi) {
    const double mid = 0.5 * (lo + hi);
    (log_G(N, mid) > target ? lo : hi) = mid;
  }
  return hi;
}

struct Seed {
  double rho;
  double log_mu;
};

// Turning scale for the condition "leading magnitude = E / kappa" with
// kappa = 1/2 (upper) or 8 (lower), and the matching mu.
Seed cutoff_seed(const PotentialSpec& spec, double E, double kappa) {
  const double rho0 = spec.rho0();
  const double c = spec.coupling();
  switch (spec.family()) {
    case Family::PowerLaw: {
      const double d = spec.delta();
      const double rho = std::max(rho0, std::pow(c / (kappa * E), 1.0 / (2.0 - d)));
      return {rho, std::log(2.0 * E) + 2.0 * rho};
    }
    case Family::Critical: {
      if (!(c > 0.25)) return {rho0, std::log(2.0 * E) + 2.0 * rho0};
      const double lam2 = c - 0.25;
      const double rho = std::max(rho0, std::sqrt(lam2 / (kappa * E)));
      return {rho, std::log(2.0 * E) + 2.0 * rho};
    }
    case Family::IteratedLog: {
      const int N = spec.depth();
      if (!(c > 0.25)) return {rho0, std::log(2.0 * E) + 2.0 * rho0};
      const double lam2 = c - 0.25;
      double rho = rho0;
      if (N == 1) {
        const double A = std::sqrt(lam2 / (kappa * E));
        if (A > std::numbers::e) rho = std::max(rho0, 2.0 * A / std::log(A));
      } else {
        rho = iterated_turning_point(N, lam2 / kappa, E, rho0);
      }
      // 2 (lambda^2/kappa) G_N(rho) exp(2 rho).
      return {rho, std::log(2.0 * lam2 / kappa) + log_G(N, rho) + 2.0 * rho};
    }
  }
  return {rho0, 0.0};
}

double log_zeta_of_s(double s) {
  if (s == 0.0) return -kInf;
  return s < 30.0 ? std::log(std::expm1(s)) : s + std::log1p(-std::exp(-s));
}

double s_of_log_zeta(double lz) {
  if (lz == -kInf) return 0.0;
  return lz < 30.0 ? std::log1p(std::exp(lz)) : lz + std::log1p(std::exp(-lz));
}

// Relative width in zeta of the bracket [lo, hi] in s.
double relative_width(double lo, double hi) {
  if (hi > 700.0) return hi - lo;
  return (hi - lo) * std::exp(hi) / std::expm1(hi);
}

class BreakpointFinder {
 public:
  BreakpointFinder(const PotentialSpec& spec, double E, BoundaryCondition bc, const BreakpointOptions& opt,
                   BreakpointSearch& out)
      : spec_(spec), E_(E), bc_(bc), opt_(opt), out_(out) {}

  long probe(double s) {
    const double lz = log_zeta_of_s(s);
    const ZResult r = probe_zero_count(spec_, lz, E_, bc_, opt_.prufer);
    ++out_.probes;
    if (r.ambiguous) {
      std::ostringstream os;
      os << "ambiguous probe at log(zeta)=" << lz << ": " << r.note;
      out_.flags.push_back(os.str());
    }
    return r.Z;
  }

  // Z(lo) = zlo > zhi = Z(hi); records b_k for k in (zhi, zlo].
  void split(double lo, long zlo, double hi, long zhi) {
    if (zlo == zhi) return;
    const double mid = 0.5 * (lo + hi);
    if (relative_width(lo, hi) <= opt_.rel_tol || !(mid > lo && mid < hi)) {
      for (long k = zlo; k > zhi; --k) out_.breakpoints.push_back({k, log_zeta_of_s(mid)});
      return;
    }
    const long zm = probe(mid);
    if (zm > zlo || zm < zhi) {
      std::ostringstream os;
      os << "zero count not monotone in zeta: Z=" << zlo << " at s=" << lo << ", Z=" << zm << " at s=" << mid
         << ", Z=" << zhi << " at s=" << hi;
      throw ConsistencyError(os.str());
    }
    split(lo, zlo, mid, zm);
    split(mid, zm, hi, zhi);
  }

 private:
  const PotentialSpec& spec_;
  double E_;
  BoundaryCondition bc_;
  const BreakpointOptions& opt_;
  BreakpointSearch& out_;
};

struct ModeCount {
  std::optional<BigInt> exact;
  CountValue approx;
};

ModeCount exact_or_log(const BoundarySpectrum& boundary, double log_zeta) {
  ModeCount m;
  if (log_zeta < 700.0) m.exact = boundary.cumulative_exact(std::exp(log_zeta));
  m.approx = m.exact ? CountValue::from_integer(*m.exact) : boundary.cumulative_multiplicity_log(log_zeta);
  return m;
}

// Modes with zeta_j < b, resolving a level that sits on b by a direct probe.
ModeCount modes_below(const BoundarySpectrum& boundary, const Breakpoint& b, const PotentialSpec& spec, double E,
                      BoundaryCondition bc, const BreakpointOptions& opt, std::vector<std::string>& flags,
                      long& probes) {
  if (b.log_zeta < 700.0) {
    const double z = std::exp(b.log_zeta);
    if (const auto lvl = boundary.nearest_level(z); lvl && std::abs(lvl->zeta - z) <= 1e-9 * std::max(z, 1e-300)) {
      const ZResult r = probe_zero_count(spec, lvl->zeta > 0 ? std::log(lvl->zeta) : -kInf, E, bc, opt.prufer);
      ++probes;
      const bool include = r.Z >= b.level;
      std::ostringstream os;
      os << "breakpoint for level " << b.level << " within 1e-9 of zeta=" << lvl->zeta << "; resolved directly (Z="
         << r.Z << ")";
      if (r.ambiguous) os << " [ambiguous: " << r.note << "]";
      flags.push_back(os.str());
      ModeCount m = exact_or_log(boundary, std::log(std::max(lvl->zeta, 1e-300)));
      if (lvl->zeta == 0.0) m = exact_or_log(boundary, -kInf);
      if (!include) {
        if (m.exact) {
          *m.exact -= lvl->multiplicity;
          m.approx = CountValue::from_integer(*m.exact);
        } else {
          const Float50 v = boost::multiprecision::pow(Float50(10), Float50(m.approx.log10())) - lvl->multiplicity;
          m.approx = CountValue::from_log10(static_cast<double>(boost::multiprecision::log10(v)),
                                            m.approx.log10_error());
        }
      }
      return m;
    }
  }
  return exact_or_log(boundary, b.log_zeta);
}

Float50 pow10_50(double x) { return boost::multiprecision::pow(Float50(10), Float50(x)); }

}  // namespace

double CutoffEstimate::log10_mu_upper() const { return log_mu_upper / std::numbers::ln10; }
double CutoffEstimate::log10_mu_lower() const { return log_mu_lower / std::numbers::ln10; }

double Breakpoint::zeta() const { return std::exp(log_zeta); }

CutoffEstimate cutoff_estimate(const PotentialSpec& spec, double E) {
  if (!(E > 0.0)) throw std::invalid_argument("cutoff_estimate: E must be > 0");
  const Seed up = cutoff_seed(spec, E, 0.5);
  const Seed low = cutoff_seed(spec, E, 8.0);
  CutoffEstimate c;
  c.rho_u = up.rho;
  c.log_mu_upper = up.log_mu;
  c.log_mu_lower = low.log_mu;
  return c;
}

ZResult probe_zero_count(const PotentialSpec& spec, double log_zeta, double E, BoundaryCondition bc,
                         const PruferOptions& opt) {
  return prufer_count(RadialProblem::with_log_zeta(spec, log_zeta, E, bc), StopRule::certified(), opt);
}

BreakpointSearch zeta_breakpoints(const PotentialSpec& spec, double E, BoundaryCondition bc,
                                  const BreakpointOptions& opt) {
  if (!(E > 0.0)) throw std::invalid_argument("zeta_breakpoints: E must be > 0");
  BreakpointSearch out;
  out.cutoff = cutoff_estimate(spec, E);
  BreakpointFinder finder(spec, E, bc, opt, out);
  out.Z0 = finder.probe(0.0);
  if (out.Z0 == 0) return out;
  double hi = std::max(1.0, s_of_log_zeta(out.cutoff.log_mu_upper));
  long zhi = finder.probe(hi);
  double lo = 0.0;
  long zlo = out.Z0;
  while (zhi > 0) {
    if (zhi > zlo) throw ConsistencyError("zero count not monotone in zeta while bracketing the cutoff");
    finder.split(lo, zlo, hi, zhi);
    lo = hi;
    zlo = zhi;
    hi *= 2.0;
    if (hi > 1e7) throw ConsistencyError("zeta_breakpoints: no cutoff found below log(zeta) = 1e7");
    zhi = finder.probe(hi);
  }
  finder.split(lo, zlo, hi, zhi);
  std::sort(out.breakpoints.begin(), out.breakpoints.end(),
            [](const Breakpoint& a, const Breakpoint& b) { return a.level < b.level; });
  return out;
}

CountResult assemble_count(const PotentialSpec& spec, const BoundarySpectrum& boundary, double E, BoundaryCondition bc,
                           const BreakpointOptions& opt) {
  const BreakpointSearch bs = zeta_breakpoints(spec, E, bc, opt);
  CountResult res;
  res.breakpoints = bs.breakpoints;
  res.cutoff = bs.cutoff;
  res.Z0 = bs.Z0;
  res.probes = bs.probes;
  res.flags = bs.flags;
  if (bs.Z0 == 0) {
    res.N_E = CountValue::zero();
    return res;
  }

  // cum[k-1] = #{j : zeta_j < b_k}; non-increasing in k.
  const auto Z0 = static_cast<std::size_t>(bs.Z0);
  std::vector<ModeCount> mc(Z0);
  for (std::size_t i = 0; i < Z0; ++i) {
    mc[i] = modes_below(boundary, bs.breakpoints[i], spec, E, bc, opt, res.flags, res.probes);
  }
  res.exact = std::all_of(mc.begin(), mc.end(), [](const ModeCount& c) { return c.exact.has_value(); });

  if (res.exact) {
    BigInt total = 0;
    for (std::size_t i = Z0; i-- > 0;) {
      const BigInt here = *mc[i].exact;
      const BigInt above = i + 1 < Z0 ? *mc[i + 1].exact : BigInt(0);
      const BigInt band = here - above;
      if (band < 0) throw ConsistencyError("assemble_count: negative band count");
      res.bands.push_back({static_cast<long>(i + 1), CountValue::from_integer(band)});
      total += here;
    }
    res.N_E = CountValue::from_integer(total);
    return res;
  }

  // Log path: fixed summation order (descending level), 50-digit accumulation.
  std::vector<CountValue> cum(Z0);
  for (std::size_t i = 0; i < Z0; ++i) cum[i] = mc[i].approx;
  double lmax = -kInf;
  double err = 0.0;
  for (const CountValue& c : cum) {
    lmax = std::max(lmax, c.log10());
    err = std::max(err, c.log10_error());
  }
  Float50 sum = 0;
  for (std::size_t i = Z0; i-- > 0;) {
    if (!cum[i].is_zero()) sum += pow10_50(cum[i].log10() - lmax);
    const Float50 here = cum[i].is_zero() ? Float50(0) : pow10_50(cum[i].log10() - lmax);
    const Float50 above = (i + 1 < Z0 && !cum[i + 1].is_zero()) ? pow10_50(cum[i + 1].log10() - lmax) : Float50(0);
    const Float50 band = here - above;
    CountValue bv = CountValue::zero();
    if (band > 0) {
      const double lb = static_cast<double>(boost::multiprecision::log10(band)) + lmax;
      if (lb < 15.0) {
        bv = CountValue::from_integer(BigInt(static_cast<long long>(std::llround(std::pow(10.0, lb)))), err);
      } else {
        bv = CountValue::from_log10(lb, err);
      }
    }
    res.bands.push_back({static_cast<long>(i + 1), bv});
  }
  res.N_E = CountValue::from_log10(static_cast<double>(boost::multiprecision::log10(sum)) + lmax, err);
  return res;
}

BigInt enumerate_count(const PotentialSpec& spec, const BoundarySpectrum& boundary, double E, BoundaryCondition bc,
                       std::size_t max_levels, const PruferOptions& opt) {
  BigInt total = 0;
  double bound = 1.0;
  double last = -1.0;
  std::size_t visited = 0;
  for (;;) {
    for (const SpectralLevel& lvl : boundary.levels_up_to(bound)) {
      if (lvl.zeta <= last) continue;
      last = lvl.zeta;
      if (++visited > max_levels) throw std::runtime_error("enumerate_count: level budget exhausted");
      const ZResult r = probe_zero_count(spec, lvl.zeta > 0 ? std::log(lvl.zeta) : -kInf, E, bc, opt);
      if (r.Z == 0) return total;
      total += BigInt(lvl.multiplicity) * r.Z;
    }
    if (!(bound < 1e300)) throw ConsistencyError("enumerate_count: counts never vanish");
    bound *= 4.0;
  }
}

}  // namespace ahc
