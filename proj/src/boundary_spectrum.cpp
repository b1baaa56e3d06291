#include "ahcount/boundary_spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "ahcount/errors.hpp"

namespace ahc {

namespace mp = boost::multiprecision;
using Float100 = mp::cpp_bin_float_100;

namespace {

constexpr double kPi = std::numbers::pi;

// Beyond this bound the sphere count is evaluated in floating point only.
const Float100 kSphereExactBound("1e90");

// Lattice enumeration budget for torus counts.
constexpr double kTorusEnumerationBudget = 4e6;

// Relative slack so that levels equal to the bound are counted despite rounding.
constexpr double kLevelSlack = 1e-12;

double unit_ball_volume(int n) {
  return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

BigInt binom(const BigInt& top, int n) {
  if (top < n) return 0;
  BigInt num = 1;
  BigInt den = 1;
  for (int i = 0; i < n; ++i) {
    num *= (top - i);
    den *= (i + 1);
  }
  return num / den;
}

// Number of harmonic polynomials of degree <= K on S^n.
BigInt sphere_cumulative(int n, const BigInt& K) {
  return binom(K + n, n) + binom(K + n - 1, n);
}

// Largest K >= -1 with K(K+n-1) <= B, for B given in high precision.
Float100 sphere_level_floor(int n, const Float100& B) {
  const Float100 b = n - 1;
  return mp::floor((-b + mp::sqrt(b * b + 4 * B)) / 2);
}

CountValue sphere_count(int n, const Float100& B) {
  if (B < 0) return CountValue::zero();
  if (B < kSphereExactBound) {
    BigInt K = static_cast<BigInt>(sphere_level_floor(n, B));
    auto level = [n](const BigInt& k) { return Float100(k * (k + n - 1)); };
    while (level(K + 1) <= B) ++K;
    while (K >= 0 && level(K) > B) --K;
    if (K < 0) return CountValue::zero();
    return CountValue::from_integer(sphere_cumulative(n, K), 1e-80);
  }
  const Float100 K = sphere_level_floor(n, B);
  Float100 rising_hi = 1;
  Float100 rising_lo = 1;
  Float100 factorial = 1;
  for (int i = 1; i <= n; ++i) {
    rising_hi *= (K + i);
    rising_lo *= (K + i - 1);
    factorial *= i;
  }
  const Float100 total = (rising_hi + rising_lo) / factorial;
  return CountValue::from_log10(static_cast<double>(mp::log10(total)), 1e-80);
}

// Lattice points k in Z^dims with sum (k_i / L_i)^2 <= r2.
std::uint64_t torus_lattice_count(const std::vector<double>& lengths, std::size_t dim, double r2) {
  if (r2 < 0) return 0;
  const double L = lengths[dim];
  const auto kmax = static_cast<std::int64_t>(std::floor(L * std::sqrt(r2) * (1 + kLevelSlack)));
  if (dim + 1 == lengths.size()) return static_cast<std::uint64_t>(2 * kmax + 1);
  std::uint64_t total = 0;
  for (std::int64_t k = -kmax; k <= kmax; ++k) {
    const double q = static_cast<double>(k) / L;
    total += torus_lattice_count(lengths, dim + 1, r2 - q * q);
  }
  return total;
}

void torus_enumerate(const std::vector<double>& lengths, std::size_t dim, double r2, double acc,
                     std::vector<double>& out) {
  const double L = lengths[dim];
  const auto kmax = static_cast<std::int64_t>(std::floor(L * std::sqrt(std::max(r2, 0.0)) * (1 + kLevelSlack)));
  for (std::int64_t k = -kmax; k <= kmax; ++k) {
    const double q = static_cast<double>(k) / L;
    if (dim + 1 == lengths.size()) {
      out.push_back(acc + q * q);
    } else {
      torus_enumerate(lengths, dim + 1, r2 - q * q, acc + q * q, out);
    }
  }
}

}  // namespace

SpectralLevel sphere_mode(int n, std::uint64_t k) {
  if (n < 1) throw std::invalid_argument("sphere_mode: dimension must be >= 1");
  const BigInt K = k;
  const BigInt m = binom(K + n, n) - (k >= 2 ? binom(K + n - 2, n) : BigInt(0));
  const double kd = static_cast<double>(k);
  return {kd * (kd + n - 1), static_cast<std::uint64_t>(m)};
}

BoundarySpectrum BoundarySpectrum::sphere(int n) {
  if (n < 1) throw std::invalid_argument("BoundarySpectrum::sphere: dimension must be >= 1");
  return BoundarySpectrum(Kind::Sphere, n);
}

BoundarySpectrum BoundarySpectrum::flat_torus(std::vector<double> lengths) {
  if (lengths.empty()) throw std::invalid_argument("flat_torus: need at least one length");
  for (double L : lengths) {
    if (!(L > 0) || !std::isfinite(L)) throw std::invalid_argument("flat_torus: lengths must be positive");
  }
  BoundarySpectrum out(Kind::FlatTorus, static_cast<int>(lengths.size()));
  out.lengths_ = std::move(lengths);
  return out;
}

BoundarySpectrum BoundarySpectrum::explicit_levels(std::vector<SpectralLevel> levels, int n) {
  if (n < 1) throw std::invalid_argument("explicit_levels: dimension must be >= 1");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!(levels[i].zeta >= 0)) throw std::invalid_argument("explicit_levels: eigenvalues must be >= 0");
    if (levels[i].multiplicity < 1) throw std::invalid_argument("explicit_levels: multiplicity must be >= 1");
    if (i > 0 && !(levels[i].zeta > levels[i - 1].zeta)) {
      throw std::invalid_argument("explicit_levels: eigenvalues must strictly increase");
    }
  }
  BoundarySpectrum out(Kind::Explicit, n);
  out.levels_ = std::move(levels);
  return out;
}

double BoundarySpectrum::volume() const {
  switch (kind_) {
    case Kind::Sphere:
      return 2.0 * std::pow(kPi, 0.5 * (n_ + 1)) / std::tgamma(0.5 * (n_ + 1));
    case Kind::FlatTorus: {
      double v = 1.0;
      for (double L : lengths_) v *= L;
      return v;
    }
    case Kind::Explicit:
      break;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double BoundarySpectrum::weyl_estimate(double bound) const {
  if (!(bound > 0)) throw std::invalid_argument("weyl_estimate: bound must be positive");
  const double vol = volume();
  if (std::isnan(vol)) {
    throw std::invalid_argument("weyl_estimate: explicit spectra carry no volume");
  }
  return unit_ball_volume(n_) * vol * std::pow(bound, 0.5 * n_) / std::pow(2.0 * kPi, n_);
}

std::optional<BigInt> BoundarySpectrum::cumulative_exact(double bound) const {
  if (bound < 0) return BigInt(0);
  switch (kind_) {
    case Kind::Sphere: {
      const Float100 B(bound);
      if (B >= kSphereExactBound) return std::nullopt;
      BigInt K = static_cast<BigInt>(sphere_level_floor(n_, B));
      auto level = [this](const BigInt& k) { return Float100(k * (k + n_ - 1)); };
      while (level(K + 1) <= B) ++K;
      while (K >= 0 && level(K) > B) --K;
      if (K < 0) return BigInt(0);
      return sphere_cumulative(n_, K);
    }
    case Kind::FlatTorus: {
      const double estimate = weyl_estimate(std::max(bound, 1e-300));
      const double cost = std::pow(estimate + 1.0, (n_ - 1.0) / n_);
      if (cost > kTorusEnumerationBudget) return std::nullopt;
      const double r2 = bound / (4.0 * kPi * kPi);
      return BigInt(torus_lattice_count(lengths_, 0, r2));
    }
    case Kind::Explicit: {
      if (levels_.empty() || bound > levels_.back().zeta) {
        throw InsufficientData("explicit spectrum exhausted below bound " + std::to_string(bound));
      }
      BigInt total = 0;
      for (const auto& lv : levels_) {
        if (lv.zeta > bound) break;
        total += lv.multiplicity;
      }
      return total;
    }
  }
  return std::nullopt;
}

CountValue BoundarySpectrum::cumulative_multiplicity(double bound) const {
  if (!(bound >= 0)) throw std::invalid_argument("cumulative_multiplicity: bound must be >= 0");
  if (std::isinf(bound)) throw std::invalid_argument("cumulative_multiplicity: bound must be finite");
  if (kind_ == Kind::Sphere) return sphere_count(n_, Float100(bound));
  if (auto exact = cumulative_exact(bound)) return CountValue::from_integer(*exact);
  return cumulative_multiplicity_log(std::log(bound));
}

CountValue BoundarySpectrum::cumulative_multiplicity_log(double log_bound) const {
  if (std::isnan(log_bound)) throw std::invalid_argument("cumulative_multiplicity_log: NaN bound");
  if (log_bound == -std::numeric_limits<double>::infinity()) return cumulative_multiplicity(0.0);
  switch (kind_) {
    case Kind::Sphere:
      return sphere_count(n_, mp::exp(Float100(log_bound)));
    case Kind::Explicit:
      if (log_bound > 709.0) {
        throw InsufficientData("explicit spectrum exhausted below bound exp(" + std::to_string(log_bound) + ")");
      }
      return cumulative_multiplicity(std::exp(log_bound));
    case Kind::FlatTorus: {
      if (log_bound < 700.0) {
        if (auto exact = cumulative_exact(std::exp(log_bound))) return CountValue::from_integer(*exact);
      }
      // Cells of side 1/L_i around lattice points: the count lies between the
      // ball volumes at radius R -+ d/2, d the cell diameter.
      double inv_len2 = 0.0;
      double vol = 1.0;
      for (double L : lengths_) {
        inv_len2 += 1.0 / (L * L);
        vol *= L;
      }
      const double half_diam = 0.5 * std::sqrt(inv_len2);
      const double logR = 0.5 * log_bound - std::log(2.0 * kPi);
      const double lead = std::log10(unit_ball_volume(n_) * vol) + n_ * logR / std::log(10.0);
      const double rel = half_diam * std::exp(-logR);
      const double err = n_ * std::max(std::log10(1.0 + rel), -std::log10(std::max(1.0 - rel, 1e-300)));
      return CountValue::from_log10(lead, err);
    }
  }
  return CountValue::zero();
}

std::vector<SpectralLevel> BoundarySpectrum::levels_up_to(double bound) const {
  std::vector<SpectralLevel> out;
  if (bound < 0) return out;
  switch (kind_) {
    case Kind::Sphere: {
      for (std::uint64_t k = 0;; ++k) {
        const SpectralLevel lv = sphere_mode(n_, k);
        if (lv.zeta > bound) break;
        out.push_back(lv);
      }
      break;
    }
    case Kind::FlatTorus: {
      const double estimate = weyl_estimate(std::max(bound, 1e-300));
      if (estimate > kTorusEnumerationBudget) {
        throw std::length_error("levels_up_to: torus enumeration budget exceeded");
      }
      const double r2 = bound / (4.0 * kPi * kPi);
      std::vector<double> q2;
      torus_enumerate(lengths_, 0, r2, 0.0, q2);
      std::sort(q2.begin(), q2.end());
      const double scale = 4.0 * kPi * kPi;
      for (double v : q2) {
        const double zeta = scale * v;
        if (zeta > bound * (1 + kLevelSlack)) continue;
        if (!out.empty() && std::abs(zeta - out.back().zeta) <= kLevelSlack * std::max(1.0, zeta)) {
          ++out.back().multiplicity;
        } else {
          out.push_back({zeta, 1});
        }
      }
      break;
    }
    case Kind::Explicit: {
      if (levels_.empty() || bound > levels_.back().zeta) {
        throw InsufficientData("explicit spectrum exhausted below bound " + std::to_string(bound));
      }
      for (const auto& lv : levels_) {
        if (lv.zeta > bound) break;
        out.push_back(lv);
      }
      break;
    }
  }
  return out;
}

std::optional<SpectralLevel> BoundarySpectrum::nearest_level(double zeta) const {
  if (!(zeta >= 0) || !std::isfinite(zeta)) return std::nullopt;
  switch (kind_) {
    case Kind::Sphere: {
      if (zeta > 1e30) return std::nullopt;
      const double b = n_ - 1.0;
      const double root = 0.5 * (-b + std::sqrt(b * b + 4.0 * zeta));
      const auto k0 = static_cast<std::uint64_t>(std::max(0.0, std::floor(root)));
      SpectralLevel best = sphere_mode(n_, k0);
      for (std::uint64_t k : {k0 == 0 ? k0 : k0 - 1, k0 + 1}) {
        const SpectralLevel cand = sphere_mode(n_, k);
        if (std::abs(cand.zeta - zeta) < std::abs(best.zeta - zeta)) best = cand;
      }
      return best;
    }
    case Kind::FlatTorus: {
      if (weyl_estimate(zeta * 1.01 + 1.0) > kTorusEnumerationBudget) return std::nullopt;
      const auto levels = levels_up_to(zeta * 1.01 + 1.0);
      auto best = std::min_element(levels.begin(), levels.end(), [zeta](const auto& x, const auto& y) {
        return std::abs(x.zeta - zeta) < std::abs(y.zeta - zeta);
      });
      if (best == levels.end()) return std::nullopt;
      return *best;
    }
    case Kind::Explicit: {
      if (levels_.empty()) return std::nullopt;
      auto it = std::lower_bound(levels_.begin(), levels_.end(), zeta,
                                 [](const SpectralLevel& lv, double z) { return lv.zeta < z; });
      if (it == levels_.end()) return levels_.back();
      if (it == levels_.begin()) return *it;
      auto prev = std::prev(it);
      return (zeta - prev->zeta <= it->zeta - zeta) ? *prev : *it;
    }
  }
  return std::nullopt;
}

}  // namespace ahc
