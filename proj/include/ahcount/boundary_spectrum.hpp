#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ahcount/count_value.hpp"

namespace ahc {

/// One distinct eigenvalue of the boundary Laplacian with its multiplicity.
struct SpectralLevel {
  double zeta = 0.0;
  std::uint64_t multiplicity = 1;
};

/// Level k of the round n-sphere: zeta = k(k+n-1), multiplicity
/// C(n+k, n) - C(n+k-2, n).
SpectralLevel sphere_mode(int n, std::uint64_t k);

/// Source of boundary-Laplacian eigenvalues with multiplicity.
///
/// Built-in kinds (round sphere, flat torus) are enumerated and counted in
/// closed form. Explicit spectra are user supplied, sorted ascending, and
/// counting past the last supplied level is an error.
class BoundarySpectrum {
 public:
  enum class Kind { Sphere, FlatTorus, Explicit };

  static BoundarySpectrum sphere(int n);
  static BoundarySpectrum flat_torus(std::vector<double> lengths);
  static BoundarySpectrum explicit_levels(std::vector<SpectralLevel> levels, int n);

  Kind kind() const noexcept { return kind_; }
  int dimension() const noexcept { return n_; }
  const std::vector<double>& torus_lengths() const noexcept { return lengths_; }
  const std::vector<SpectralLevel>& explicit_data() const noexcept { return levels_; }

  /// Riemannian volume (sphere, torus); the sum of multiplicities is not a
  /// volume, so explicit spectra report NaN.
  double volume() const;

  /// Number of eigenvalues <= bound, with multiplicity.
  CountValue cumulative_multiplicity(double bound) const;

  /// Same, with the bound given as its natural logarithm (for bounds past
  /// the double range).
  CountValue cumulative_multiplicity_log(double log_bound) const;

  /// Exact cumulative count as a big integer, when available.
  /// Torus counts past the enumeration budget return nullopt.
  std::optional<BigInt> cumulative_exact(double bound) const;

  /// Leading Weyl term C_n vol B^{n/2} / (2 pi)^n with C_n the unit-ball
  /// volume. Seeding heuristic only.
  double weyl_estimate(double bound) const;

  /// Distinct levels with zeta <= bound, ascending.
  std::vector<SpectralLevel> levels_up_to(double bound) const;

  /// The level closest to zeta, when it can be located cheaply.
  std::optional<SpectralLevel> nearest_level(double zeta) const;

 private:
  BoundarySpectrum(Kind kind, int n) : kind_(kind), n_(n) {}

  Kind kind_;
  int n_;
  std::vector<double> lengths_;
  std::vector<SpectralLevel> levels_;
};

}  // namespace ahc
