#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "ahcount/boundary_spectrum.hpp"
#include "ahcount/potential.hpp"

namespace ahc {

/// Neumann closure at a grid end: First uses the one-sided ghost u_{-1} = u_0
/// (symmetric, O(h)); Second uses the mirrored ghost u_{-1} = u_1, made
/// symmetric by a diagonal similarity (corner coupling -sqrt(2)/h^2, O(h^2)).
enum class NeumannOrder { First, Second };

/// Symmetric tridiagonal discretization of -u'' + q u on [a, L] with grid
/// nodes a + i h. Dirichlet ends drop the boundary node; Neumann ends keep it.
struct TridiagonalOperator {
  double rho0 = 0.0;  // left end of the interval
  double h = 0.0;
  double L = 0.0;     // right end of the interval
  std::vector<double> diag;
  std::vector<double> off;  // size() - 1 entries
  BoundaryCondition left_bc = BoundaryCondition::Dirichlet;
  BoundaryCondition right_bc = BoundaryCondition::Dirichlet;

  std::size_t size() const noexcept { return diag.size(); }
  /// Coordinate of unknown i.
  double node(std::size_t i) const noexcept;
  /// Largest absolute entry.
  double scale() const;
};

/// Discretizes -u'' + eval_Q(spec, zeta, .) u on [rho0, L]. The step is
/// adjusted down so that L - rho0 is a whole number of steps.
TridiagonalOperator fd_tridiagonal(const PotentialSpec& spec, double zeta, double L, double h,
                                   BoundaryCondition left_bc, BoundaryCondition right_bc = BoundaryCondition::Dirichlet,
                                   NeumannOrder order = NeumannOrder::First);

/// Same for an arbitrary coefficient q on [a, L].
TridiagonalOperator fd_coefficient(const std::function<double(double)>& q, double a, double L, double h,
                                   BoundaryCondition left_bc, BoundaryCondition right_bc = BoundaryCondition::Dirichlet,
                                   NeumannOrder order = NeumannOrder::First);

/// Symmetric tridiagonal matrix from raw entries (no grid).
TridiagonalOperator tridiagonal_from(std::vector<double> diag, std::vector<double> off);

struct InertiaResult {
  long count = 0;          // eigenvalues strictly below the threshold
  bool ambiguous = false;  // an eigenvalue lies within 1e-12 * scale of the threshold
  bool perturbed = false;  // a zero pivot was replaced by a tiny value
  double growth = 0.0;     // max |pivot| / scale
};

/// Negative pivots of the LDL^T factorization of T - threshold I.
InertiaResult inertia_below(const TridiagonalOperator& T, double threshold);

/// k-th smallest eigenvalue (k >= 1) by bisection on the inertia count,
/// to absolute tolerance tol.
double kth_eigenvalue(const TridiagonalOperator& T, long k, double tol = 0.0);

/// Thrown when the mode sum would need more modes than allowed.
class OracleRefusal : public std::runtime_error {
 public:
  OracleRefusal(const std::string& what, std::uint64_t required)
      : std::runtime_error(what), required_(required) {}
  std::uint64_t required_modes() const noexcept { return required_; }

 private:
  std::uint64_t required_;
};

struct OracleCount {
  BigInt N = 0;
  std::uint64_t modes = 0;   // boundary modes visited, with multiplicity
  std::size_t levels = 0;    // distinct levels visited
  bool ambiguous = false;
};

/// Sum over boundary modes of m(zeta_j) * inertia_below(fd_tridiagonal(zeta_j), -E).
/// Levels are visited in ascending order and the sum stops at the first
/// level whose count is zero (the matrix increases with zeta). Throws
/// OracleRefusal once more than max_modes modes would be needed.
OracleCount full_oracle_count(const PotentialSpec& spec, const BoundarySpectrum& boundary, double E, double L, double h,
                              BoundaryCondition bc, std::uint64_t max_modes = 100'000,
                              NeumannOrder order = NeumannOrder::First);

/// Discrete Dirichlet-Neumann bracketing at a split between unknowns
/// split_index - 1 and split_index. With the coupling entry b removed,
/// the Neumann pieces subtract |b| from both adjacent diagonal entries
/// (T = T_N + PSD) and the Dirichlet pieces add |b| (T_D = T + PSD), so
/// for counts below a threshold: lower_sum (Dirichlet) <= full <= upper_sum (Neumann).
struct BracketingResult {
  long lower_sum = 0;
  long full_count = 0;
  long upper_sum = 0;
  bool holds = false;
};

BracketingResult bracketing_demo(const TridiagonalOperator& T, std::size_t split_index, double threshold);

}  // namespace ahc
