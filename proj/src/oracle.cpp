#include "ahcount/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ahcount/errors.hpp"

namespace ahc {

namespace {

struct PivotScan {
  long negative = 0;
  bool perturbed = false;
  double max_pivot = 0.0;
};

PivotScan scan_pivots(const TridiagonalOperator& T, double threshold) {
  PivotScan out;
  const double tiny = 1e-30 * std::max(T.scale(), std::numeric_limits<double>::min());
  double d = 1.0;
  for (std::size_t i = 0; i < T.size(); ++i) {
    double next = T.diag[i] - threshold;
    if (i > 0) next -= T.off[i - 1] * (T.off[i - 1] / d);
    if (next == 0.0) {
      next = tiny;
      out.perturbed = true;
    }
    if (next < 0.0) ++out.negative;
    out.max_pivot = std::max(out.max_pivot, std::abs(next));
    d = next;
  }
  return out;
}

std::vector<double> sample_q(const std::function<double(double)>& q, const TridiagonalOperator& T) {
  std::vector<double> v(T.size());
  for (std::size_t i = 0; i < T.size(); ++i) v[i] = q(T.node(i));
  return v;
}

TridiagonalOperator build_grid(double a, double L, double h, BoundaryCondition left, BoundaryCondition right) {
  if (!(L > a) || !(h > 0.0)) throw std::invalid_argument("fd grid: need L > a and h > 0");
  const double steps = std::ceil((L - a) / h - 1e-9);
  if (steps < 2.0 || steps > 1e9) throw std::invalid_argument("fd grid: step count out of range");
  const auto K = static_cast<std::size_t>(steps);
  TridiagonalOperator T;
  T.rho0 = a;
  T.L = L;
  T.h = (L - a) / static_cast<double>(K);
  T.left_bc = left;
  T.right_bc = right;
  // Nodes 0..K; Dirichlet ends drop their node.
  std::size_t n = K + 1;
  if (left == BoundaryCondition::Dirichlet) --n;
  if (right == BoundaryCondition::Dirichlet) --n;
  T.diag.assign(n, 0.0);
  T.off.assign(n - 1, 0.0);
  return T;
}

void fill_laplacian(TridiagonalOperator& T, const std::vector<double>& q, NeumannOrder order) {
  const double ih2 = 1.0 / (T.h * T.h);
  const std::size_t n = T.size();
  for (std::size_t i = 0; i < n; ++i) T.diag[i] = 2.0 * ih2 + q[i];
  for (std::size_t i = 0; i + 1 < n; ++i) T.off[i] = -ih2;
  auto close = [&](std::size_t end, std::size_t neighbor_edge) {
    if (order == NeumannOrder::First) {
      T.diag[end] = ih2 + q[end];
    } else {
      T.off[neighbor_edge] = -std::sqrt(2.0) * ih2;
    }
  };
  if (T.left_bc == BoundaryCondition::Neumann) close(0, 0);
  if (T.right_bc == BoundaryCondition::Neumann) close(n - 1, n - 2);
}

}  // namespace

double TridiagonalOperator::node(std::size_t i) const noexcept {
  const double first = left_bc == BoundaryCondition::Dirichlet ? 1.0 : 0.0;
  return rho0 + (static_cast<double>(i) + first) * h;
}

double TridiagonalOperator::scale() const {
  double s = 0.0;
  for (double d : diag) s = std::max(s, std::abs(d));
  for (double o : off) s = std::max(s, std::abs(o));
  return s;
}

TridiagonalOperator fd_coefficient(const std::function<double(double)>& q, double a, double L, double h,
                                   BoundaryCondition left_bc, BoundaryCondition right_bc, NeumannOrder order) {
  TridiagonalOperator T = build_grid(a, L, h, left_bc, right_bc);
  fill_laplacian(T, sample_q(q, T), order);
  return T;
}

TridiagonalOperator fd_tridiagonal(const PotentialSpec& spec, double zeta, double L, double h,
                                   BoundaryCondition left_bc, BoundaryCondition right_bc, NeumannOrder order) {
  if (!(zeta >= 0.0)) throw std::invalid_argument("fd_tridiagonal: zeta must be >= 0");
  const double lz = zeta > 0.0 ? std::log(zeta) : -std::numeric_limits<double>::infinity();
  return fd_coefficient([&spec, lz](double rho) { return eval_Q_log(spec, lz, rho); }, spec.rho0(), L, h, left_bc,
                        right_bc, order);
}

TridiagonalOperator tridiagonal_from(std::vector<double> diag, std::vector<double> off) {
  if (diag.empty() || off.size() + 1 != diag.size()) {
    throw std::invalid_argument("tridiagonal_from: need off.size() == diag.size() - 1");
  }
  TridiagonalOperator T;
  T.diag = std::move(diag);
  T.off = std::move(off);
  T.h = 1.0;
  T.L = static_cast<double>(T.diag.size()) + 1.0;
  return T;
}

InertiaResult inertia_below(const TridiagonalOperator& T, double threshold) {
  InertiaResult r;
  const PivotScan s = scan_pivots(T, threshold);
  const double scale = std::max(T.scale(), std::abs(threshold));
  r.count = s.negative;
  r.perturbed = s.perturbed;
  r.growth = scale > 0.0 ? s.max_pivot / scale : 0.0;
  const double delta = 1e-12 * std::max(scale, std::numeric_limits<double>::min());
  r.ambiguous = scan_pivots(T, threshold - delta).negative != scan_pivots(T, threshold + delta).negative;
  return r;
}

double kth_eigenvalue(const TridiagonalOperator& T, long k, double tol) {
  const long n = static_cast<long>(T.size());
  if (k < 1 || k > n) throw std::out_of_range("kth_eigenvalue: k outside 1..size");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (long i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(T.off[i - 1]);
    if (i + 1 < n) r += std::abs(T.off[i]);
    lo = std::min(lo, T.diag[i] - r);
    hi = std::max(hi, T.diag[i] + r);
  }
  lo -= 1.0;
  hi += 1.0;
  // Invariant: count(lo) < k <= count(hi).
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi || hi - lo <= tol) break;
    (scan_pivots(T, mid).negative >= k ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

OracleCount full_oracle_count(const PotentialSpec& spec, const BoundarySpectrum& boundary, double E, double L, double h,
                              BoundaryCondition bc, std::uint64_t max_modes, NeumannOrder order) {
  if (!(E > 0.0)) throw std::invalid_argument("full_oracle_count: E must be > 0");
  OracleCount out;
  double bound = 1.0;
  double last = -1.0;
  for (;;) {
    const std::vector<SpectralLevel> levels = boundary.levels_up_to(bound);
    for (const SpectralLevel& lvl : levels) {
      if (lvl.zeta <= last) continue;
      last = lvl.zeta;
      if (out.modes + lvl.multiplicity > max_modes) {
        const CountValue est = boundary.cumulative_multiplicity(bound);
        const std::uint64_t need = est.exact().value_or(std::numeric_limits<std::uint64_t>::max());
        throw OracleRefusal("full_oracle_count: more than " + std::to_string(max_modes) +
                                " modes needed (at least " + std::to_string(std::max<std::uint64_t>(need, out.modes)) +
                                ")",
                            std::max<std::uint64_t>(need, out.modes + lvl.multiplicity));
      }
      const TridiagonalOperator T = fd_tridiagonal(spec, lvl.zeta, L, h, bc, BoundaryCondition::Dirichlet, order);
      const InertiaResult ir = inertia_below(T, -E);
      out.ambiguous = out.ambiguous || ir.ambiguous;
      out.modes += lvl.multiplicity;
      ++out.levels;
      if (ir.count == 0) return out;
      out.N += BigInt(lvl.multiplicity) * ir.count;
    }
    if (!(bound < 1e300)) throw ConsistencyError("full_oracle_count: counts never vanish");
    bound *= 4.0;
  }
}

BracketingResult bracketing_demo(const TridiagonalOperator& T, std::size_t split_index, double threshold) {
  const std::size_t M = T.size();
  if (!(split_index > 1 && split_index < M)) throw std::invalid_argument("bracketing_demo: need 1 < split_index < M");
  const double b = std::abs(T.off[split_index - 1]);
  auto piece = [&](std::size_t from, std::size_t to, double shift) {
    std::vector<double> d(T.diag.begin() + static_cast<std::ptrdiff_t>(from),
                          T.diag.begin() + static_cast<std::ptrdiff_t>(to));
    std::vector<double> o(T.off.begin() + static_cast<std::ptrdiff_t>(from),
                          T.off.begin() + static_cast<std::ptrdiff_t>(to - 1));
    if (from == 0) {
      d.back() += shift;
    } else {
      d.front() += shift;
    }
    return tridiagonal_from(std::move(d), std::move(o));
  };
  BracketingResult r;
  r.full_count = inertia_below(T, threshold).count;
  r.lower_sum = inertia_below(piece(0, split_index, b), threshold).count +
                inertia_below(piece(split_index, M, b), threshold).count;
  r.upper_sum = inertia_below(piece(0, split_index, -b), threshold).count +
                inertia_below(piece(split_index, M, -b), threshold).count;
  r.holds = r.lower_sum <= r.full_count && r.full_count <= r.upper_sum;
  return r;
}

}  // namespace ahc
