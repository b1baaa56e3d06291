#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ahcount/errors.hpp"
#include "ahcount/oracle.hpp"
#include "ahcount/prufer.hpp"

using namespace ahc;

namespace {
const double pi = std::numbers::pi;
const auto D = BoundaryCondition::Dirichlet;
const auto N = BoundaryCondition::Neumann;
}  // namespace

TEST_CASE("constant coefficients") {
  CHECK(prufer_count_coefficient([](double) { return 1.0; }, 0.0, 10.0, D).Z == 0);
  CHECK(prufer_count_coefficient([](double) { return -1.0; }, 0.0, 10.0, D).Z == 3);
  CHECK(prufer_count_coefficient([](double) { return -1.0; }, 0.0, 10.0, N).Z == 3);
  CHECK(prufer_count_coefficient([](double) { return -4.0; }, 0.0, 10.0, N).Z == 6);
}

TEST_CASE("Euler equation on a closed window") {
  const auto spec = PotentialSpec::critical(2.5).with_rho0(1.0);
  const RadialProblem p(spec, 0.0, 0.0, D);
  const ZResult r = prufer_count(p, StopRule::fixed_window(std::exp(2 * pi)));
  CHECK(r.Z == 3);
  PruferOptions raw;
  raw.raw_only = true;
  CHECK(prufer_count(p, StopRule::fixed_window(std::exp(2 * pi)), raw).Z == 3);
  CHECK(prufer_count(p, StopRule::fixed_window(std::exp(2 * pi) * 0.999)).Z == 2);
}

TEST_CASE("square well") {
  auto q = [](double r) { return (r <= 5.0 ? -4.0 : 0.0) + 1e-4; };
  CHECK(prufer_count_coefficient(q, 0.0, 400.0, D).Z == 3);
}

TEST_CASE("Cauchy data") {
  auto q = [](double) { return 1.0; };
  CHECK(solve_cauchy_coefficient(q, 2.0, D, {3.0})[0].u == doctest::Approx(std::sinh(1.0)).epsilon(1e-9));
  CHECK(solve_cauchy_coefficient(q, 2.0, N, {3.0})[0].u == doctest::Approx(std::cosh(1.0)).epsilon(1e-9));
}

TEST_CASE("trajectory self-convergence") {
  const RadialProblem p(PotentialSpec::critical(1.0), 4.0, 0.05, D);
  std::vector<double> rs;
  for (double r = 3.0; r < 60.0; r += 1.9) rs.push_back(r);
  const auto a = solve_cauchy(p, rs, 1e-10, 1e-13);
  const auto b = solve_cauchy(p, rs, 1e-11, 1e-14);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    CHECK(std::abs(a[i].u - b[i].u) <= 1e-7 * std::max(std::abs(b[i].u), 1e-300));
  }
}

TEST_CASE("prufer trajectory counts crossings") {
  const auto st = prufer_trajectory([](double) { return -1.0; }, 0.0, D, {1.0, 4.0, 7.0, 10.0});
  CHECK(st[0].crossings == 0);
  CHECK(st[1].crossings == 1);
  CHECK(st[2].crossings == 2);
  CHECK(st[3].crossings == 3);
}

TEST_CASE("truncation points") {
  const auto pl = truncation_interval(PotentialSpec::power_law(1.0, 1.0), 0.0, 0.1);
  CHECK(pl.rho_stop == doctest::Approx(10.0).epsilon(1e-10));
  const auto neg = PotentialSpec::power_law(1.0, -1.0);
  CHECK(truncation_interval(neg, 0.0, 0.3).rho_stop == doctest::Approx(neg.rho0()));
  const auto crit = PotentialSpec::critical(1.0);
  const auto ti = truncation_interval(crit, 50.0, 0.01);
  CHECK(ti.rho_stop >= crit.rho0());
  for (double r = ti.rho_stop; r < 1e7; r *= 1.01) CHECK(eval_Q(crit, 50.0, r) + 0.01 > 0.0);
  CHECK_THROWS_AS(truncation_interval(crit, 0.0, 0.0), DomainError);
}

TEST_CASE("negative exponent: short-range attraction") {
  // -rho^-3 on [8, inf): no Dirichlet bound state, one Neumann state between -1e-4 and -3e-5.
  const auto spec = PotentialSpec::power_law(1.0, -1.0);
  for (double E : {0.0, 1e-5, 3e-5, 1e-4, 1e-3, 0.1}) {
    CHECK(prufer_count(RadialProblem(spec, 0.0, E, D)).Z == 0);
    CHECK(prufer_count(RadialProblem(spec, 0.0, E, N)).Z == (E < 5e-5 ? 1 : 0));
  }
}

TEST_CASE("raw and transformed integration agree") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int compared = 0;
  for (int i = 0; i < 40; ++i) {
    const double c = 1.0 + 3.0 * U(rng);
    const PotentialSpec spec = i % 3 == 0   ? PotentialSpec::power_law(c, 0.3 + 1.4 * U(rng))
                               : i % 3 == 1 ? PotentialSpec::critical(c)
                                            : PotentialSpec::iterated_log(1, c);
    const double zeta = U(rng) < 0.3 ? 0.0 : std::exp(8 * U(rng));
    const double R = spec.rho0() * (2.0 + 40.0 * U(rng));
    const RadialProblem p(spec, zeta, 0.01 * U(rng), i % 2 ? D : N);
    PruferOptions raw;
    raw.raw_only = true;
    const ZResult a = prufer_count(p, StopRule::fixed_window(R));
    const ZResult b = prufer_count(p, StopRule::fixed_window(R), raw);
    if (a.ambiguous || b.ambiguous) continue;
    ++compared;
    CHECK(a.Z == b.Z);
  }
  CHECK(compared >= 35);
}

TEST_CASE("monotone in E and zeta") {
  const auto spec = PotentialSpec::power_law(1.0, 1.0);
  for (auto bc : {D, N}) {
    std::vector<std::vector<long>> Z(10, std::vector<long>(10));
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 10; ++j) {
        const double E = 0.2 * std::pow(0.7, i);
        const double zeta = j == 0 ? 0.0 : std::exp(1.5 * j);
        Z[i][j] = prufer_count(RadialProblem(spec, zeta, E, bc)).Z;
      }
    }
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 10; ++j) {
        if (i > 0) CHECK(Z[i][j] >= Z[i - 1][j]);
        if (j > 0) CHECK(Z[i][j] <= Z[i][j - 1]);
      }
    }
    CHECK(Z[9][0] > Z[0][0]);
  }
}

// Z at spectral offsets just inside and outside an eigenvalue of the
// discretized operator (Richardson extrapolated from h and h/2).
TEST_CASE("zero counts interlace with eigenvalues") {
  struct Case {
    PotentialSpec spec;
    double zeta;
    BoundaryCondition bc;
  };
  const std::vector<Case> cases{{PotentialSpec::power_law(1.0, 1.0), 0.0, N},
                                {PotentialSpec::power_law(2.0, 1.0), 10.0, D},
                                {PotentialSpec::critical(4.0).with_rho0(0.5), 0.0, D},
                                {PotentialSpec::critical(6.0).with_rho0(0.3), 2.0, N}};
  int checked = 0;
  for (const auto& c : cases) {
    const double L = 250.0;
    const auto T1 = fd_tridiagonal(c.spec, c.zeta, L, 0.01, c.bc, D, NeumannOrder::Second);
    const auto T2 = fd_tridiagonal(c.spec, c.zeta, L, 0.005, c.bc, D, NeumannOrder::Second);
    for (long k = 1; k <= 3; ++k) {
      const double l1 = kth_eigenvalue(T1, k, 1e-12);
      const double l2 = kth_eigenvalue(T2, k, 1e-12);
      const double lam = (4 * l2 - l1) / 3;
      if (!(lam < -0.02)) continue;
      const double gap = std::max(1e-3 * std::abs(lam), 50 * std::abs(l2 - lam));
      const long above = prufer_count(RadialProblem(c.spec, c.zeta, -lam - gap, c.bc)).Z;
      const long below = prufer_count(RadialProblem(c.spec, c.zeta, -lam + gap, c.bc)).Z;
      CHECK(above == k);
      CHECK(below == k - 1);
      ++checked;
    }
  }
  CHECK(checked >= 5);
}

TEST_CASE("certified count does not change with larger windows") {
  const auto spec = PotentialSpec::critical(2.5).with_rho0(1.0);
  for (double E : {1e-2, 1e-3, 1e-4}) {
    const RadialProblem p(spec, 0.0, E, D);
    const ZResult cert = prufer_count(p);
    CHECK_FALSE(cert.ambiguous);
    for (double f : {2.0, 10.0, 100.0}) CHECK(prufer_count(p, StopRule::fixed_window(cert.rho_end * f)).Z == cert.Z);
  }
}

TEST_CASE("large mode parameters") {
  const auto spec = PotentialSpec::critical(0.3).with_rho0(1e-3);
  for (double lz : {10.0, 40.0, 200.0, 1000.0}) {
    const ZResult r = prufer_count(RadialProblem::with_log_zeta(spec, lz, 2e-7, D));
    CHECK(r.Z == 0);
  }
  CHECK(prufer_count(RadialProblem(spec, 0.0, 2e-7, D)).Z == 1);
}

TEST_CASE("transformed window in the iterated-log coordinate") {
  const auto spec = PotentialSpec::iterated_log(1, 1.0);
  const auto T = transform_for(spec);
  const double t0 = T.forward(spec.rho0());
  long prev = -1;
  for (double span : {5.0, 10.0, 20.0}) {
    const ZResult r = prufer_count(RadialProblem(spec, 0.0, 0.0, D), StopRule::transformed_window(t0 + span));
    CHECK(r.Z >= prev);
    prev = r.Z;
  }
}
