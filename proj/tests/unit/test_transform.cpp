#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "ahcount/prufer.hpp"
#include "ahcount/transform.hpp"

using namespace ahc;

TEST_CASE("compressed coordinates") {
  CHECK(transform_for(PotentialSpec::power_law(1.0, 1.0)).forward(4.0) == doctest::Approx(4.0));
  const auto crit = transform_for(PotentialSpec::critical(1.0));
  CHECK(crit.lambda() == doctest::Approx(std::sqrt(0.75)));
  CHECK(crit.forward(20.0) == doctest::Approx(std::sqrt(0.75) * std::log(20.0)));
  const auto il = transform_for(PotentialSpec::iterated_log(1, 1.0));
  CHECK(il.forward(std::exp(std::numbers::e)) == doctest::Approx(std::sqrt(0.75)));
  CHECK_FALSE(transform_for(PotentialSpec::critical(0.2)).oscillatory());
  CHECK(transform_for(PotentialSpec::critical(0.2)).forward(10.0) == doctest::Approx(std::log(10.0)));
}

TEST_CASE("inverse and derivative of the coordinate") {
  for (const auto& spec : {PotentialSpec::power_law(1.0, 1.0), PotentialSpec::power_law(2.0, -0.5),
                           PotentialSpec::power_law(1.0, 1.7), PotentialSpec::critical(3.0),
                           PotentialSpec::iterated_log(1, 1.0), PotentialSpec::iterated_log(2, 0.9)}) {
    const auto T = transform_for(spec);
    for (double r = spec.rho0() * 1.01; r < 1e6; r *= 3.7) {
      CHECK(T.inverse(T.forward(r)) == doctest::Approx(r).epsilon(1e-11));
      const double h = 1e-6 * r;
      CHECK(T.dt_drho(r) == doctest::Approx((T.forward(r + h) - T.forward(r - h)) / (2 * h)).epsilon(1e-6));
    }
  }
}

// w = u / omega solves w'' = W w in t: compare a central difference of w in t
// with W w along an accurately integrated solution.
TEST_CASE("transformed equation") {
  struct Case {
    PotentialSpec spec;
    double zeta;
    double E;
  };
  for (const Case& c : {Case{PotentialSpec::power_law(1.0, 1.0), 3.0, 0.05},
                        Case{PotentialSpec::critical(2.5).with_perturbation(0.3, 1.0), 1.0, 0.01},
                        Case{PotentialSpec::iterated_log(1, 1.0), 0.0, 1e-4},
                        Case{PotentialSpec::power_law(1.0, -1.0), 2.0, 0.0}}) {
    const auto T = transform_for(c.spec);
    const RadialProblem p(c.spec, c.zeta, c.E, BoundaryCondition::Neumann);
    const double t0 = T.forward(c.spec.rho0());
    const bool bounded = c.spec.family() == Family::PowerLaw && c.spec.delta() < 0;
    for (int k = 0; k < 5; ++k) {
      const double t = bounded ? t0 * std::exp(-0.3 * (k + 1)) : t0 + 0.3 + 0.2 * k;
      const double dt = 1e-3 / (1.0 + std::sqrt(std::abs(T.W(t, c.E, 0.0))));
      std::vector<double> rs{T.inverse(t - dt), T.inverse(t), T.inverse(t + dt)};
      const auto sol = solve_cauchy(p, rs, 1e-13, 1e-14);
      double w[3];
      for (int i = 0; i < 3; ++i) w[i] = sol[i].u / T.weight(rs[i]);
      const double second = (w[0] - 2 * w[1] + w[2]) / (dt * dt);
      const double W = T.W(t, c.E, 0.0);
      const double Wz = W + centrifugal_term(c.spec, std::log(c.zeta), rs[1]) / std::pow(T.dt_drho(rs[1]), 2);
      const double scale = std::abs(w[1]) * (std::abs(Wz) + 1.0);
      CHECK(std::abs(second - Wz * w[1]) <= 1e-4 * scale);
    }
  }
}

TEST_CASE("lower bound is nondecreasing and below W") {
  for (const auto& spec : {PotentialSpec::power_law(1.0, -1.0), PotentialSpec::critical(0.2),
                           PotentialSpec::iterated_log(1, 0.1), PotentialSpec::critical(1.0).with_perturbation(0.5, 1.0)}) {
    const auto T = transform_for(spec);
    const double E = 0.01;
    const double t0 = T.forward(spec.rho0());
    // For negative delta the coordinate fills (t0, 0).
    const bool bounded = spec.family() == Family::PowerLaw && spec.delta() < 0;
    auto at = [&](double x) { return bounded ? t0 * std::exp(-x) : t0 + x; };
    double prev = -INFINITY;
    for (double x = 0; x < 12; x += 0.25) {
      const double t = at(x);
      const double lb = T.lower_bound(t, E);
      CHECK(lb >= prev);
      prev = lb;
      for (double y = x; y < x + 5; y += 0.5) CHECK(lb <= T.W(at(y), E) + 1e-12 * std::max(1.0, std::abs(lb)));
    }
  }
}

TEST_CASE("constant potential scales with the coordinate") {
  const auto T = transform_for(PotentialSpec::critical(2.0));
  const double r = 7.0;
  const double t = T.forward(r);
  CHECK(T.scaled_constant(t, 0.3) == doctest::Approx(0.3 / std::pow(T.dt_drho(r), 2)));
  CHECK(T.W(t, 0.1, 0.3) - T.W(t, 0.1, 0.0) == doctest::Approx(T.scaled_constant(t, 0.3)));
}

TEST_CASE("angle conversion keeps the branch") {
  const auto T = transform_for(PotentialSpec::critical(2.0));
  const double pi = std::numbers::pi;
  for (double th : {0.0, 0.3, 1.5, pi - 0.01, 3 * pi + 0.2, 7 * pi + 2.9}) {
    const double tw = T.angle_to_transformed(th, 5.0);
    CHECK(std::floor(tw / pi) == std::floor(th / pi));
  }
}

TEST_CASE("iterated-log coefficient past the double range") {
  const auto T = transform_for(PotentialSpec::iterated_log(2, 1.0));
  const double W = T.W(40.0, 0.0);
  CHECK(std::isfinite(W));
  CHECK(W == doctest::Approx(-1.0).epsilon(1e-6));
}
