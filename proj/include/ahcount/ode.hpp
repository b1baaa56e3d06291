#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "ahcount/errors.hpp"

namespace ahc {

struct OdeOptions {
  double rtol = 1e-9;
  double atol = 1e-12;
  double h_max = std::numeric_limits<double>::infinity();
  long max_steps = 20'000'000;
};

/// Dormand-Prince 5(4) embedded pair with FSAL, PI step control and the
/// standard 4th-order continuous extension.
///
/// Usage: construct at (t, y), then call step_towards(t_end) repeatedly; each
/// call performs one accepted step that never passes t_end. After a step,
/// dense(t) interpolates on [prev_t(), t()].
template <std::size_t Dim, class F>
class DormandPrince {
 public:
  using State = std::array<double, Dim>;

  DormandPrince(F f, double t, const State& y, OdeOptions opt = {}) : f_(std::move(f)), opt_(opt) { reset(t, y); }

  void reset(double t, const State& y) {
    t_ = t;
    y_ = y;
    k1_ = f_(t_, y_);
    have_h_ = false;
    t_prev_ = t_;
    for (std::size_t i = 0; i < Dim; ++i) {
      r_[0][i] = y_[i];
      for (int j = 1; j < 5; ++j) r_[j][i] = 0.0;
    }
  }

  double t() const noexcept { return t_; }
  const State& y() const noexcept { return y_; }
  double prev_t() const noexcept { return t_prev_; }
  const State& prev_y() const noexcept { return y_prev_; }
  long steps() const noexcept { return steps_; }
  long rejected() const noexcept { return rejected_; }
  const State& derivative() const noexcept { return k1_; }

  /// Continuous extension on the last accepted step.
  State dense(double t) const {
    const double h = t_ - t_prev_;
    const double s = h == 0.0 ? 0.0 : (t - t_prev_) / h;
    const double s1 = 1.0 - s;
    State out;
    for (std::size_t i = 0; i < Dim; ++i) {
      out[i] = r_[0][i] + s * (r_[1][i] + s1 * (r_[2][i] + s * (r_[3][i] + s1 * r_[4][i])));
    }
    return out;
  }

  /// One accepted step towards t_end. Returns false when already at t_end.
  bool step_towards(double t_end) {
    const double span = t_end - t_;
    if (span == 0.0) return false;
    const double dir = span > 0 ? 1.0 : -1.0;
    if (!have_h_) {
      h_ = initial_step(dir, std::abs(span));
      have_h_ = true;
    }
    bool last_reject = false;
    for (;;) {
      if (steps_ + rejected_ >= opt_.max_steps) throw IntegrationError("step budget exhausted", t_);
      double h = std::min(std::abs(h_), opt_.h_max);
      const double h_floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_));
      if (h < h_floor) throw IntegrationError("step size underflow", t_);
      bool final_step = false;
      if (h >= std::abs(t_end - t_) * (1.0 - 1e-14)) {
        h = std::abs(t_end - t_);
        final_step = true;
      }
      h *= dir;
      State y_new, k7, err;
      attempt(h, y_new, k7, err);
      double e = 0.0;
      for (std::size_t i = 0; i < Dim; ++i) {
        const double sk = opt_.atol + opt_.rtol * std::max(std::abs(y_[i]), std::abs(y_new[i]));
        const double q = err[i] / sk;
        e += q * q;
      }
      e = std::sqrt(e / static_cast<double>(Dim));
      if (!std::isfinite(e)) {
        ++rejected_;
        h_ = 0.25 * h;
        last_reject = true;
        continue;
      }
      constexpr double beta = 0.04;
      constexpr double expo = 0.2 - beta * 0.75;
      const double fac11 = std::pow(std::max(e, 1e-300), expo);
      if (e <= 1.0) {
        double fac = fac11 / std::pow(facold_, beta);
        fac = std::clamp(fac / 0.9, 0.2, 10.0);
        double h_new = h / fac;
        if (last_reject) h_new = dir * std::min(std::abs(h_new), std::abs(h));
        facold_ = std::max(e, 1e-4);
        build_dense(h, y_new, k7);
        t_prev_ = t_;
        y_prev_ = y_;
        t_ = final_step ? t_end : t_ + h;
        y_ = y_new;
        k1_ = k7;
        ++steps_;
        // Keep the controller's proposal when the step was clipped to t_end.
        if (!final_step || std::abs(h_new) < std::abs(h_)) h_ = h_new;
        return true;
      }
      ++rejected_;
      h_ = h / std::min(5.0, fac11 / 0.9);
      last_reject = true;
    }
  }

 private:
  void attempt(double h, State& y_new, State& k7, State& err) {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                            a76 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
    State tmp;
    for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y_[i] + h * a21 * k1_[i];
    k2_ = f_(t_ + c2 * h, tmp);
    for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y_[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
    k3_ = f_(t_ + c3 * h, tmp);
    for (std::size_t i = 0; i < Dim; ++i) tmp[i] = y_[i] + h * (a41 * k1_[i] + a42 * k2_[i] + a43 * k3_[i]);
    k4_ = f_(t_ + c4 * h, tmp);
    for (std::size_t i = 0; i < Dim; ++i) {
      tmp[i] = y_[i] + h * (a51 * k1_[i] + a52 * k2_[i] + a53 * k3_[i] + a54 * k4_[i]);
    }
    k5_ = f_(t_ + c5 * h, tmp);
    for (std::size_t i = 0; i < Dim; ++i) {
      tmp[i] = y_[i] + h * (a61 * k1_[i] + a62 * k2_[i] + a63 * k3_[i] + a64 * k4_[i] + a65 * k5_[i]);
    }
    k6_ = f_(t_ + h, tmp);
    for (std::size_t i = 0; i < Dim; ++i) {
      y_new[i] = y_[i] + h * (a71 * k1_[i] + a73 * k3_[i] + a74 * k4_[i] + a75 * k5_[i] + a76 * k6_[i]);
    }
    k7 = f_(t_ + h, y_new);
    for (std::size_t i = 0; i < Dim; ++i) {
      err[i] = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i] + e7 * k7[i]);
    }
  }

  void build_dense(double h, const State& y_new, const State& k7) {
    static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
    for (std::size_t i = 0; i < Dim; ++i) {
      const double ydiff = y_new[i] - y_[i];
      const double bspl = h * k1_[i] - ydiff;
      r_[0][i] = y_[i];
      r_[1][i] = ydiff;
      r_[2][i] = bspl;
      r_[3][i] = ydiff - h * k7[i] - bspl;
      r_[4][i] = h * (d1 * k1_[i] + d3 * k3_[i] + d4 * k4_[i] + d5 * k5_[i] + d6 * k6_[i] + d7 * k7[i]);
    }
  }

  double initial_step(double dir, double span) {
    double dnf = 0.0, dny = 0.0;
    for (std::size_t i = 0; i < Dim; ++i) {
      const double sk = opt_.atol + opt_.rtol * std::abs(y_[i]);
      dnf += (k1_[i] / sk) * (k1_[i] / sk);
      dny += (y_[i] / sk) * (y_[i] / sk);
    }
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min({h, opt_.h_max, span});
    double h1 = h;
    // A probe far beyond the local scale can see a wildly different f; move it
    // closer until the estimate is consistent with the probe distance.
    for (int attempt = 0; attempt < 40; ++attempt) {
      State y1;
      for (std::size_t i = 0; i < Dim; ++i) y1[i] = y_[i] + dir * h * k1_[i];
      const State f1 = f_(t_ + dir * h, y1);
      double der2 = 0.0;
      for (std::size_t i = 0; i < Dim; ++i) {
        const double sk = opt_.atol + opt_.rtol * std::abs(y_[i]);
        const double q = (f1[i] - k1_[i]) / sk;
        der2 += q * q;
      }
      der2 = std::sqrt(der2) / h;
      const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
      h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
      if (std::isfinite(h1) && h1 >= 1e-3 * h) break;
      h *= 0.01;
    }
    return dir * std::min({100.0 * h, h1, opt_.h_max, span});
  }

  F f_;
  OdeOptions opt_;
  double t_ = 0.0;
  double t_prev_ = 0.0;
  State y_{};
  State y_prev_{};
  State k1_{}, k2_{}, k3_{}, k4_{}, k5_{}, k6_{};
  std::array<State, 5> r_{};
  double h_ = 0.0;
  bool have_h_ = false;
  double facold_ = 1e-4;
  long steps_ = 0;
  long rejected_ = 0;
};

template <std::size_t Dim, class F>
DormandPrince<Dim, F> make_dopri(F f, double t, const std::array<double, Dim>& y, OdeOptions opt = {}) {
  return DormandPrince<Dim, F>(std::move(f), t, y, opt);
}

}  // namespace ahc
