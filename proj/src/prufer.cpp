#include "ahcount/prufer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "ahcount/errors.hpp"
#include "ahcount/ode.hpp"

namespace ahc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kHuge = 1e300;

using Coefficient = std::function<double(double)>;

double safe_coefficient(double w) {
  if (std::isnan(w)) return kHuge;
  return std::clamp(w, -kHuge, kHuge);
}

struct AngleRhs {
  const Coefficient* W;
  const double* kappa;
  std::array<double, 1> operator()(double s, const std::array<double, 1>& y) const {
    const double w = safe_coefficient((*W)(s));
    const double k = *kappa;
    const double c = std::cos(y[0]);
    const double sn = std::sin(y[0]);
    return {k * c * c - (w / k) * sn * sn};
  }
};

// Angle of (kappa u, u') from the angle of (u, u'), same integer branch.
double rescale_angle(double theta, double factor) {
  const double k = std::floor(theta / kPi);
  const double r = theta - k * kPi;
  return k * kPi + std::atan2(factor * std::sin(r), std::cos(r));
}

// Integrates the scaled Prufer angle tan(theta) = kappa w / w',
//   theta' = kappa cos^2 theta - (W / kappa) sin^2 theta,
// counting upward crossings of multiples of pi and refining each on the
// continuous extension. kappa is piecewise constant and tracks sqrt|W| so the
// angle stays well conditioned where |W| is far from 1; zeros and quadrants
// do not depend on kappa.
class AngleIntegrator {
 public:
  AngleIntegrator(Coefficient W, double s0, double theta0, const PruferOptions& opt)
      : W_(std::move(W)),
        opt_(opt),
        kappa_(target_kappa(W_(s0))),
        stepper_(AngleRhs{&W_, &kappa_}, s0, {rescale_angle(theta0, kappa_)}, ode_options(opt)) {}

  double s() const { return stepper_.t(); }
  /// Unscaled angle: tan(theta) = w / w'.
  double theta() const { return rescale_angle(stepper_.y()[0], 1.0 / kappa_); }
  long steps() const { return steps_ + stepper_.steps(); }
  double max_rate() const { return max_rate_; }
  double last_crossing() const { return last_crossing_; }

  void advance_to(double s1) {
    while (stepper_.step_towards(s1)) after_step();
  }

  // Continues until theta mod pi lies in [tol, pi/2] (w w' >= 0). Returns false
  // when the e-fold budget runs out first.
  bool advance_until_receding(double cap) {
    double folds = 0.0;
    double w_prev = std::max(0.0, safe_coefficient(W_(s())));
    const double far = s() + 1e12 * std::max(1.0, std::abs(s()));
    for (;;) {
      if (receding()) return true;
      const double s_before = s();
      if (!stepper_.step_towards(far)) return false;
      after_step();
      const double w_now = std::max(0.0, safe_coefficient(W_(s())));
      folds += 0.5 * (std::sqrt(w_prev) + std::sqrt(w_now)) * (s() - s_before);
      w_prev = w_now;
      if (folds > cap && !receding()) return false;
    }
  }

  bool receding() const {
    const double th = stepper_.y()[0];
    const double r = th - std::floor(th / kPi) * kPi;
    return r >= opt_.ambiguity_tol * kappa_ && r <= 0.5 * kPi;
  }

 private:
  static double target_kappa(double w) {
    w = safe_coefficient(w);
    return std::clamp(std::sqrt(std::abs(w)), 1e-3, 1e6);
  }

  // The angle is controlled in absolute terms: relative control would loosen
  // with every zero passed.
  static OdeOptions ode_options(const PruferOptions& opt) {
    OdeOptions o;
    o.rtol = 0.0;
    o.atol = std::max(opt.rtol, opt.atol);
    o.max_steps = opt.max_steps;
    return o;
  }

  void after_step() {
    const double ta = stepper_.prev_t();
    const double tb = stepper_.t();
    const double tha = stepper_.prev_y()[0];
    const double thb = stepper_.y()[0];
    const double ka = std::floor(tha / kPi);
    const double kb = std::floor(thb / kPi);
    if (kb < ka) {
      throw ConsistencyError("Prufer angle fell back through a multiple of pi near t=" + std::to_string(tb));
    }
    for (double j = ka + 1; j <= kb; j += 1.0) {
      const double target = j * kPi;
      double lo = ta, hi = tb;
      const double tol = opt_.crossing_tol * std::max(1.0, std::abs(tb));
      while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (stepper_.dense(mid)[0] < target ? lo : hi) = mid;
      }
      const double th = stepper_.dense(hi)[0];
      const double w = safe_coefficient(W_(hi));
      const double rate = kappa_ * std::cos(th) * std::cos(th) - (w / kappa_) * std::sin(th) * std::sin(th);
      if (!(rate > 0.0)) {
        throw ConsistencyError("non-transversal zero crossing near t=" + std::to_string(hi));
      }
      last_crossing_ = hi;
    }
    const double w = safe_coefficient(W_(tb));
    const double th = theta();
    max_rate_ = std::max(max_rate_, std::abs(std::cos(th) * std::cos(th) - w * std::sin(th) * std::sin(th)));
    const double k_new = target_kappa(w);
    if (k_new > 1.5 * kappa_ || k_new < kappa_ / 1.5) {
      const double scaled = rescale_angle(thb, k_new / kappa_);
      kappa_ = k_new;
      steps_ += stepper_.steps();
      stepper_ = DormandPrince<1, AngleRhs>(AngleRhs{&W_, &kappa_}, tb, {scaled}, ode_options(opt_));
    }
  }

  Coefficient W_;
  PruferOptions opt_;
  double kappa_;
  DormandPrince<1, AngleRhs> stepper_;
  long steps_ = 0;
  double max_rate_ = 0.0;
  double last_crossing_ = -kInf;
};

double initial_angle(BoundaryCondition bc) { return bc == BoundaryCondition::Dirichlet ? 0.0 : 0.5 * kPi; }

long count_of(double theta) { return static_cast<long>(std::floor(theta / kPi)); }

// Windows are closed on the right: a zero within tolerance of the end counts.
long window_count(double theta, const PruferOptions& opt) {
  return static_cast<long>(std::floor((theta + opt.ambiguity_tol) / kPi));
}

void flag(ZResult& r, const std::string& why) {
  r.ambiguous = true;
  if (!r.note.empty()) r.note += "; ";
  r.note += why;
}

// Flags a window end that falls on (or next to) a zero.
void check_window_end(ZResult& r, const AngleIntegrator& run, const PruferOptions& opt) {
  const double th = run.theta();
  const double dist = std::abs(th - kPi * std::round(th / kPi));
  if (dist < opt.ambiguity_tol) flag(r, "window ends within tolerance of a zero");
  const double end = run.s();
  if (std::abs(end - run.last_crossing()) < opt.ambiguity_tol * std::max(1.0, std::abs(end))) {
    flag(r, "zero crossing within tolerance of the window end");
  }
}

struct PhaseTwo {
  long Z = 0;
  double theta = 0.0;
  double t = 0.0;
  long steps = 0;
  double max_rate = 0.0;
  bool ambiguous = false;
  std::string note;
};

PhaseTwo run_transformed(const TransformDescriptor& T, double E, double K, double t_start, double theta_start,
                         const StopRule& stop, double t_end, const PruferOptions& opt) {
  Coefficient W = [&T, E, K](double t) { return T.W(t, E, K); };
  AngleIntegrator run(W, t_start, theta_start, opt);
  PhaseTwo out;
  if (stop.kind == StopRule::Kind::Certified) {
    double t_pos = t_end;
    if (K > 0.0 && t_start < t_end) {
      // The ceiling constant only raises W; find where it already certifies positivity.
      auto lb = [&](double t) { return T.lower_bound(t, E) + T.scaled_constant(t, K); };
      if (lb(t_start) > 0.0) {
        t_pos = t_start;
      } else if (lb(t_end) > 0.0) {
        double lo = t_start, hi = t_end;
        for (int i = 0; i < 200 && hi - lo > 1e-12 * std::max(1.0, std::abs(hi)); ++i) {
          const double mid = 0.5 * (lo + hi);
          (lb(mid) > 0.0 ? hi : lo) = mid;
        }
        t_pos = hi;
      }
    }
    if (t_pos > t_start) run.advance_to(t_pos);
    if (!run.advance_until_receding(opt.extension_cap)) {
      out.ambiguous = true;
      out.note = "solution tracks the recessive branch past the truncation point";
    }
  } else {
    run.advance_to(t_end);
    ZResult tmp;
    check_window_end(tmp, run, opt);
    out.ambiguous = tmp.ambiguous;
    out.note = tmp.note;
  }
  out.theta = run.theta();
  out.t = run.s();
  out.Z = stop.kind == StopRule::Kind::Certified ? count_of(out.theta) : window_count(out.theta, opt);
  out.steps = run.steps();
  out.max_rate = run.max_rate();
  return out;
}

double reference_magnitude(const PotentialSpec& spec, double rho) {
  return leading_magnitude(spec, rho) + hardy_weight(spec, rho);
}

// First rho >= rho0 where the centrifugal ceiling is below ratio * |V0| (+ Hardy weight).
double switch_point(const PotentialSpec& spec, double log_zeta, double rho0, double ratio) {
  if (log_zeta == -kInf) return rho0;
  auto excess = [&](double rho) {
    return log_zeta - 2.0 * rho + std::log1p(spec.B().sup * std::exp(-rho)) - std::log(ratio) -
           std::log(reference_magnitude(spec, rho));
  };
  if (excess(rho0) <= 0.0) return rho0;
  double lo = rho0;
  double step = 1.0;
  double hi = rho0 + step;
  while (excess(hi) > 0.0) {
    lo = hi;
    step *= 2.0;
    hi = rho0 + step;
    if (!std::isfinite(hi)) throw DomainError("switch point beyond double range");
  }
  while (hi - lo > 1e-10 * hi) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  return hi;
}

struct RawStart {
  double rho;
  double theta;
};

// Crosses a large initial centrifugal barrier without integrating through it.
// The attraction envelope is nonincreasing, so on [rho0, rho_e] the
// coefficient stays above qmin zeta exp(-2 rho_e) - attraction(rho0) + E =
// level > 0 and the Cauchy solution (Dirichlet or Neumann) has no zero there;
// its angle lies in (0, pi/2]. Restarting from the adiabatic angle at rho_e is
// exact up to an error contracted by exp(-2 int sqrt(W)) across the remaining
// barrier (about exp(-2 sqrt(barrier_level))).
RawStart barrier_skip(const PotentialSpec& spec, double log_zeta, double E, double rho0, double theta0,
                      double level, const Coefficient& W) {
  RawStart out{rho0, theta0};
  if (log_zeta == -kInf || !(W(rho0) > level)) return out;
  const double qmin = 1.0 - spec.B().sup * std::exp(-rho0);
  if (!(qmin > 0.0)) return out;
  const double floor = level + std::max(0.0, attraction_envelope(spec, rho0) - E);
  const double rho_e = 0.5 * (log_zeta + std::log(qmin) - std::log(floor));
  if (!(rho_e > rho0)) return out;
  const double w = W(rho_e);
  if (!(w > 0.0)) return out;
  out.rho = rho_e;
  out.theta = std::atan(1.0 / std::sqrt(w));
  return out;
}

}  // namespace

double attraction_envelope(const PotentialSpec& spec, double rho) {
  return leading_magnitude(spec, rho) + perturbation_magnitude(spec, rho) + spec.X().sup * std::exp(-rho);
}

std::string to_string(Certificate c) {
  switch (c) {
    case Certificate::PositivityTail:
      return "positivity-tail";
    case Certificate::WkbEnvelope:
      return "wkb-envelope";
    case Certificate::FixedWindow:
      return "fixed-window";
  }
  return "unknown";
}

TruncationInterval truncation_interval(const PotentialSpec& spec, double zeta, double E) {
  if (!(zeta >= 0.0)) throw std::invalid_argument("truncation_interval: zeta must be >= 0");
  if (!(E >= 0.0)) throw std::invalid_argument("truncation_interval: E must be >= 0");
  const TransformDescriptor T(spec);
  TruncationInterval out;
  out.rho0 = spec.rho0();
  out.certificate = Certificate::PositivityTail;
  const bool supercritical =
      T.oscillatory() && !(spec.family() == Family::PowerLaw && spec.delta() < 0.0);
  if (supercritical) {
    if (!(E > 0.0)) throw DomainError("certified truncation needs E > 0 for an oscillatory family");
    auto gap = [&](double rho) { return attraction_envelope(spec, rho) - E; };
    double lo = out.rho0;
    if (gap(lo) < 0.0) {
      out.rho_stop = lo;
    } else {
      double hi = 2.0 * lo;
      while (gap(hi) >= 0.0) {
        lo = hi;
        hi *= 2.0;
        if (!(hi < 1e300)) throw DomainError("truncation point beyond double range");
      }
      while (hi - lo > 1e-13 * hi) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) >= 0.0 ? lo : hi) = mid;
      }
      out.rho_stop = hi;
    }
    out.t_stop = T.forward(out.rho_stop);
    return out;
  }
  const double t0 = T.forward(out.rho0);
  if (T.lower_bound(t0, E) > 0.0) {
    out.rho_stop = out.rho0;
    out.t_stop = t0;
    return out;
  }
  double lo = t0;
  double step = 1.0;
  double hi = t0 + step;
  while (!(T.lower_bound(hi, E) > 0.0)) {
    lo = hi;
    step *= 2.0;
    hi = t0 + step;
    if (step > 1e9) {
      throw DomainError("no certified truncation point: the transformed coefficient never becomes positive");
    }
  }
  while (hi - lo > 1e-12 * std::max(1.0, std::abs(hi))) {
    const double mid = 0.5 * (lo + hi);
    (T.lower_bound(mid, E) > 0.0 ? hi : lo) = mid;
  }
  out.t_stop = hi;
  out.rho_stop = T.inverse(hi);
  return out;
}

ZResult prufer_count_coefficient(const std::function<double(double)>& q, double a, double b, BoundaryCondition bc,
                                 const PruferOptions& options) {
  if (!(b > a)) throw std::invalid_argument("prufer_count_coefficient: need b > a");
  AngleIntegrator run(q, a, initial_angle(bc), options);
  run.advance_to(b);
  ZResult r;
  r.rho_stop = b;
  r.certificate = Certificate::FixedWindow;
  r.theta_end = run.theta();
  r.Z = window_count(r.theta_end, options);
  r.t_end = r.rho_end = b;
  r.rho_switch = b;
  r.steps = run.steps();
  r.max_dtheta = run.max_rate();
  check_window_end(r, run, options);
  return r;
}

ZResult prufer_count(const RadialProblem& problem, StopRule stop, const PruferOptions& opt) {
  const PotentialSpec& spec = problem.spec;
  const double E = problem.E;
  const double lz = problem.log_zeta;
  const double rho0 = spec.rho0();
  const TransformDescriptor T(spec);
  Coefficient W_raw = [&spec, lz, E](double rho) { return eval_Q_log(spec, lz, rho) + E; };

  ZResult res;
  double t_end = 0.0;
  double rho_end_raw = kInf;  // last rho the raw phase may reach
  switch (stop.kind) {
    case StopRule::Kind::Certified: {
      const TruncationInterval ti = truncation_interval(spec, problem.zeta(), E);
      res.rho_stop = ti.rho_stop;
      res.certificate = ti.certificate;
      t_end = ti.t_stop;
      break;
    }
    case StopRule::Kind::FixedWindow:
      if (!(stop.limit > rho0)) throw std::invalid_argument("prufer_count: window end must exceed rho0");
      res.rho_stop = stop.limit;
      res.certificate = Certificate::FixedWindow;
      rho_end_raw = stop.limit;
      if (!opt.raw_only) t_end = T.forward(stop.limit);
      break;
    case StopRule::Kind::TransformedWindow:
      if (opt.raw_only) throw std::invalid_argument("prufer_count: raw integration needs a FixedWindow stop");
      if (!(stop.limit > T.forward(rho0))) {
        throw std::invalid_argument("prufer_count: transformed window end must exceed t(rho0)");
      }
      t_end = stop.limit;
      res.rho_stop = T.inverse(stop.limit);
      res.certificate = Certificate::FixedWindow;
      rho_end_raw = res.rho_stop;
      break;
  }
  if (opt.raw_only && stop.kind != StopRule::Kind::FixedWindow) {
    throw std::invalid_argument("prufer_count: raw integration needs a FixedWindow stop");
  }

  const RawStart start = barrier_skip(spec, lz, E, rho0, initial_angle(problem.bc), opt.barrier_level, W_raw);
  double rho_s = opt.raw_only ? kInf : std::max(switch_point(spec, lz, rho0, opt.switch_ratio), start.rho);

  auto finish_raw = [&](AngleIntegrator& run, double end) {
    run.advance_to(end);
    res.theta_end = run.theta();
    res.Z = window_count(res.theta_end, opt);
    res.t_end = res.rho_end = end;
    res.rho_switch = end;
    res.transformed = false;
    res.steps += run.steps();
    check_window_end(res, run, opt);
    return res;
  };

  if (start.rho >= rho_end_raw) {
    // The whole window sits inside the positive barrier.
    res.theta_end = start.theta;
    res.Z = 0;
    res.t_end = res.rho_end = rho_end_raw;
    res.rho_switch = rho_end_raw;
    return res;
  }
  AngleIntegrator raw(W_raw, start.rho, start.theta, opt);
  if (rho_s >= rho_end_raw) return finish_raw(raw, rho_end_raw);

  constexpr int kMaxPushes = 60;
  const double push = 0.5 * std::log(1000.0);
  for (int attempt = 0;; ++attempt) {
    raw.advance_to(rho_s);
    const double theta_w = T.angle_to_transformed(raw.theta(), rho_s);
    const double t_s = T.forward(rho_s);
    const double K = lz == -kInf ? 0.0 : centrifugal_ceiling(spec, lz, rho_s);
    if (stop.kind != StopRule::Kind::Certified && t_s >= t_end) {
      return finish_raw(raw, std::min(rho_end_raw, T.inverse(t_end)));
    }
    const PhaseTwo A = run_transformed(T, E, 0.0, t_s, theta_w, stop, t_end, opt);
    PhaseTwo B = A;
    if (K > 0.0) B = run_transformed(T, E, K, t_s, theta_w, stop, t_end, opt);
    res.steps += A.steps + (K > 0.0 ? B.steps : 0);
    if (A.Z == B.Z || attempt == kMaxPushes) {
      res.Z = A.Z;
      res.theta_end = A.theta;
      res.t_end = A.t;
      res.rho_end = T.inverse(A.t);
      res.rho_switch = rho_s;
      res.transformed = true;
      res.max_dtheta = A.max_rate;
      if (A.ambiguous) flag(res, A.note);
      if (B.ambiguous && K > 0.0) flag(res, "ceiling run: " + B.note);
      if (A.Z != B.Z) flag(res, "centrifugal comparison did not settle");
      res.steps += raw.steps();
      return res;
    }
    rho_s += push;
    if (rho_s >= rho_end_raw) return finish_raw(raw, rho_end_raw);
  }
}

std::vector<TrajectoryPoint> solve_cauchy_coefficient(const std::function<double(double)>& q, double a,
                                                      BoundaryCondition bc, const std::vector<double>& samples,
                                                      double rtol, double atol) {
  OdeOptions o;
  o.rtol = rtol;
  o.atol = atol;
  auto rhs = [&q](double s, const std::array<double, 2>& y) {
    return std::array<double, 2>{y[1], q(s) * y[0]};
  };
  const std::array<double, 2> y0 =
      bc == BoundaryCondition::Dirichlet ? std::array<double, 2>{0.0, 1.0} : std::array<double, 2>{1.0, 0.0};
  auto stepper = make_dopri<2>(rhs, a, y0, o);
  std::vector<TrajectoryPoint> out;
  out.reserve(samples.size());
  double prev = a;
  for (double s : samples) {
    if (s < prev) throw std::invalid_argument("solve_cauchy: samples must be ascending and >= rho0");
    while (stepper.step_towards(s)) {
    }
    out.push_back({s, stepper.y()[0], stepper.y()[1]});
    prev = s;
  }
  return out;
}

std::vector<TrajectoryPoint> solve_cauchy(const RadialProblem& problem, const std::vector<double>& samples,
                                          double rtol, double atol) {
  const PotentialSpec& spec = problem.spec;
  const double lz = problem.log_zeta;
  const double E = problem.E;
  return solve_cauchy_coefficient([&spec, lz, E](double rho) { return eval_Q_log(spec, lz, rho) + E; },
                                  spec.rho0(), problem.bc, samples, rtol, atol);
}

std::vector<PruferState> prufer_trajectory(const std::function<double(double)>& q, double a, BoundaryCondition bc,
                                           const std::vector<double>& samples, double rtol, double atol) {
  OdeOptions o;
  o.rtol = rtol;
  o.atol = atol;
  auto rhs = [&q](double s, const std::array<double, 2>& y) {
    const double w = safe_coefficient(q(s));
    const double c = std::cos(y[0]);
    const double sn = std::sin(y[0]);
    return std::array<double, 2>{c * c - w * sn * sn, sn * c * (1.0 + w)};
  };
  auto stepper = make_dopri<2>(rhs, a, {initial_angle(bc), 0.0}, o);
  std::vector<PruferState> out;
  double prev = a;
  for (double s : samples) {
    if (s < prev) throw std::invalid_argument("prufer_trajectory: samples must be ascending");
    while (stepper.step_towards(s)) {
    }
    const double th = stepper.y()[0];
    out.push_back({th, stepper.y()[1], s, count_of(th)});
    prev = s;
  }
  return out;
}

}  // namespace ahc
