#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ahcount/aggregation.hpp"
#include "ahcount/errors.hpp"
#include "ahcount/harness.hpp"
#include "ahcount/oracle.hpp"
#include "ahcount/prufer.hpp"

using namespace ahc;

namespace {

const double pi = std::numbers::pi;
const auto D = BoundaryCondition::Dirichlet;
const auto Nm = BoundaryCondition::Neumann;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s criterion %d (%s): %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str(), s);
  std::fflush(stdout);
}

std::string fmt(double x, int prec = 4) {
  std::ostringstream os;
  os.precision(prec);
  os << x;
  return os.str();
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1 ------------------------------------------------------------------------
Outcome oracle_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto instances = random_oracle_instances(260, 7);
  long compared = 0, matched = 0, skipped = 0;
  std::string first_miss;
  for (const auto& inst : instances) {
    const OracleComparison c = compare_with_oracle(inst);
    if (c.ambiguous || c.oracle_ambiguous) {
      ++skipped;
      continue;
    }
    ++compared;
    if (c.match) {
      ++matched;
    } else if (first_miss.empty()) {
      first_miss = " first mismatch: " + inst.label + " Z=" + std::to_string(c.Z) + " oracle=" + std::to_string(c.oracle);
    }
  }
  const double secs = seconds_since(t0);
  const bool pass = compared >= 200 && matched == compared && secs <= 60.0;
  return {pass, std::to_string(matched) + "/" + std::to_string(compared) + " matched, " + std::to_string(skipped) +
                    " ambiguous skipped, " + fmt(secs, 3) + " s" + first_miss};
}

// 2 ------------------------------------------------------------------------
Outcome euler_check() {
  const auto base = PotentialSpec::critical(2.5).with_rho0(1.0);
  const long z = prufer_count(RadialProblem(base, 0.0, 0.0, D), StopRule::fixed_window(std::exp(2 * pi))).Z;
  bool pass = z == 3;
  std::string detail = "c=2.5 window (1, e^2pi]: Z=" + std::to_string(z);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> uc(0.3, 12.0), ulog(0.5, 60.0);
  int done = 0, ok = 0;
  while (done < 10) {
    const double c = uc(rng);
    const double R = std::exp(ulog(rng));
    const double lam = std::sqrt(c - 0.25);
    const double turns = lam * std::log(R) / pi;
    const double k = std::round(turns);
    if (k >= 1 && std::abs(R - std::exp(k * pi / lam)) < 1e-6) continue;
    if (std::abs(turns - k) < 1e-9) continue;
    ++done;
    const long expect = static_cast<long>(std::floor(turns));
    const long got =
        prufer_count(RadialProblem(PotentialSpec::critical(c).with_rho0(1.0), 0.0, 0.0, D), StopRule::fixed_window(R)).Z;
    ok += got == expect;
    if (got != expect) detail += "; c=" + fmt(c) + " R=" + fmt(R) + " Z=" + std::to_string(got) + " expected " + std::to_string(expect);
  }
  pass = pass && ok == 10;
  return {pass, detail + "; random windows " + std::to_string(ok) + "/10"};
}

// 3, 4 -----------------------------------------------------------------------
ExperimentConfig slope_config(const std::string& family, double delta) {
  ExperimentConfig cfg;
  cfg.family = family;
  cfg.c = 1.0;
  cfg.delta = delta;
  cfg.boundary = "sphere";
  cfg.n = 1;
  cfg.bcs = {D, Nm};
  cfg.E_max = 0.2;
  cfg.E_min = 0.03;
  cfg.E_count = 8;
  cfg.fit_level = 2;
  return cfg;
}

std::string describe_fit(const std::vector<SweepRow>& rows, BoundaryCondition bc, double target, bool& pass) {
  std::vector<SweepRow> sub;
  std::string counts;
  for (const auto& r : rows) {
    if (r.bc != bc) continue;
    sub.push_back(r);
    counts += (counts.empty() ? "" : " ") + (std::isinf(r.log10_NE) ? std::string("0") : fmt(std::pow(10.0, r.log10_NE), 6));
  }
  std::string out = to_string(bc) + ": N_E=[" + counts + "]";
  try {
    const SlopeFit f = fit_iterated_log_slope(sub, 2);
    const bool ok = std::abs(f.slope - target) <= 0.2;
    pass = pass && ok;
    out += " slope " + fmt(f.slope) + " +- " + fmt(f.stderr_slope, 2) + " (" + std::to_string(f.used) + " rows, target " +
           fmt(target) + ")";
  } catch (const InsufficientData& e) {
    pass = false;
    out += std::string(" slope undefined: ") + e.what();
  }
  return out;
}

Outcome subcritical_slope() {
  bool pass = true;
  std::string detail;
  for (double delta : {1.0, 0.5}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = run_sweep(slope_config("power-law", delta));
    const double target = 1.0 / (2.0 - delta);
    detail += "delta=" + fmt(delta) + " {" + describe_fit(rows, D, target, pass) + "; " +
              describe_fit(rows, Nm, target, pass) + "; " + fmt(seconds_since(t0), 3) + " s} ";
    if (seconds_since(t0) > 300.0) pass = false;
  }
  return {pass, detail};
}

Outcome critical_slope() {
  bool pass = true;
  const auto rows = run_sweep(slope_config("critical", 0.0));
  std::string detail = describe_fit(rows, D, 0.5, pass) + "; " + describe_fit(rows, Nm, 0.5, pass);
  return {pass, detail};
}

// 5 ------------------------------------------------------------------------
Outcome single_mode_growth() {
  const double c = 2.5;
  const double lam = std::sqrt(c - 0.25);
  const auto spec = PotentialSpec::critical(c).with_rho0(1.0);
  // Euler solution zero count up to the turning point sqrt(c/E).
  const long oracle[] = {1, 1, 2, 2, 3};
  std::string detail;
  bool oracle_ok = true;
  double ratio = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double E = std::pow(10.0, -(i + 2));
    const ZResult r = prufer_count(RadialProblem(spec, 0.0, E, D));
    ratio = static_cast<double>(r.Z) / std::log(1.0 / E);
    // The cutoff model carries an O(1) phase error near the turning point.
    oracle_ok = oracle_ok && std::abs(r.Z - oracle[i]) <= 1 && !r.ambiguous;
    detail += "E=1e-" + std::to_string(i + 2) + ": Z=" + std::to_string(r.Z) + " (closed form " +
              std::to_string(oracle[i]) + ") ";
  }
  const double target = lam / (2 * pi);
  const double rel = std::abs(ratio - target) / target;
  detail += "| Z/log(1/E) at 1e-6 = " + fmt(ratio) + " vs " + fmt(target) + " (" + fmt(100 * rel, 3) + "% off)";
  return {rel <= 0.10 && oracle_ok, detail};
}

// 6 ------------------------------------------------------------------------
std::vector<double> dichotomy_counts(const PotentialSpec& spec, BoundaryCondition bc) {
  std::vector<double> out;
  for (int k = 2; k <= 6; ++k) {
    const CountResult r = assemble_count(spec, BoundarySpectrum::sphere(1), std::pow(10.0, -k), bc);
    out.push_back(r.N_E.log10());
  }
  return out;
}

std::string render_counts(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    s += (i ? " " : "") + (std::isinf(v[i]) ? std::string("0") : fmt(std::pow(10.0, v[i]), 8));
  }
  return s + "]";
}

Outcome threshold_dichotomy() {
  bool pass = true;
  std::string detail;
  for (auto bc : {D, Nm}) {
    const auto sub = dichotomy_counts(PotentialSpec::critical(0.15), bc);
    const auto sup = dichotomy_counts(PotentialSpec::critical(0.35), bc);
    bool constant = true, increasing = true;
    for (std::size_t i = 1; i < sub.size(); ++i) constant = constant && sub[i] == sub[0];
    for (std::size_t i = 1; i < sup.size(); ++i) increasing = increasing && sup[i] > sup[i - 1];
    pass = pass && constant && increasing;
    detail += to_string(bc) + ": c=0.15 " + render_counts(sub) + (constant ? " constant" : " NOT constant") +
              ", c=0.35 " + render_counts(sup) + (increasing ? " increasing" : " NOT increasing") + "; ";
  }
  // Iterated-log pair at the mode level in tau = lambda_1 log log rho.
  for (double c1 : {0.1, 1.0}) {
    const auto spec = PotentialSpec::iterated_log(1, c1);
    const auto T = transform_for(spec);
    const double tau0 = T.forward(spec.rho0());
    std::vector<long> zs;
    for (double span : {10.0, 20.0, 40.0, 80.0, 160.0}) {
      zs.push_back(prufer_count(RadialProblem(spec, 0.0, 0.0, D), StopRule::transformed_window(tau0 + span)).Z);
    }
    bool constant = true, increasing = true;
    for (std::size_t i = 1; i < zs.size(); ++i) {
      constant = constant && zs[i] == zs[0];
      increasing = increasing && zs[i] > zs[i - 1];
    }
    const bool ok = c1 < 0.25 ? constant : increasing;
    pass = pass && ok;
    detail += "iterated-log c1=" + fmt(c1) + " Z over tau windows [";
    for (std::size_t i = 0; i < zs.size(); ++i) detail += (i ? " " : "") + std::to_string(zs[i]);
    detail += std::string("]") + (ok ? (c1 < 0.25 ? " constant" : " increasing") : " WRONG") + "; ";
  }
  return {pass, detail};
}

// 7 ------------------------------------------------------------------------
Outcome iterated_log_growth() {
  const auto spec = PotentialSpec::iterated_log(1, 1.0);
  const auto T = transform_for(spec);
  const double lam = std::sqrt(0.75);
  const double tau0 = T.forward(spec.rho0());
  std::vector<double> taus, xs, ys;
  for (double span = 20.0; span <= 200.0; span += 20.0) {
    const double tau = tau0 + span;
    const ZResult r = prufer_count(RadialProblem(spec, 0.0, 0.0, D), StopRule::transformed_window(tau));
    taus.push_back(tau);
    xs.push_back(tau / lam);  // log log rho at the window end
    ys.push_back(static_cast<double>(r.Z));
  }
  auto slope_of = [&](const std::vector<double>& x) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      mx += x[i];
      my += ys[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sxx += (x[i] - mx) * (x[i] - mx);
      sxy += (x[i] - mx) * (ys[i] - my);
    }
    return sxy / sxx;
  };
  const double slope = slope_of(xs);
  const double target = lam / pi;
  const double rel = std::abs(slope - target) / target;
  return {rel <= 0.15, "slope per unit log log rho_max " + fmt(slope) + " vs lambda_1/pi = " + fmt(target) + " (" +
                           fmt(100 * rel, 3) + "% off); per unit tau_max " + fmt(slope_of(taus)) + " (1/pi = " +
                           fmt(1 / pi) + "); Z(tau_max=" + fmt(taus.back()) + ")=" + fmt(ys.back())};
}

// 8 ------------------------------------------------------------------------
Outcome bracketing() {
  std::mt19937_64 rng(88);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int holds = 0, nontrivial = 0;
  for (int i = 0; i < 50;) {
    const double c = 1.0 + 5.0 * U(rng);
    const PotentialSpec spec = i % 3 == 0   ? PotentialSpec::power_law(c, 0.3 + 1.4 * U(rng))
                               : i % 3 == 1 ? PotentialSpec::critical(c).with_rho0(0.2 + U(rng))
                                            : PotentialSpec::iterated_log(1, c);
    const double zeta = U(rng) < 0.4 ? 0.0 : std::exp(6.0 * U(rng));
    const double E = 0.2 * std::exp(std::log(0.01) * U(rng));
    const double L = truncation_interval(spec, zeta, E).rho_stop + 20.0;
    if (L > 2000.0) continue;
    const auto T = fd_tridiagonal(spec, zeta, L, 0.02, i % 2 ? D : Nm);
    ++i;
    const std::size_t split = 2 + static_cast<std::size_t>(U(rng) * static_cast<double>(T.size() - 3));
    const BracketingResult r = bracketing_demo(T, split, -E);
    holds += r.holds;
    nontrivial += r.full_count > 0;
  }
  return {holds == 50, std::to_string(holds) + "/50 splits ordered (" + std::to_string(nontrivial) +
                           " with eigenvalues below the threshold)"};
}

// 9 ------------------------------------------------------------------------
Outcome invariants() {
  std::string detail;
  bool pass = true;

  // Monotonicity on 10x10 grids.
  long grid_violations = 0;
  const std::vector<PotentialSpec> specs{PotentialSpec::power_law(1.0, 1.0), PotentialSpec::critical(2.5).with_rho0(1.0),
                                         PotentialSpec::iterated_log(1, 3.0).with_rho0(2.0)};
  for (const auto& spec : specs) {
    for (auto bc : {D, Nm}) {
      long Z[10][10];
      for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
          const double E = 0.2 * std::pow(0.55, i);
          const double lz = j == 0 ? -INFINITY : 1.2 * j;
          Z[i][j] = probe_zero_count(spec, lz, E, bc).Z;
        }
      }
      for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
          if (i > 0 && Z[i][j] < Z[i - 1][j]) ++grid_violations;
          if (j > 0 && Z[i][j] > Z[i][j - 1]) ++grid_violations;
        }
      }
    }
  }
  pass = pass && grid_violations == 0;
  detail += "monotonicity violations " + std::to_string(grid_violations) + "; ";

  // Zero counts at discretized eigenvalues (Richardson extrapolated).
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int instances = 0, ok = 0, attempts = 0;
  while (instances < 20 && attempts < 200) {
    ++attempts;
    const double c = 2.0 + 7.0 * U(rng);
    const PotentialSpec spec = attempts % 3 == 0 ? PotentialSpec::power_law(c, 0.5 + U(rng))
                               : attempts % 3 == 1 ? PotentialSpec::critical(c).with_rho0(0.2 + 0.8 * U(rng))
                                                   : PotentialSpec::iterated_log(1, c).with_rho0(1.5 + U(rng));
    const double zeta = U(rng) < 0.5 ? 0.0 : std::exp(3.0 * U(rng));
    const auto bc = U(rng) < 0.5 ? D : Nm;
    const double L = 200.0;
    const auto T1 = fd_tridiagonal(spec, zeta, L, 0.01, bc, D, NeumannOrder::Second);
    const auto T2 = fd_tridiagonal(spec, zeta, L, 0.005, bc, D, NeumannOrder::Second);
    const long k = 1 + static_cast<long>(U(rng) * 3.0);
    const double l1 = kth_eigenvalue(T1, k, 1e-12);
    const double l2 = kth_eigenvalue(T2, k, 1e-12);
    const double lam = (4 * l2 - l1) / 3;
    if (!(lam < -0.03)) continue;
    ++instances;
    const double gap = std::max(1e-3 * std::abs(lam), 50 * std::abs(l2 - lam));
    const long at = prufer_count(RadialProblem(spec, zeta, -lam + gap, bc)).Z;
    const long past = prufer_count(RadialProblem(spec, zeta, -lam - gap, bc)).Z;
    ok += at == k - 1 && past == k;
  }
  pass = pass && instances == 20 && ok == 20;
  detail += "eigenvalue interlacing " + std::to_string(ok) + "/" + std::to_string(instances) + "; ";

  // Band assembly against direct enumeration.
  struct Case {
    PotentialSpec spec;
    BoundarySpectrum boundary;
    double E;
  };
  const std::vector<Case> cases{
      {PotentialSpec::power_law(1.0, 1.0), BoundarySpectrum::sphere(1), 0.05},
      {PotentialSpec::power_law(2.0, 0.5), BoundarySpectrum::sphere(2), 0.1},
      {PotentialSpec::critical(2.5).with_rho0(1.0), BoundarySpectrum::sphere(1), 1e-3},
      {PotentialSpec::critical(4.0).with_rho0(0.5), BoundarySpectrum::flat_torus({1.0, 1.3}), 0.01},
      {PotentialSpec::iterated_log(1, 3.0).with_rho0(2.0), BoundarySpectrum::sphere(2), 0.02},
      {PotentialSpec::power_law(1.0, 1.5).with_perturbation(0.3, 1.0), BoundarySpectrum::sphere(1), 0.2}};
  int agree = 0, compared = 0;
  for (const auto& cs : cases) {
    for (auto bc : {D, Nm}) {
      const CountResult r = assemble_count(cs.spec, cs.boundary, cs.E, bc);
      if (!r.N_E.is_exact()) continue;
      ++compared;
      agree += BigInt(*r.N_E.exact()) == enumerate_count(cs.spec, cs.boundary, cs.E, bc);
    }
  }
  pass = pass && agree == compared && compared >= 10;
  detail += "band/enumeration " + std::to_string(agree) + "/" + std::to_string(compared) + "; ";

  // Determinism across worker counts.
  ExperimentConfig cfg;
  cfg.family = "power-law";
  cfg.delta = 1.0;
  cfg.E_max = 0.2;
  cfg.E_min = 0.03;
  cfg.E_count = 6;
  cfg.bcs = {D, Nm};
  std::string reference;
  bool same = true;
  for (int w : {1, 2, 4, 8}) {
    cfg.workers = w;
    std::ostringstream os;
    write_csv(os, run_sweep(cfg));
    if (reference.empty()) reference = os.str();
    same = same && os.str() == reference;
  }
  pass = pass && same;
  detail += std::string("worker determinism ") + (same ? "identical" : "DIFFERENT");
  return {pass, detail};
}

}  // namespace

int main() {
  report(1, "oracle equivalence", oracle_equivalence);
  report(2, "Euler check", euler_check);
  report(3, "subcritical slope", subcritical_slope);
  report(4, "critical slope", critical_slope);
  report(5, "single-mode critical growth", single_mode_growth);
  report(6, "threshold dichotomy", threshold_dichotomy);
  report(7, "iterated-log mode growth", iterated_log_growth);
  report(8, "bracketing", bracketing);
  report(9, "invariant suites", invariants);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
