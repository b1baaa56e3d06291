#include "ahcount/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <boost/algorithm/string.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ahcount/errors.hpp"
#include "ahcount/oracle.hpp"
#include "ahcount/prufer.hpp"

namespace ahc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

double parse_double(const std::string& s) {
  if (s == "nan") return kNaN;
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + s + "'");
  }
  if (pos != s.size()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

long parse_long(const std::string& s) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    throw ConfigError("not an integer: '" + s + "'");
  }
  if (pos != s.size()) throw ConfigError("not an integer: '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s) {
  const std::string v = boost::algorithm::to_lower_copy(s);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  throw ConfigError("not a boolean: '" + s + "'");
}

std::string sanitize_flag(std::string s) {
  for (char& ch : s) {
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ';';
    if (ch == '|') ch = '/';
  }
  return s;
}

std::string join_flags(const std::vector<std::string>& flags) { return boost::algorithm::join(flags, " | "); }

std::vector<std::string> split_flags(const std::string& s) {
  std::vector<std::string> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t at = s.find(" | ", start);
    out.push_back(s.substr(start, at == std::string::npos ? std::string::npos : at - start));
    if (at == std::string::npos) break;
    start = at + 3;
  }
  return out;
}

// log_(k) x for k >= 0, given log x; NaN when undefined.
double iterated_log_from_log(double log_x, int k) {
  if (k == 0) return log_x > 700.0 ? kInf : std::exp(log_x);
  double v = log_x;
  for (int i = 1; i < k; ++i) {
    if (!(v > 0.0)) return kNaN;
    v = std::log(v);
  }
  return v;
}

}  // namespace

// ---------------------------------------------------------------- config

PotentialSpec make_spec(const std::string& family, double c, double delta, int N, double a, double eps,
                        std::optional<double> rho0) {
  PotentialSpec spec = [&] {
    if (family == "power-law") return PotentialSpec::power_law(c, delta);
    if (family == "critical") return PotentialSpec::critical(c);
    if (family == "iterated-log") return PotentialSpec::iterated_log(N, c);
    throw ConfigError("unknown family '" + family + "' (power-law, critical, iterated-log)");
  }();
  if (a != 0.0) spec = spec.with_perturbation(a, eps);
  if (rho0) spec = spec.with_rho0(*rho0);
  return spec;
}

BoundaryCondition parse_bc(const std::string& s) {
  const std::string v = boost::algorithm::to_lower_copy(s);
  if (v == "dirichlet" || v == "d") return BoundaryCondition::Dirichlet;
  if (v == "neumann" || v == "n") return BoundaryCondition::Neumann;
  throw ConfigError("unknown boundary condition '" + s + "'");
}

std::vector<BoundaryCondition> parse_bc_list(const std::string& s) {
  const std::string v = boost::algorithm::to_lower_copy(boost::algorithm::trim_copy(s));
  if (v == "both") return {BoundaryCondition::Dirichlet, BoundaryCondition::Neumann};
  std::vector<std::string> parts;
  boost::algorithm::split(parts, v, boost::is_any_of(","));
  std::vector<BoundaryCondition> out;
  for (auto& p : parts) out.push_back(parse_bc(boost::algorithm::trim_copy(p)));
  return out;
}

PotentialSpec ExperimentConfig::spec() const { return make_spec(family, c, delta, N, a, eps, rho0); }

BoundarySpectrum ExperimentConfig::boundary_spectrum() const {
  if (boundary == "sphere") return BoundarySpectrum::sphere(n);
  if (boundary == "torus") {
    if (lengths.empty()) return BoundarySpectrum::flat_torus(std::vector<double>(static_cast<std::size_t>(n), 1.0));
    return BoundarySpectrum::flat_torus(lengths);
  }
  throw ConfigError("unknown boundary kind '" + boundary + "' (sphere, torus)");
}

std::vector<double> ExperimentConfig::E_grid() const {
  std::vector<double> grid;
  if (E_count == 1) return {E_max};
  const double r = std::log(E_min / E_max) / (E_count - 1);
  for (int i = 0; i < E_count; ++i) grid.push_back(i + 1 == E_count ? E_min : E_max * std::exp(r * i));
  return grid;
}

void ExperimentConfig::validate() const {
  if (!(E_max > 0.0) || !(E_min > 0.0)) throw ConfigError("E grid must be positive");
  if (E_count < 1) throw ConfigError("E_count must be >= 1");
  if (E_count > 1 && !(E_min < E_max)) throw ConfigError("E grid must be strictly decreasing (E_min < E_max)");
  if (bcs.empty()) throw ConfigError("at least one boundary condition is required");
  if (precision != "auto" && precision != "exact" && precision != "log") {
    throw ConfigError("precision must be auto, exact or log");
  }
  if (fit_level < 1) throw ConfigError("fit_level must be >= 1");
  if (workers < 0) throw ConfigError("workers must be >= 0");
  try {
    (void)spec().rho0();
    (void)boundary_spectrum();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

ExperimentConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  static const std::map<std::string, std::set<std::string>> allowed = {
      {"potential", {"family", "c", "delta", "N", "a", "eps", "rho0"}},
      {"boundary", {"kind", "n", "lengths"}},
      {"sweep", {"bc", "E_max", "E_min", "E_count", "precision"}},
      {"output", {"csv", "svg", "workers", "timing", "fit_level"}},
  };
  ExperimentConfig cfg;
  for (const auto& [section, body] : tree) {
    const auto it = allowed.find(section);
    if (it == allowed.end()) {
      if (body.empty()) throw ConfigError("key outside any section: '" + section + "'");
      throw ConfigError("unknown section [" + section + "]");
    }
    for (const auto& [key, node] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
      const std::string v = boost::algorithm::trim_copy(node.data());
      if (section == "potential") {
        if (key == "family") cfg.family = v;
        else if (key == "c") cfg.c = parse_double(v);
        else if (key == "delta") cfg.delta = parse_double(v);
        else if (key == "N") cfg.N = static_cast<int>(parse_long(v));
        else if (key == "a") cfg.a = parse_double(v);
        else if (key == "eps") cfg.eps = parse_double(v);
        else if (key == "rho0") cfg.rho0 = parse_double(v);
      } else if (section == "boundary") {
        if (key == "kind") cfg.boundary = v;
        else if (key == "n") cfg.n = static_cast<int>(parse_long(v));
        else if (key == "lengths") {
          std::vector<std::string> parts;
          boost::algorithm::split(parts, v, boost::is_any_of(","));
          cfg.lengths.clear();
          for (auto& p : parts) cfg.lengths.push_back(parse_double(boost::algorithm::trim_copy(p)));
        }
      } else if (section == "sweep") {
        if (key == "bc") cfg.bcs = parse_bc_list(v);
        else if (key == "E_max") cfg.E_max = parse_double(v);
        else if (key == "E_min") cfg.E_min = parse_double(v);
        else if (key == "E_count") cfg.E_count = static_cast<int>(parse_long(v));
        else if (key == "precision") cfg.precision = v;
      } else if (section == "output") {
        if (key == "csv") cfg.csv_path = v;
        else if (key == "svg") cfg.svg_path = v;
        else if (key == "workers") cfg.workers = static_cast<int>(parse_long(v));
        else if (key == "timing") cfg.timing = parse_bool(v);
        else if (key == "fit_level") cfg.fit_level = static_cast<int>(parse_long(v));
      }
    }
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

int resolve_workers(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("AHCOUNT_WORKERS")) {
    try {
      const long v = parse_long(env);
      if (v > 0) return static_cast<int>(v);
    } catch (const ConfigError&) {
    }
    throw ConfigError(std::string("AHCOUNT_WORKERS must be a positive integer, got '") + env + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// ---------------------------------------------------------------- CSV

std::string csv_header() {
  return "schema,family,c,delta,N,cN,a,eps,rho0,boundary,n,bc,E,log10_NE,Z0,breakpoints,log10_mu_upper,probes,ms,"
         "flags";
}

std::string to_csv_line(const SweepRow& r) {
  std::ostringstream os;
  os << kCsvSchema << ',' << r.family << ',' << format_double(r.c) << ',' << format_double(r.delta) << ',' << r.N
     << ',' << format_double(r.cN) << ',' << format_double(r.a) << ',' << format_double(r.eps) << ','
     << format_double(r.rho0) << ',' << r.boundary << ',' << r.n << ',' << to_string(r.bc) << ','
     << format_double(r.E) << ',' << format_double(r.log10_NE) << ',' << r.Z0 << ',' << r.breakpoints << ','
     << format_double(r.log10_mu_upper) << ',' << r.probes << ',' << r.ms << ',';
  std::vector<std::string> clean;
  for (const auto& f : r.flags) clean.push_back(sanitize_flag(f));
  os << join_flags(clean);
  return os.str();
}

SweepRow parse_csv_line(const std::string& line) {
  std::vector<std::string> f;
  std::size_t start = 0;
  for (int i = 0; i < 19; ++i) {
    const std::size_t at = line.find(',', start);
    if (at == std::string::npos) throw ConfigError("CSV row has too few fields: " + line);
    f.push_back(line.substr(start, at - start));
    start = at + 1;
  }
  f.push_back(line.substr(start));
  if (f[0] != kCsvSchema) throw ConfigError("unknown CSV schema '" + f[0] + "'");
  SweepRow r;
  r.family = f[1];
  r.c = parse_double(f[2]);
  r.delta = parse_double(f[3]);
  r.N = static_cast<int>(parse_long(f[4]));
  r.cN = parse_double(f[5]);
  r.a = parse_double(f[6]);
  r.eps = parse_double(f[7]);
  r.rho0 = parse_double(f[8]);
  r.boundary = f[9];
  r.n = static_cast<int>(parse_long(f[10]));
  r.bc = parse_bc(f[11]);
  r.E = parse_double(f[12]);
  r.log10_NE = parse_double(f[13]);
  r.Z0 = parse_long(f[14]);
  r.breakpoints = parse_long(f[15]);
  r.log10_mu_upper = parse_double(f[16]);
  r.probes = parse_long(f[17]);
  r.ms = parse_long(f[18]);
  r.flags = split_flags(f[19]);
  return r;
}

void write_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << csv_header() << '\n';
  for (const auto& r : rows) out << to_csv_line(r) << '\n';
}

std::vector<SweepRow> read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty CSV");
  if (line != csv_header()) throw ConfigError("unexpected CSV header");
  std::vector<SweepRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(parse_csv_line(line));
  }
  return rows;
}

// ---------------------------------------------------------------- sweep

std::vector<SweepRow> run_sweep(const ExperimentConfig& config) {
  config.validate();
  const PotentialSpec spec = config.spec();
  const BoundarySpectrum boundary = config.boundary_spectrum();
  const std::vector<double> grid = config.E_grid();

  SweepRow base;
  base.family = config.family;
  base.c = config.c;
  base.delta = spec.family() == Family::PowerLaw ? config.delta : 0.0;
  base.N = spec.log_depth();
  base.cN = spec.family() == Family::IteratedLog ? config.c : 0.0;
  base.a = config.a;
  base.eps = config.a != 0.0 ? config.eps : 0.0;
  base.rho0 = spec.rho0();
  base.boundary = config.boundary;
  base.n = config.n;

  const std::size_t nb = config.bcs.size();
  std::vector<SweepRow> rows(grid.size() * nb, base);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= rows.size()) return;
      SweepRow& row = rows[i];
      row.E = grid[i / nb];
      row.bc = config.bcs[i % nb];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const CountResult res = assemble_count(spec, boundary, row.E, row.bc);
        row.log10_NE = res.N_E.log10();
        row.Z0 = res.Z0;
        row.breakpoints = static_cast<long>(res.breakpoints.size());
        row.log10_mu_upper = res.cutoff.log10_mu_upper();
        row.probes = res.probes;
        for (const auto& f : res.flags) row.flags.push_back(sanitize_flag(f));
        if (config.precision == "exact" && !res.exact) row.flags.push_back("not exact");
        if (res.N_E.log10_error() > 0.0) {
          row.flags.push_back("log10 error " + format_double(res.N_E.log10_error()));
        }
      } catch (const std::exception& e) {
        row.log10_NE = kNaN;
        row.flags.push_back(sanitize_flag(std::string("error: ") + e.what()));
      }
      if (config.timing) {
        row.ms = static_cast<long>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                       std::chrono::steady_clock::now() - t0)
                                       .count());
      }
    }
  };
  const int workers = std::min<int>(resolve_workers(config.workers), static_cast<int>(rows.size()));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  if (!config.csv_path.empty()) {
    std::ofstream out(config.csv_path, std::ios::binary);
    if (!out) throw ConfigError("cannot write CSV '" + config.csv_path + "'");
    write_csv(out, rows);
  }
  if (!config.svg_path.empty()) render_svg(rows, config.svg_path, config.fit_level);
  return rows;
}

// ---------------------------------------------------------------- fits

std::optional<std::pair<double, double>> fit_point(const SweepRow& row, int level) {
  if (!(row.E > 0.0) || std::isnan(row.log10_NE) || std::isinf(row.log10_NE)) return std::nullopt;
  const double x = iterated_log_from_log(-std::log(row.E), level - 1);
  const double y = iterated_log_from_log(row.log10_NE * std::numbers::ln10, level);
  if (!std::isfinite(x) || !std::isfinite(y)) return std::nullopt;
  return std::make_pair(x, y);
}

SlopeFit fit_iterated_log_slope(const std::vector<SweepRow>& rows, int level) {
  if (level < 1) throw std::invalid_argument("fit_iterated_log_slope: level must be >= 1");
  std::vector<double> xs, ys;
  SlopeFit fit;
  for (const auto& r : rows) {
    if (auto p = fit_point(r, level)) {
      xs.push_back(p->first);
      ys.push_back(p->second);
    } else {
      ++fit.dropped;
    }
  }
  fit.used = static_cast<int>(xs.size());
  if (fit.used < 4) {
    throw InsufficientData("slope fit needs >= 4 rows with defined iterated logs, got " + std::to_string(fit.used));
  }
  const double n = fit.used;
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < fit.used; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < fit.used; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw InsufficientData("slope fit needs distinct E values");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  for (int i = 0; i < fit.used; ++i) {
    const double e = ys[i] - fit.intercept - fit.slope * xs[i];
    ss += e * e;
  }
  fit.stderr_slope = std::sqrt(ss / (n - 2.0) / sxx);
  return fit;
}

bool eventually_constant(const std::vector<SweepRow>& rows) {
  std::map<BoundaryCondition, std::vector<const SweepRow*>> by_bc;
  for (const auto& r : rows) by_bc[r.bc].push_back(&r);
  if (by_bc.empty()) return false;
  for (auto& [bc, list] : by_bc) {
    std::stable_sort(list.begin(), list.end(), [](const SweepRow* a, const SweepRow* b) { return a->E > b->E; });
    const std::size_t from = list.size() / 2;
    for (std::size_t i = from; i < list.size(); ++i) {
      if (std::isnan(list[i]->log10_NE) || list[i]->log10_NE != list[from]->log10_NE) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- SVG

std::string svg_document(const std::vector<SweepRow>& rows, int level) {
  if (rows.size() < 2) throw std::invalid_argument("render_svg: needs at least 2 rows");
  struct P {
    double x, y;
    BoundaryCondition bc;
  };
  std::vector<P> pts;
  for (const auto& r : rows) {
    if (auto p = fit_point(r, level)) pts.push_back({p->first, p->second, r.bc});
  }
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!pts.empty()) {
    x0 = x1 = pts[0].x;
    y0 = y1 = pts[0].y;
    for (const auto& p : pts) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
  }
  const double padx = std::max(1e-9, 0.05 * (x1 - x0)) + (x1 == x0 ? 0.5 : 0.0);
  const double pady = std::max(1e-9, 0.05 * (y1 - y0)) + (y1 == y0 ? 0.5 : 0.0);
  x0 -= padx;
  x1 += padx;
  y0 -= pady;
  y1 += pady;
  constexpr double W = 640, H = 480, ml = 70, mr = 20, mt = 30, mb = 60;
  auto sx = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
  auto sy = [&](double y) { return H - mb - (y - y0) / (y1 - y0) * (H - mt - mb); };
  std::ostringstream os;
  os << std::setprecision(6);
  const std::string xlab = level == 1 ? "1/E" : level == 2 ? "log(1/E)" : "log_(" + std::to_string(level - 1) + ")(1/E)";
  const std::string ylab = level == 1 ? "log N_E" : "log_(" + std::to_string(level) + ") N_E";
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
     << ' ' << H << "\">\n"
     << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n"
     << "<line class=\"axis\" x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\"" << H - mb
     << "\" stroke=\"black\"/>\n"
     << "<line class=\"axis\" x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
     << "\" stroke=\"black\"/>\n"
     << "<text class=\"xlabel\" x=\"" << (W + ml - mr) / 2 << "\" y=\"" << H - 15
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << xlab << "</text>\n"
     << "<text class=\"ylabel\" x=\"18\" y=\"" << (H - mb + mt) / 2 << "\" transform=\"rotate(-90 18 "
     << (H - mb + mt) / 2 << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" << ylab
     << "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4.0;
    const double yv = y0 + (y1 - y0) * i / 4.0;
    os << "<text x=\"" << sx(xv) << "\" y=\"" << H - mb + 18 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       << "font-size=\"11\">" << xv << "</text>\n"
       << "<text x=\"" << ml - 6 << "\" y=\"" << sy(yv) + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
       << "font-size=\"11\">" << yv << "</text>\n";
  }
  if (pts.size() >= 2) {
    double mx = 0, my = 0;
    for (const auto& p : pts) {
      mx += p.x;
      my += p.y;
    }
    mx /= pts.size();
    my /= pts.size();
    double sxx = 0, sxy = 0;
    for (const auto& p : pts) {
      sxx += (p.x - mx) * (p.x - mx);
      sxy += (p.x - mx) * (p.y - my);
    }
    if (sxx > 0) {
      const double b = sxy / sxx;
      const double a = my - b * mx;
      os << "<line class=\"fit\" x1=\"" << sx(x0) << "\" y1=\"" << sy(a + b * x0) << "\" x2=\"" << sx(x1)
         << "\" y2=\"" << sy(a + b * x1) << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/>\n"
         << "<text class=\"slope\" x=\"" << ml + 10 << "\" y=\"" << mt + 14
         << "\" font-family=\"sans-serif\" font-size=\"12\">slope " << b << "</text>\n";
    }
  }
  for (const auto& p : pts) {
    os << "<circle class=\"data\" cx=\"" << sx(p.x) << "\" cy=\"" << sy(p.y) << "\" r=\"4\" fill=\""
       << (p.bc == BoundaryCondition::Dirichlet ? "#1f77b4" : "#d62728") << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void render_svg(const std::vector<SweepRow>& rows, const std::string& path, int level) {
  const std::string doc = svg_document(rows, level);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("render_svg: cannot write '" + path + "'");
  out << doc;
  if (!out) throw std::runtime_error("render_svg: write failed for '" + path + "'");
}

// ---------------------------------------------------------------- oracle check

std::vector<OracleInstance> random_oracle_instances(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto uni = [&rng](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  auto log_uni = [&](double lo, double hi) { return std::exp(uni(std::log(lo), std::log(hi))); };
  std::vector<OracleInstance> out;
  while (out.size() < count) {
    OracleInstance inst{PotentialSpec::critical(1.0), 0.0, 0.1, BoundaryCondition::Dirichlet, ""};
    const int fam = static_cast<int>(uni(0.0, 3.0));
    std::ostringstream label;
    double E_lo = 1e-3, E_hi = 0.5;
    if (fam == 0) {
      const double c = uni(0.5, 2.5);
      const double d = uni(0.0, 1.0) < 0.2 ? uni(-1.5, -0.3) : uni(0.3, 1.5);
      inst.spec = PotentialSpec::power_law(c, d);
      label << "power-law c=" << c << " delta=" << d;
      E_lo = std::max(1e-3, c * std::pow(150.0, d - 2.0));
    } else if (fam == 1) {
      const double c = uni(0.05, 4.0);
      inst.spec = PotentialSpec::critical(c);
      label << "critical c=" << c;
      E_lo = std::max(1e-4, c / (150.0 * 150.0));
    } else {
      const double c = uni(0.3, 3.0);
      inst.spec = PotentialSpec::iterated_log(1, c);
      label << "iterated-log N=1 c1=" << c;
      E_lo = 1e-6;
      E_hi = 1e-2;
    }
    if (uni(0.0, 1.0) < 0.4) {
      const double a = uni(-0.3, 0.3);
      const double eps = uni(0.5, 2.0);
      inst.spec = inst.spec.with_perturbation(a, eps);
      label << " a=" << a << " eps=" << eps;
    }
    if (uni(0.0, 1.0) < 0.25) {
      const double bs = uni(0.0, 1.0);
      const double xs = uni(0.0, 0.5);
      const double floor = rho0_floor(inst.spec);
      inst.spec = inst.spec.with_B({[bs](double r) { return bs * std::sin(r); }, bs})
                      .with_X({[xs](double r) { return xs * std::cos(2.0 * r); }, xs})
                      .with_rho0(std::max(floor, 3.0));
      label << " B=" << bs << "sin X=" << xs << "cos2";
    }
    inst.zeta = uni(0.0, 1.0) < 0.3 ? 0.0 : std::exp(uni(0.0, 12.0));
    inst.E = log_uni(E_lo, E_hi);
    inst.bc = uni(0.0, 1.0) < 0.5 ? BoundaryCondition::Dirichlet : BoundaryCondition::Neumann;
    try {
      const double rho0 = inst.spec.rho0();
      const TruncationInterval ti = truncation_interval(inst.spec, inst.zeta, inst.E);
      if (!(ti.rho_stop - rho0 <= 300.0)) continue;
    } catch (const std::exception&) {
      continue;
    }
    label << " zeta=" << inst.zeta << " E=" << inst.E << " bc=" << to_string(inst.bc);
    inst.label = label.str();
    out.push_back(std::move(inst));
  }
  return out;
}

OracleComparison compare_with_oracle(const OracleInstance& inst, double h) {
  OracleComparison cmp;
  const ZResult z = prufer_count(RadialProblem(inst.spec, inst.zeta, inst.E, inst.bc), StopRule::certified());
  cmp.Z = z.Z;
  cmp.ambiguous = z.ambiguous;
  cmp.note = z.note;
  cmp.rho_stop = z.rho_stop;
  const double rho0 = inst.spec.rho0();
  double end = std::max(z.rho_stop, std::isfinite(z.rho_end) ? z.rho_end : z.rho_stop);
  cmp.L = std::max(end + 2.0, rho0 + 1.0);
  cmp.h = h;
  const TridiagonalOperator T =
      fd_tridiagonal(inst.spec, inst.zeta, cmp.L, h, inst.bc, BoundaryCondition::Dirichlet, NeumannOrder::Second);
  const InertiaResult ir = inertia_below(T, -inst.E);
  cmp.oracle = ir.count;
  cmp.oracle_ambiguous = ir.ambiguous;
  cmp.match = cmp.oracle == cmp.Z;
  return cmp;
}

}  // namespace ahc
