#pragma once

#include <cmath>

namespace ahc {

/// Second-order forward-mode jet: value, first and second derivative with
/// respect to a single variable.
struct Jet {
  double v = 0.0;
  double d = 0.0;
  double dd = 0.0;

  static Jet variable(double x) { return {x, 1.0, 0.0}; }
  static Jet constant(double x) { return {x, 0.0, 0.0}; }
};

inline Jet operator+(Jet a, Jet b) { return {a.v + b.v, a.d + b.d, a.dd + b.dd}; }
inline Jet operator-(Jet a, Jet b) { return {a.v - b.v, a.d - b.d, a.dd - b.dd}; }
inline Jet operator-(Jet a) { return {-a.v, -a.d, -a.dd}; }
inline Jet operator*(Jet a, Jet b) {
  return {a.v * b.v, a.d * b.v + a.v * b.d, a.dd * b.v + 2.0 * a.d * b.d + a.v * b.dd};
}
inline Jet operator*(double s, Jet a) { return {s * a.v, s * a.d, s * a.dd}; }
inline Jet operator*(Jet a, double s) { return s * a; }
inline Jet operator+(Jet a, double s) { return {a.v + s, a.d, a.dd}; }
inline Jet operator+(double s, Jet a) { return a + s; }
inline Jet operator-(Jet a, double s) { return {a.v - s, a.d, a.dd}; }
inline Jet operator-(double s, Jet a) { return {s - a.v, -a.d, -a.dd}; }

// Chain rule for a scalar function with value f0, slope f1, curvature f2 at a.v.
inline Jet compose(Jet a, double f0, double f1, double f2) {
  return {f0, f1 * a.d, f2 * a.d * a.d + f1 * a.dd};
}

inline Jet operator/(Jet a, Jet b) {
  const double inv = 1.0 / b.v;
  const Jet rb = compose(b, inv, -inv * inv, 2.0 * inv * inv * inv);
  return a * rb;
}
inline Jet operator/(Jet a, double s) { return {a.v / s, a.d / s, a.dd / s}; }
inline Jet operator/(double s, Jet b) { return Jet::constant(s) / b; }

inline Jet log(Jet a) { return compose(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v)); }
inline Jet exp(Jet a) {
  const double e = std::exp(a.v);
  return compose(a, e, e, e);
}
inline Jet pow(Jet a, double p) {
  const double f0 = std::pow(a.v, p);
  const double f1 = p * std::pow(a.v, p - 1.0);
  const double f2 = p * (p - 1.0) * std::pow(a.v, p - 2.0);
  return compose(a, f0, f1, f2);
}

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.v; }

}  // namespace ahc
