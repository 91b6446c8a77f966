#pragma once

#include <cmath>

namespace fracheat {

/// Univariate second-order jet: value with first and second derivative.
struct Jet2 {
  double v = 0.0, d1 = 0.0, d2 = 0.0;

  static Jet2 variable(double x) { return {x, 1.0, 0.0}; }
  static Jet2 constant(double c) { return {c, 0.0, 0.0}; }
};

inline Jet2 operator+(Jet2 a, Jet2 b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
inline Jet2 operator-(Jet2 a, Jet2 b) { return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2}; }
inline Jet2 operator-(double a, Jet2 b) { return {a - b.v, -b.d1, -b.d2}; }
inline Jet2 operator*(double a, Jet2 b) { return {a * b.v, a * b.d1, a * b.d2}; }
inline Jet2 operator*(Jet2 a, Jet2 b) {
  return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}
inline Jet2 operator/(Jet2 a, Jet2 b) {
  const double q = a.v / b.v;
  const double q1 = (a.d1 - q * b.d1) / b.v;
  const double q2 = (a.d2 - 2.0 * q1 * b.d1 - q * b.d2) / b.v;
  return {q, q1, q2};
}
inline Jet2 exp(Jet2 a) {
  const double e = std::exp(a.v);
  return {e, e * a.d1, e * (a.d2 + a.d1 * a.d1)};
}

/// C-infinity step rising from 0 (u <= 0) to 1 (u >= 1).
inline Jet2 smooth_step(Jet2 u) {
  if (u.v <= 0.0) return Jet2::constant(0.0);
  if (u.v >= 1.0) return Jet2::constant(1.0);
  // h(u) = exp(-1/u); step = h(u) / (h(u) + h(1-u))
  const Jet2 one = Jet2::constant(1.0);
  const Jet2 hu = exp(Jet2::constant(0.0) - one / u);
  const Jet2 hv = exp(Jet2::constant(0.0) - one / (one - u));
  return hu / (hu + hv);
}

/// C2 quintic smoothstep 6u^5 - 15u^4 + 10u^3, clamped to [0, 1].
inline Jet2 quintic_step(Jet2 u) {
  if (u.v <= 0.0) return Jet2::constant(0.0);
  if (u.v >= 1.0) return Jet2::constant(1.0);
  const double x = u.v;
  const double p = x * x * x * (x * (6.0 * x - 15.0) + 10.0);
  const double p1 = 30.0 * x * x * (x - 1.0) * (x - 1.0);
  const double p2 = 60.0 * x * (x - 1.0) * (2.0 * x - 1.0);
  return {p, p1 * u.d1, p2 * u.d1 * u.d1 + p1 * u.d2};
}

}  // namespace fracheat
