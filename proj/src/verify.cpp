#include "fracheat/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fracheat/core.hpp"
#include "fracheat/fit.hpp"
#include "fracheat/gauss_rules.hpp"
#include "fracheat/parallel.hpp"
#include "fracheat/special.hpp"

namespace fracheat {

const char* to_string(RayFamily f) {
  switch (f) {
    case RayFamily::space_axis: return "space_axis";
    case RayFamily::time_axis_negative: return "time_axis_negative";
    case RayFamily::time_axis_positive: return "time_axis_positive";
    case RayFamily::parabola: return "parabola";
  }
  return "?";
}

const char* to_string(ReductionKind k) {
  switch (k) {
    case ReductionKind::space_to_fraclap: return "space_to_fraclap";
    case ReductionKind::time_to_marchaud: return "time_to_marchaud";
    case ReductionKind::s_to_one: return "s_to_one";
  }
  return "?";
}

RaySpec RaySpec::geometric(RayFamily family, double first, double ratio, int count) {
  RaySpec r;
  r.family = family;
  for (int k = 0; k < count; ++k) r.magnitudes.push_back(first * std::pow(ratio, k));
  return r;
}

void RaySpec::validate() const {
  if (magnitudes.size() < 4) throw InvalidArgument("a ray needs at least 4 samples");
  const auto [lo, hi] = std::minmax_element(magnitudes.begin(), magnitudes.end());
  if (!(*lo > 0.0) || *hi / *lo < 100.0 * (1.0 - 1e-12))
    throw InvalidArgument("ray samples must be positive and span two decades");
}

SpaceTimePoint RaySpec::point(double m) const {
  SpaceTimePoint p{anchor, anchor_t};
  switch (family) {
    case RayFamily::space_axis: p.x[0] += m; break;
    case RayFamily::time_axis_negative: p.t -= m; break;
    case RayFamily::time_axis_positive: p.t += m; break;
    case RayFamily::parabola:
      p.x = {std::sqrt(m), 0.0, 0.0};
      p.t = -m;
      break;
  }
  return p;
}

namespace {

double weight(const SpaceTimePoint& p, int n, double s) {
  double r2 = 0.0;
  for (int d = 0; d < n; ++d) r2 += p.x[d] * p.x[d];
  return 1.0 + std::pow(r2, 0.5 * (n + 2.0 + 2.0 * s)) + std::pow(std::abs(p.t), 0.5 * n + 1.0 + s);
}

// Values below this are treated as lost to underflow.
constexpr double kUnderflow = 1e-280;

}  // namespace

std::vector<DecayReport> decay_estimate_check(const Field& phi, const OperatorParams& params,
                                              const std::vector<RaySpec>& rays, double tolerance) {
  params.validate();
  const int n = params.n;
  const double s = params.s.value();
  std::vector<DecayReport> out;
  for (const auto& ray : rays) {
    ray.validate();
    DecayReport rep;
    rep.ray = ray;
    rep.tolerance = tolerance;
    rep.target_exponent =
        ray.family == RayFamily::space_axis ? n + 2.0 + 2.0 * s : 0.5 * n + 1.0 + s;
    std::vector<SpaceTimePoint> pts;
    for (double m : ray.magnitudes) pts.push_back(ray.point(m));
    const auto res = apply_batch(phi, pts, params, Side::right);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      rep.values.push_back(std::abs(res[i].value));
      rep.weighted.push_back(rep.values.back() * weight(pts[i], n, s));
    }
    if (std::all_of(rep.values.begin(), rep.values.end(), [](double v) { return v == 0.0; })) {
      rep.degenerate = true;
      rep.pass = true;
      rep.upper_bound_ok = true;
      out.push_back(rep);
      continue;
    }
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < rep.values.size(); ++i) {
      if (!(rep.values[i] > kUnderflow)) break;
      xs.push_back(ray.magnitudes[i]);
      ys.push_back(rep.values[i]);
    }
    if (xs.size() < 2 || xs.back() / xs.front() < 100.0 * (1.0 - 1e-12))
      throw InsufficientDynamicRange(std::string("operator values on the ") + to_string(ray.family) +
                                     " ray underflow before spanning two decades");
    rep.fitted_exponent = loglog_slope(xs, ys);
    rep.upper_bound_ok = rep.fitted_exponent <= -rep.target_exponent + tolerance;
    rep.pass = std::abs(rep.fitted_exponent + rep.target_exponent) <= tolerance;
    out.push_back(rep);
  }
  return out;
}

double bump_far_right(const AnalyticField& bump, const Point& x, double t, int n, FracOrder s,
                      int nodes) {
  if (bump.kind() != FieldKind::bump) throw InvalidArgument("bump_far_right needs a bump field");
  const auto window = bump.time_window();
  if (!(t < window->lo)) throw InvalidArgument("bump_far_right needs t below the bump's support");
  const double t0 = bump.t0(), t1 = bump.param("t1"), t2 = bump.param("t2");
  // Panels follow the plateau structure: collars of [t1, t2] and the core [-t1, t1].
  std::vector<double> breaks;
  for (int k = 0; k <= 4; ++k) breaks.push_back(t0 - t2 + (t2 - t1) * k / 4.0);
  breaks.push_back(t0);
  for (int k = 0; k <= 4; ++k) breaks.push_back(t0 + t1 + (t2 - t1) * k / 4.0);
  const auto rule = bump.spatial_rule(n, nodes);
  const double q = 0.5 * n + 1.0 + s.value();
  double acc = 0.0;
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    const Rule tr = legendre_on(breaks[b], breaks[b + 1], 12);
    for (std::size_t k = 0; k < tr.size(); ++k) {
      const double tau = tr.nodes[k];
      const double dt = tau - t;
      const double pre = tr.weights[k] * std::pow(dt, -q);
      for (std::size_t j = 0; j < rule->nodes.size(); ++j) {
        const Point& y = rule->nodes[j];
        double r2 = 0.0;
        for (int d = 0; d < n; ++d) r2 += (x[d] - y[d]) * (x[d] - y[d]);
        acc += pre * rule->weights[j] * std::exp(-r2 / (4.0 * dt)) * bump.value(y, tau);
      }
    }
  }
  return -normalization_C(n, s) * acc;
}

CounterexampleReport counterexample_sharpness(int n, FracOrder s, const AnalyticField& bump,
                                              const std::vector<double>& times, double slope_tol) {
  checked_dimension(n);
  if (times.size() < 2) throw InvalidArgument("counterexample needs two or more sample times");
  CounterexampleReport rep;
  auto& par = rep.parabola;
  par.ray.family = RayFamily::parabola;
  par.tolerance = slope_tol;
  par.target_exponent = 0.5 * n + 1.0 + s.value();
  OperatorParams params;
  params.n = n;
  params.s = s;
  std::vector<double> mags;
  for (double t : times) {
    if (!(t < 0.0)) throw InvalidArgument("counterexample times must be negative");
    mags.push_back(-t);
  }
  par.ray.magnitudes = mags;
  for (double m : mags) {
    const SpaceTimePoint p = par.ray.point(m);
    const double v = bump_far_right(bump, p.x, p.t, n, s);
    const double check = apply_right(bump, p.x, p.t, params).value;
    rep.method_gap = std::max(rep.method_gap, std::abs(v - check) / std::abs(v));
    par.values.push_back(std::abs(v));
    par.weighted.push_back(std::abs(v) * weight(p, n, s.value()));
  }
  par.lower_bound_ratio_min = *std::min_element(par.weighted.begin(), par.weighted.end());
  par.trend_slope = loglog_slope(mags, par.weighted);
  par.fitted_exponent = loglog_slope(mags, par.values);
  par.upper_bound_ok = par.fitted_exponent <= -par.target_exponent + 0.15;
  par.pass = *par.lower_bound_ratio_min > 0.0 && std::abs(*par.trend_slope) <= slope_tol;

  // Control along |x| = |t|: the kernel's Gaussian factor e^{-|t|/4} wins.
  rep.control_decays = true;
  for (double m : mags) {
    const SpaceTimePoint p{{m, 0.0, 0.0}, -m};
    const double v = std::abs(bump_far_right(bump, p.x, p.t, n, s));
    rep.control_times.push_back(-m);
    rep.control_weighted.push_back(v * weight(p, n, s.value()));
    const std::size_t k = rep.control_weighted.size();
    if (k > 1 && !(rep.control_weighted[k - 1] < rep.control_weighted[k - 2]))
      rep.control_decays = false;
  }
  rep.control_decays =
      rep.control_decays && rep.control_weighted.back() < 1e-3 * *par.lower_bound_ratio_min;
  rep.pass = par.pass && rep.control_decays;
  return rep;
}

// ---------------------------------------------------------------------------
// One-dimensional reference operators

namespace {

constexpr double kTaylorCut = 1e-3;
constexpr double kReach = 4000.0;

// Graded Legendre panels on [a, b]: width min(ratio growth, cap).
template <class F>
double graded(F&& f, double a, double b, double cap, int nodes) {
  const Rule& r = cached_legendre(nodes);
  double acc = 0.0;
  while (a < b) {
    double next = std::min(a + std::min(a, cap), b);
    const double half = 0.5 * (next - a), mid = 0.5 * (next + a);
    for (std::size_t k = 0; k < r.size(); ++k) acc += half * r.weights[k] * f(mid + half * r.nodes[k]);
    a = next;
  }
  return acc;
}

}  // namespace

double fractional_laplacian_1d(const Field& u, double x, double t, FracOrder s) {
  if (u.is_constant()) return 0.0;
  const double sv = s.value();
  const double c = std::pow(4.0, sv) * special::gamma(0.5 + sv) /
                   (std::sqrt(std::numbers::pi) * std::abs(special::gamma(-sv)));
  const Point p{x, 0.0, 0.0};
  const double u0 = u.value(p, t);
  // Below kTaylorCut: 2u(x) - u(x+h) - u(x-h) = -u''(x) h^2 + O(h^4).
  const double near = -u.laplacian(p, t, 1) * std::pow(kTaylorCut, 2.0 - 2.0 * sv) / (2.0 - 2.0 * sv);
  const double cap = std::isfinite(u.space_scale()) ? 0.5 * u.space_scale() : 1.0;
  const double mid = graded(
      [&](double h) {
        return (2.0 * u0 - u.value({x + h, 0.0, 0.0}, t) - u.value({x - h, 0.0, 0.0}, t)) *
               std::pow(h, -1.0 - 2.0 * sv);
      },
      kTaylorCut, kReach, cap, 12);
  // Beyond the reach only the 2u(x) part is kept; the rest decays or oscillates.
  const double tail = 2.0 * u0 * std::pow(kReach, -2.0 * sv) / (2.0 * sv);
  return c * (near + mid + tail);
}

double marchaud_caputo_1d(const Field& u, const Point& x, double t, FracOrder s) {
  if (u.is_constant()) return 0.0;
  const double sv = s.value();
  const double cap = std::isfinite(u.time_scale()) ? 0.5 * u.time_scale() : 1.0;
  const double h0 = std::min(cap, 1.0);
  // Weak singularity tau^{-s} on the first panel goes into a Gauss-Jacobi rule.
  const Rule jac = left_singular_on(0.0, h0, -sv, 16);
  double acc = 0.0;
  for (std::size_t k = 0; k < jac.size(); ++k)
    acc += jac.weights[k] * u.time_derivative(x, t - jac.nodes[k]);
  acc += graded([&](double tau) { return u.time_derivative(x, t - tau) * std::pow(tau, -sv); }, h0,
                kReach, cap, 12);
  // int_H^inf u'(t-tau) tau^{-s} = u(t-H) H^{-s} - s int_H^inf u(t-tau) tau^{-1-s}; the last
  // term is O(H^{-1-s}) for oscillating or decaying histories and is dropped.
  acc += u.value(x, t - kReach) * std::pow(kReach, -sv);
  return acc / special::gamma(1.0 - sv);
}

ReductionReport reduction_check(ReductionKind kind, const AnalyticField& field,
                                const OperatorParams& params,
                                const std::vector<SpaceTimePoint>& points) {
  params.validate();
  ReductionReport rep;
  rep.kind = kind;
  const FieldKind fk = field.kind();
  const auto& xi = field.xi();
  auto param_or = [&](const char* key, double dflt) {
    try {
      return field.param(key);
    } catch (const InvalidArgument&) {
      return dflt;
    }
  };

  if (kind == ReductionKind::space_to_fraclap || kind == ReductionKind::time_to_marchaud) {
    if (params.n != 1) throw InvalidArgument("reductions are checked in one space dimension");
    const bool space = kind == ReductionKind::space_to_fraclap;
    bool ok = fk == FieldKind::constant;
    if (fk == FieldKind::coswave) ok = space ? field.rho() == 0.0 : xi[0] == 0.0;
    if (fk == FieldKind::schwartz_product)
      ok = space ? param_or("b", 1.0) == 0.0 : param_or("a", 1.0) == 0.0;
    if (!ok)
      throw InvalidArgument(std::string("field ") + field.to_string() + " is not " +
                            (space ? "time" : "space") + "-independent");
    for (const auto& p : points) {
      rep.operator_values.push_back(apply_left(field, p.x, p.t, params).value);
      rep.reference_values.push_back(space ? fractional_laplacian_1d(field, p.x[0], p.t, params.s)
                                           : marchaud_caputo_1d(field, p.x, p.t, params.s));
      rep.orders.push_back(params.s.value());
    }
  } else {
    for (double s : {0.9, 0.95, 0.99}) {
      OperatorParams q = params;
      q.s = FracOrder(s);
      for (const auto& p : points) {
        rep.operator_values.push_back(apply_left(field, p.x, p.t, q).value);
        rep.reference_values.push_back(field.time_derivative(p.x, p.t) -
                                       field.laplacian(p.x, p.t, q.n));
        rep.orders.push_back(s);
      }
    }
  }

  double scale = 0.0;
  for (double r : rep.reference_values) scale = std::max(scale, std::abs(r));
  for (std::size_t i = 0; i < rep.operator_values.size(); ++i) {
    const double d = std::abs(rep.operator_values[i] - rep.reference_values[i]);
    rep.errors.push_back(scale > 0.0 ? d / scale : d);
    rep.max_relative_error = std::max(rep.max_relative_error, rep.errors.back());
  }
  if (kind == ReductionKind::s_to_one) {
    // Errors per order, maximised over points; they must shrink as s -> 1.
    const std::size_t m = points.size();
    double prev = kInf;
    for (std::size_t k = 0; k < 3 && m > 0; ++k) {
      const double e = *std::max_element(rep.errors.begin() + k * m, rep.errors.begin() + (k + 1) * m);
      if (!(e < prev)) rep.monotone = false;
      prev = e;
    }
    rep.max_relative_error =
        m > 0 ? *std::max_element(rep.errors.end() - m, rep.errors.end()) : 0.0;
  }
  return rep;
}

}  // namespace fracheat
