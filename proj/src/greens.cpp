#include "fracheat/greens.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

#include <boost/math/tools/minima.hpp>

#include "fracheat/core.hpp"
#include "fracheat/fit.hpp"
#include "fracheat/gauss_rules.hpp"
#include "fracheat/jet.hpp"
#include "fracheat/parallel.hpp"
#include "fracheat/special.hpp"

namespace fracheat {

GreensKernel GreensKernel::make(int n, FracOrder s) {
  checked_dimension(n);
  return {n, s, normalization_A(n, s)};
}

KernelValue eval_G(const Point& x, double t, const GreensKernel& k) {
  if (t <= 0.0) return {};
  double r2 = 0.0;
  for (int d = 0; d < k.n; ++d) r2 += x[d] * x[d];
  if (r2 == 0.0 && t < kTimeFloor) return {std::numeric_limits<double>::infinity(), true};
  const double q = 0.5 * k.n + 1.0 - k.s.value();
  return {k.A * std::exp(-r2 / (4.0 * t) - q * std::log(t)), false};
}

double space_mass(const GreensKernel& k, double t, int nodes) {
  if (!(t > 0.0)) throw InvalidArgument("space_mass needs t > 0");
  const Rule& h = cached_hermite(nodes);
  const double scale = 2.0 * std::sqrt(t);
  // int G dx = (2 sqrt t)^n int G(2 sqrt t z) dz, with the Hermite weight divided out.
  double acc = 0.0;
  const int m = static_cast<int>(h.size());
  int count = 1;
  for (int d = 0; d < k.n; ++d) count *= m;
  for (int idx = 0; idx < count; ++idx) {
    int rem = idx;
    Point x{0.0, 0.0, 0.0};
    double w = 1.0;
    double z2 = 0.0;
    for (int d = 0; d < k.n; ++d) {
      const int j = rem % m;
      rem /= m;
      x[d] = scale * h.nodes[j];
      w *= h.weights[j];
      z2 += h.nodes[j] * h.nodes[j];
    }
    // G(2 sqrt t z) = A t^{-q} e^{-|z|^2}; dividing by e^{-|z|^2} leaves the constant part.
    acc += w * eval_G(x, t, k).value * std::exp(z2);
  }
  return acc * std::pow(scale, k.n);
}

double cutoff_profile(double r) {
  return 1.0 - quintic_step(Jet2::constant(2.0 * r - 1.0)).v;
}

// ---------------------------------------------------------------------------
// SourceSpec

SourceSpec::SourceSpec(std::shared_ptr<const Field> f, std::optional<double> R)
    : f_(std::move(f)), R_(R) {
  if (!f_) throw InvalidArgument("source field is null");
  if (R_ && !(*R_ > 0.0)) throw InvalidArgument("truncation radius must be positive");
}

double SourceSpec::value(const Point& x, double t) const {
  if (!R_) return f_->value(x, t);
  const double R = *R_;
  const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  if (r >= R || std::abs(t) >= R * R) return 0.0;
  return f_->value(x, t) * cutoff_profile(r / R) * cutoff_profile(std::abs(t) / (R * R));
}

double SourceSpec::time_derivative(const Point& x, double t) const {
  if (!R_) return f_->time_derivative(x, t);
  return fd_time_derivative(*this, x, t, 1e-4 * std::min(1.0, time_scale()));
}

double SourceSpec::laplacian(const Point& x, double t, int n) const {
  if (!R_) return f_->laplacian(x, t, n);
  return fd_laplacian(*this, x, t, n, 1e-4 * std::min(1.0, space_scale()));
}

double SourceSpec::time_scale() const {
  return R_ ? std::min(f_->time_scale(), *R_ * *R_ / 8.0) : f_->time_scale();
}

double SourceSpec::space_scale() const {
  return R_ ? std::min(f_->space_scale(), *R_ / 4.0) : f_->space_scale();
}

std::optional<TimeWindow> SourceSpec::time_window() const {
  auto w = f_->time_window();
  if (!R_) return w;
  const double T = *R_ * *R_;
  if (!w) return TimeWindow{-T, T};
  return TimeWindow{std::max(w->lo, -T), std::min(w->hi, T)};
}

std::shared_ptr<const SpatialRule> SourceSpec::spatial_rule(int n, int nodes) const {
  if (!R_) return f_->spatial_rule(n, nodes);
  std::lock_guard lock(mutex_);
  auto& slot = rules_[{n, nodes}];
  if (slot) return slot;
  const double R = *R_;
  const double width = std::min(R / 4.0, f_->space_scale());
  const int panels = static_cast<int>(std::ceil(2.0 * R / width));
  const int per = std::max(4, nodes / 3);
  std::vector<double> ax, aw;
  for (int p = 0; p < panels; ++p) {
    const Rule r = legendre_on(-R + 2.0 * R * p / panels, -R + 2.0 * R * (p + 1) / panels, per);
    ax.insert(ax.end(), r.nodes.begin(), r.nodes.end());
    aw.insert(aw.end(), r.weights.begin(), r.weights.end());
  }
  auto rule = std::make_shared<SpatialRule>();
  std::size_t count = 1;
  for (int d = 0; d < n; ++d) count *= ax.size();
  for (std::size_t idx = 0; idx < count; ++idx) {
    std::size_t rem = idx;
    Point y{0.0, 0.0, 0.0};
    double w = 1.0, r2 = 0.0;
    for (int d = 0; d < n; ++d) {
      const std::size_t k = rem % ax.size();
      rem /= ax.size();
      y[d] = ax[k];
      w *= aw[k];
      r2 += y[d] * y[d];
    }
    if (r2 >= R * R) continue;
    rule->nodes.push_back(y);
    rule->weights.push_back(w);
  }
  slot = rule;
  return slot;
}

// ---------------------------------------------------------------------------
// Convolution

namespace {

// (1/Gamma(s)) int_base^inf (rho - base)^{s-1} m(rho) drho, m vanishing outside [lo, hi].
template <class M>
double weighted_history(M&& m, double base, double lo, double hi, double s, double time_scale,
                        const OperatorParams& q) {
  double a = std::max(base, lo);
  const double b = hi;
  if (!(b > a)) return 0.0;
  const double hcap = std::isfinite(time_scale) ? 2.0 * time_scale : kInf;
  double acc = 0.0;
  if (a == base) {
    const double h0 = std::min(b - base, std::isfinite(hcap) ? 0.5 * hcap : 1.0);
    const Rule jac = left_singular_on(base, base + h0, s - 1.0, q.n_time_nodes);
    for (std::size_t k = 0; k < jac.size(); ++k) acc += jac.weights[k] * m(jac.nodes[k]);
    a = base + h0;
  }
  const Rule& leg = cached_legendre(q.n_time_nodes);
  while (a < b) {
    const double width = std::min((a - base) * (q.panel_ratio - 1.0), hcap);
    double next = a + width;
    if (next >= b * (1.0 - 1e-12) || next >= b) next = b;
    const double half = 0.5 * (next - a), mid = 0.5 * (next + a);
    for (std::size_t k = 0; k < leg.size(); ++k) {
      const double rho = mid + half * leg.nodes[k];
      acc += half * leg.weights[k] * std::pow(rho - base, s - 1.0) * m(rho);
    }
    a = next;
  }
  return acc / special::gamma(s);
}

TimeWindow require_window(const Field& source) {
  const auto w = source.time_window();
  if (!w || !std::isfinite(w->lo) || !std::isfinite(w->hi))
    throw InvalidArgument("convolution source must vanish outside a bounded time window");
  return *w;
}

double convolve_once(const Field& source, const GreensKernel& k, const Point& x, double t,
                     const OperatorParams& q) {
  if (source.is_constant() && source.value(x, t) == 0.0) return 0.0;
  const TimeWindow w = require_window(source);
  auto m = [&](double rho) {
    return -source.heat_difference(x, t, 0.0, rho, Side::left, k.n, q.n_space_nodes);
  };
  return weighted_history(m, 0.0, t - w.hi, t - w.lo, k.s.value(), source.time_scale(), q);
}

}  // namespace

double convolve(const Field& source, const GreensKernel& kernel, const Point& x, double t,
                const OperatorParams& quad) {
  const double v = convolve_once(source, kernel, x, t, quad);
  if (quad.check_convergence) {
    OperatorParams fine = quad;
    fine.n_time_nodes *= 2;
    fine.n_space_nodes *= 2;
    const double ref = convolve_once(source, kernel, x, t, fine);
    const double tol = std::max(quad.abs_tol, quad.rel_tol * std::abs(ref));
    if (std::abs(ref - v) > tol)
      throw DidNotConverge("convolution changed by " + std::to_string(std::abs(ref - v)) +
                           " under node doubling");
  }
  return v;
}

ConvolvedField::ConvolvedField(std::shared_ptr<const Field> source, GreensKernel kernel,
                               OperatorParams quad)
    : source_(std::move(source)), kernel_(kernel), quad_(quad) {
  if (!source_) throw InvalidArgument("convolved field needs a source");
  quad_.n = kernel_.n;
  quad_.s = kernel_.s;
  quad_.check_convergence = false;
  require_window(*source_);
}

double ConvolvedField::value(const Point& x, double t) const {
  return convolve_once(*source_, kernel_, x, t, quad_);
}

double ConvolvedField::time_derivative(const Point& x, double t) const {
  return fd_time_derivative(*this, x, t, 1e-3 * std::min(1.0, time_scale()));
}

double ConvolvedField::laplacian(const Point& x, double t, int n) const {
  return fd_laplacian(*this, x, t, n, 1e-3 * std::min(1.0, space_scale()));
}

std::optional<TimeWindow> ConvolvedField::time_window() const {
  return TimeWindow{require_window(*source_).lo, kInf};
}

double ConvolvedField::heat_difference(const Point& x, double t, double u0, double sigma,
                                       Side side, int n, int nodes) const {
  const TimeWindow w = require_window(*source_);
  // Past average at t reads M_f(x, t; rho); the future average reads it at t + 2 sigma.
  const double tt = side == Side::left ? t : t + 2.0 * sigma;
  auto m = [&](double rho) {
    return -source_->heat_difference(x, tt, 0.0, rho, Side::left, n, nodes);
  };
  const double avg =
      weighted_history(m, sigma, tt - w.hi, tt - w.lo, kernel_.s.value(), time_scale(), quad_);
  return u0 - avg;
}

double greens_inversion_residual(std::shared_ptr<const Field> source, const GreensKernel& kernel,
                                 const OperatorParams& params,
                                 const std::vector<SpaceTimePoint>& points) {
  OperatorParams p = params;
  p.n = kernel.n;
  p.s = kernel.s;
  const ConvolvedField u(source, kernel, p);
  std::vector<double> diff(points.size()), mag(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    const double f = source->value(points[i].x, points[i].t);
    diff[i] = std::abs(apply_left(u, points[i].x, points[i].t, p).value - f);
    mag[i] = std::abs(f);
  });
  const double d = diff.empty() ? 0.0 : *std::max_element(diff.begin(), diff.end());
  const double m = mag.empty() ? 0.0 : *std::max_element(mag.begin(), mag.end());
  if (m == 0.0) return d;
  return d / m;
}

DecayProfile vR_decay_profile(const SourceSpec& source, const GreensKernel& kernel,
                              DecayDirection direction, const std::vector<double>& multipliers,
                              const OperatorParams& quad) {
  if (!source.radius()) throw InvalidArgument("decay profile needs a truncated source");
  if (multipliers.size() < 2) throw InvalidArgument("decay profile needs two or more samples");
  const double R = *source.radius();
  const int n = kernel.n;
  const double s = kernel.s.value();
  const double q = 0.5 * n + 1.0 - s;
  // Non-owning handle; the caller keeps `source` alive for the duration of the call.
  std::shared_ptr<const Field> handle(std::shared_ptr<const Field>(), &source);
  const ConvolvedField v(handle, kernel, quad);

  DecayProfile out;
  out.direction = direction;
  out.asymptotic_exponent = direction == DecayDirection::space ? -(n + 2.0 - 2.0 * s) : -q;
  constexpr int kBits = 30;
  for (double mult : multipliers) {
    double best = 0.0;
    if (direction == DecayDirection::space) {
      const double X = mult * R;
      out.distances.push_back(X);
      // sup over t: the heat kernel peaks near t = X^2 / (4q); search in log t around it.
      const double tstar = X * X / (4.0 * q);
      auto neg = [&](double lt) { return -v.value({X, 0.0, 0.0}, std::exp(lt)); };
      const auto r = boost::math::tools::brent_find_minima(neg, std::log(tstar / 16.0),
                                                           std::log(tstar * 16.0), kBits);
      best = -r.second;
    } else {
      const double T = mult * R * R;
      out.distances.push_back(T);
      auto neg = [&](double x1) { return -v.value({x1, 0.0, 0.0}, T); };
      const auto r = boost::math::tools::brent_find_minima(neg, -R, R, kBits);
      best = std::max(-r.second, v.value({0.0, 0.0, 0.0}, T));
    }
    out.values.push_back(best);
  }
  for (std::size_t k = 0; k + 1 < out.values.size(); ++k) {
    out.ratios.push_back(out.values[k] != 0.0 ? out.values[k + 1] / out.values[k] : 0.0);
    if (!(std::abs(out.values[k + 1]) < std::abs(out.values[k]))) out.monotone = false;
  }
  const bool degenerate =
      std::all_of(out.values.begin(), out.values.end(), [](double x) { return x == 0.0; });
  if (degenerate) {
    out.monotone = true;
    return out;
  }
  out.fitted_exponent = loglog_slope(out.distances, out.values);
  if (direction == DecayDirection::space)
    for (std::size_t k = 0; k < out.values.size(); ++k)
      out.bound_constant = std::max(
          out.bound_constant, std::abs(out.values[k]) * std::pow(out.distances[k] - R, n - 2.0 * s));
  return out;
}

void write_csv(std::ostream& os, int n, const std::vector<CsvRow>& rows) {
  for (int d = 0; d < n; ++d) os << 'x' << d + 1 << ',';
  os << "t,value\n";
  char buf[64];
  for (const auto& r : rows) {
    for (int d = 0; d < n; ++d) {
      std::snprintf(buf, sizeof buf, "%.17g,", r.x[d]);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", r.t, r.value);
    os << buf;
  }
}

}  // namespace fracheat
