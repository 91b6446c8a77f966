#include "fracheat/equivalence.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>

#include "fracheat/gauss_rules.hpp"
#include "fracheat/parallel.hpp"
#include "fracheat/special.hpp"

namespace fracheat {

const char* to_string(SourceKind k) {
  return k == SourceKind::pure_forcing ? "pure_forcing" : "contraction";
}

void NonlinearSource::validate() const {
  if (!g) throw InvalidArgument("nonlinear source needs a forcing field g");
  if (!(R > 0.0) || !std::isfinite(R)) throw InvalidArgument("truncation radius must be positive");
  if (kind == SourceKind::contraction && !(std::isfinite(kappa) && kappa >= 0.0))
    throw InvalidArgument("contraction constant kappa must be finite and non-negative");
}

double NonlinearSource::cutoff(const Point& x, double t) const {
  const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
  if (r >= R || std::abs(t) >= R * R) return 0.0;
  return cutoff_profile(r / R) * cutoff_profile(std::abs(t) / (R * R));
}

double NonlinearSource::operator()(const Point& x, double t, double u) const {
  const double c = cutoff(x, t);
  if (c == 0.0) return 0.0;
  double v = g->value(x, t);
  if (kind == SourceKind::contraction) v += kappa * std::sin(u);
  return c * v;
}

// ---------------------------------------------------------------------------
// Lattice

Lattice Lattice::covering(int n, double R, double hx, double ht) {
  if (!(R > 0.0 && hx > 0.0 && ht > 0.0)) throw InvalidArgument("lattice spacings must be positive");
  Lattice l;
  l.n = n;
  l.x_half = R;
  l.t_lo = -R * R;
  l.t_hi = R * R;
  l.nx = std::max(4, static_cast<int>(std::ceil(2.0 * R / hx)) + 1);
  l.nt = std::max(4, static_cast<int>(std::ceil(2.0 * R * R / ht)) + 1);
  return l;
}

void Lattice::validate() const {
  checked_dimension(n);
  if (!(x_half > 0.0)) throw InvalidArgument("lattice half-width must be positive");
  if (!(t_hi > t_lo)) throw InvalidArgument("lattice time range is empty");
  if (nx < 4 || nt < 4) throw InvalidArgument("lattice needs at least 4 points per axis");
}

std::size_t Lattice::size() const {
  std::size_t c = static_cast<std::size_t>(nt);
  for (int d = 0; d < n; ++d) c *= static_cast<std::size_t>(nx);
  return c;
}

SpaceTimePoint Lattice::point(std::size_t idx) const {
  SpaceTimePoint p{{0.0, 0.0, 0.0}, 0.0};
  for (int d = n - 1; d >= 0; --d) {
    p.x[d] = x_at(static_cast<int>(idx % nx));
    idx /= nx;
  }
  p.t = t_at(static_cast<int>(idx));
  return p;
}

namespace {

struct Stencil {
  int first = 0;
  std::array<double, 4> w{};
};

// Four-point Lagrange weights around v on a uniform axis; v is clamped to the axis.
Stencil cubic_stencil(double v, double lo, double hi, int count) {
  v = std::clamp(v, lo, hi);
  const double h = (hi - lo) / (count - 1);
  const double pos = (v - lo) / h;
  const int i = std::clamp(static_cast<int>(std::floor(pos)), 1, count - 3);
  const double u = pos - i;
  Stencil st;
  st.first = i - 1;
  st.w[0] = -u * (u - 1.0) * (u - 2.0) / 6.0;
  st.w[1] = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
  st.w[2] = -(u + 1.0) * u * (u - 2.0) / 2.0;
  st.w[3] = (u + 1.0) * u * (u - 1.0) / 6.0;
  return st;
}

}  // namespace

double PicardState::interpolate(const Point& x, double t) const {
  const Lattice& l = lattice;
  if (values.size() != l.size()) throw InvalidArgument("Picard state has no lattice values");
  const int n = l.n;
  std::array<Stencil, 4> st;
  st[0] = cubic_stencil(t, l.t_lo, l.t_hi, l.nt);
  for (int d = 0; d < n; ++d) st[d + 1] = cubic_stencil(x[d], -l.x_half, l.x_half, l.nx);
  const int dims = n + 1;
  int terms = 1;
  for (int d = 0; d < dims; ++d) terms *= 4;
  double acc = 0.0;
  for (int k = 0; k < terms; ++k) {
    int rem = k;
    std::size_t flat = 0;
    double w = 1.0;
    for (int d = 0; d < dims; ++d) {
      const int o = rem % 4;
      rem /= 4;
      flat = flat * (d == 0 ? 0 : l.nx) + static_cast<std::size_t>(st[d].first + o);
      w *= st[d].w[o];
    }
    acc += w * values[flat];
  }
  return acc;
}

std::vector<double> PicardState::ratios() const {
  std::vector<double> r;
  for (std::size_t k = 1; k < diff_norms.size(); ++k)
    r.push_back(diff_norms[k - 1] > 0.0 ? diff_norms[k] / diff_norms[k - 1] : 0.0);
  return r;
}

// ---------------------------------------------------------------------------
// Picard iteration

namespace {

OperatorParams kernel_params(const OperatorParams& quad, const GreensKernel& kernel) {
  OperatorParams p = quad;
  p.n = kernel.n;
  p.s = kernel.s;
  p.validate();
  return p;
}

std::vector<double> convolve_on_lattice(const SourceSpec& source, const GreensKernel& kernel,
                                        const Lattice& lattice, const OperatorParams& quad) {
  std::vector<double> out(lattice.size());
  parallel_for(out.size(), [&](std::size_t i) {
    const SpaceTimePoint p = lattice.point(i);
    out[i] = convolve(source, kernel, p.x, p.t, quad);
  });
  return out;
}

// f(., ., u) before truncation; the caller wraps it in SourceSpec(R).
std::shared_ptr<const Field> untruncated_source(const NonlinearSource& src,
                                                std::shared_ptr<const PicardState> iterate) {
  auto g = src.g;
  const bool nonlinear = src.kind == SourceKind::contraction && src.kappa != 0.0 && iterate;
  const double kappa = src.kappa;
  auto fn = nonlinear ? FunctionField::Fn([g, kappa, iterate](const Point& x, double t) {
    return g->value(x, t) + kappa * std::sin(iterate->interpolate(x, t));
  })
                      : FunctionField::Fn([g](const Point& x, double t) { return g->value(x, t); });
  auto field = std::make_shared<FunctionField>(std::move(fn));
  double ts = g->time_scale(), ss = g->space_scale();
  if (nonlinear) {
    const Lattice& l = iterate->lattice;
    ts = std::min(ts, 2.0 * (l.t_hi - l.t_lo) / (l.nt - 1));
    ss = std::min(ss, 2.0 * (2.0 * l.x_half) / (l.nx - 1));
    // sin(u) lives on the whole truncation window.
    field->with_time_window(TimeWindow{-src.R * src.R, src.R * src.R});
  } else if (auto w = g->time_window()) {
    field->with_time_window(*w);
  } else {
    field->with_time_window(TimeWindow{-src.R * src.R, src.R * src.R});
  }
  field->with_time_scale(ts).with_space_scale(ss);
  return field;
}

}  // namespace

double contraction_precheck(const GreensKernel& kernel, double R, const Lattice& lattice,
                            const OperatorParams& quad) {
  lattice.validate();
  const OperatorParams p = kernel_params(quad, kernel);
  auto one = std::make_shared<FunctionField>([](const Point&, double) { return 1.0; });
  one->with_time_window(TimeWindow{-R * R, R * R}).with_time_scale(R * R / 8.0).with_space_scale(R / 4.0);
  const SourceSpec source(one, R);
  const auto v = convolve_on_lattice(source, kernel, lattice, p);
  return *std::max_element(v.begin(), v.end());
}

PicardState solve_integral_equation(const NonlinearSource& src, const GreensKernel& kernel,
                                    const Lattice& lattice, const OperatorParams& quad, double tol,
                                    int max_iter) {
  src.validate();
  lattice.validate();
  if (lattice.n != kernel.n) throw InvalidArgument("lattice and kernel dimensions differ");
  if (!(tol > 0.0) || max_iter < 1) throw InvalidArgument("need tol > 0 and max_iter >= 1");
  const OperatorParams p = kernel_params(quad, kernel);
  const bool nonlinear = src.kind == SourceKind::contraction && src.kappa != 0.0;

  auto state = std::make_shared<PicardState>();
  state->lattice = lattice;
  state->values.assign(lattice.size(), 0.0);

  if (nonlinear) {
    const double R2 = src.R * src.R;
    if (lattice.x_half < src.R || lattice.t_lo > -R2 || lattice.t_hi < R2)
      throw InvalidArgument("lattice must cover the support box of the truncated source");
    const double c = src.kappa * contraction_precheck(kernel, src.R, lattice, p);
    state->contraction_constant = c;
    if (c >= 1.0)
      throw NotContracting("kappa * sup G*(phi_R eta_R) = " + std::to_string(c) + " >= 1", c);
  }

  for (int k = 0; k < max_iter; ++k) {
    const SourceSpec source(untruncated_source(src, nonlinear ? state : nullptr), src.R);
    auto next = convolve_on_lattice(source, kernel, lattice, p);
    double diff = 0.0, sup = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      diff = std::max(diff, std::abs(next[i] - state->values[i]));
      sup = std::max(sup, std::abs(next[i]));
    }
    auto updated = std::make_shared<PicardState>(*state);
    updated->values = std::move(next);
    updated->diff_norms.push_back(diff);
    updated->iterations = k + 1;
    state = updated;
    // The forcing does not see u, so the first sweep is already the fixed point.
    if (!nonlinear || diff <= tol * std::max(1.0, sup)) {
      state->converged = true;
      return *state;
    }
  }
  throw MaxIterExceeded("Picard iteration did not reach tolerance in " + std::to_string(max_iter) +
                        " sweeps (last difference " + std::to_string(state->diff_norms.back()) + ")");
}

std::shared_ptr<const Field> solution_field(const PicardState& state, const NonlinearSource& src,
                                            const GreensKernel& kernel,
                                            const OperatorParams& quad) {
  src.validate();
  auto iterate = std::make_shared<const PicardState>(state);
  auto source = std::make_shared<SourceSpec>(untruncated_source(src, iterate), src.R);
  return std::make_shared<ConvolvedField>(source, kernel, kernel_params(quad, kernel));
}

double pde_residual(const PicardState& state, const NonlinearSource& src,
                    const GreensKernel& kernel, const OperatorParams& params,
                    const std::vector<SpaceTimePoint>& points) {
  const OperatorParams p = kernel_params(params, kernel);
  const auto u = solution_field(state, src, kernel, p);
  std::vector<double> diff(points.size()), mag(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    const auto& pt = points[i];
    const double f = src(pt.x, pt.t, state.interpolate(pt.x, pt.t));
    diff[i] = std::abs(apply_left(*u, pt.x, pt.t, p).value - f);
    mag[i] = std::abs(f);
  });
  const double d = diff.empty() ? 0.0 : *std::max_element(diff.begin(), diff.end());
  const double m = mag.empty() ? 0.0 : *std::max_element(mag.begin(), mag.end());
  return m > 0.0 ? d / m : d;
}

RadiusLadder monotone_in_radius(std::shared_ptr<const Field> g, const GreensKernel& kernel,
                                const std::vector<double>& radii, const Lattice& lattice,
                                const OperatorParams& quad, double slack) {
  if (radii.size() < 2) throw InvalidArgument("radius ladder needs two or more radii");
  if (!std::is_sorted(radii.begin(), radii.end()))
    throw InvalidArgument("radii must be increasing");
  RadiusLadder out;
  out.radii = radii;
  double sup = 0.0;
  for (double R : radii) {
    NonlinearSource src{g, SourceKind::pure_forcing, 0.0, R};
    out.values.push_back(solve_integral_equation(src, kernel, lattice, quad).values);
    for (double v : out.values.back()) sup = std::max(sup, std::abs(v));
  }
  const double scale = sup > 0.0 ? sup : 1.0;
  for (std::size_t r = 1; r < radii.size(); ++r)
    for (std::size_t i = 0; i < lattice.size(); ++i)
      out.worst_violation =
          std::max(out.worst_violation, (out.values[r - 1][i] - out.values[r][i]) / scale);
  out.monotone = out.worst_violation <= slack;
  return out;
}

// ---------------------------------------------------------------------------
// Constant solutions

DivergenceCertificate nontrivial_constant_rejection(const GreensKernel& kernel, double C,
                                                    double threshold) {
  if (!std::isfinite(C)) throw InvalidArgument("constant must be finite");
  if (!(threshold > 0.0)) throw InvalidArgument("threshold must be positive");
  const double s = kernel.s.value();
  // int_0^T C m(sigma) dsigma with m the space mass; m sigma^{1-s} is smooth.
  auto truncated = [&](double T) {
    const Rule r = left_singular_on(0.0, T, s - 1.0, 16);
    double acc = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
      acc += r.weights[i] * space_mass(kernel, r.nodes[i]) * std::pow(r.nodes[i], 1.0 - s);
    return C * acc;
  };

  DivergenceCertificate cert;
  cert.T_star = std::numeric_limits<double>::infinity();
  const double target = threshold * std::abs(C);
  double T = 1.0;
  for (int k = 0; k < 200; ++k, T *= 2.0) {
    cert.horizons.push_back(T);
    cert.values.push_back(truncated(T));
    if (k > 0 && cert.values[k - 1] != 0.0)
      cert.max_doubling_error = std::max(
          cert.max_doubling_error, std::abs(cert.values[k] / cert.values[k - 1] - std::pow(2.0, s)));
    if (C == 0.0 && k >= 8) break;
    if (C != 0.0 && std::abs(cert.values[k]) >= target) break;
  }
  if (C == 0.0 || std::abs(cert.values.back()) < target) return cert;

  // Bisection in log T between the last two horizons.
  double lo = std::log(T / 2.0), hi = std::log(T);
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (std::abs(truncated(std::exp(mid))) >= target ? hi : lo) = mid;
  }
  cert.T_star = std::exp(hi);
  return cert;
}

}  // namespace fracheat
