#include "fracheat/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "fracheat/gauss_rules.hpp"
#include "fracheat/parallel.hpp"
#include "fracheat/special.hpp"

namespace fracheat {

namespace {

double abs_gamma_neg(double s) { return std::abs(special::gamma(-s)); }

// Sum of w sigma^{-1-s} (u0 - M(sigma)) over graded panels covering [a, b].
double panel_sum(const Field& u, const Point& x, double t, double u0, double a, double b,
                 const OperatorParams& p, Side side, long& nodes) {
  const double s = p.s.value();
  const double hcap = 2.0 * u.time_scale();
  const Rule& rule = cached_legendre(p.n_time_nodes);
  double acc = 0.0;
  while (a < b) {
    const double width = std::min(a * (p.panel_ratio - 1.0), hcap);
    double next = a + width;
    if (next >= b * (1.0 - 1e-12)) next = b;
    const double half = 0.5 * (next - a), mid = 0.5 * (next + a);
    for (std::size_t k = 0; k < rule.size(); ++k) {
      const double sigma = mid + half * rule.nodes[k];
      const double diff = u.heat_difference(x, t, u0, sigma, side, p.n, p.n_space_nodes);
      acc += half * rule.weights[k] * std::pow(sigma, -1.0 - s) * diff;
    }
    nodes += static_cast<long>(rule.size());
    a = next;
  }
  return acc;
}

QuadResult evaluate(const Field& u, const Point& x, double t, const OperatorParams& p, Side side) {
  QuadResult out;
  if (u.is_constant()) return out;
  const double s = p.s.value();
  const double g = abs_gamma_neg(s);
  const double heat = side == Side::left ? u.time_derivative(x, t) - u.laplacian(x, t, p.n)
                                         : -(u.time_derivative(x, t) + u.laplacian(x, t, p.n));
  out.near_field_part = std::pow(p.delta, 1.0 - s) / (1.0 - s) * heat / g;
  double bound = 0.0;
  long nodes = 0;
  const double hist = history_integral(u, x, t, p.delta, p, side, &bound, &nodes);
  out.value = out.near_field_part + hist / g;
  out.far_field_tail_bound = bound / g;
  out.nodes_used = nodes;
  return out;
}

}  // namespace

double history_integral(const Field& u, const Point& x, double t, double from,
                        const OperatorParams& p, Side side, double* tail_bound, long* nodes) {
  if (!(from > 0.0)) throw InvalidArgument("history_integral needs a positive lower limit");
  if (u.is_constant()) return 0.0;
  if (const auto* lc = dynamic_cast<const LinearCombination*>(&u)) {
    double acc = 0.0, bound = 0.0;
    long used = 0;
    for (const auto& [c, f] : lc->terms()) {
      double b = 0.0;
      acc += c * history_integral(*f, x, t, from, p, side, &b, &used);
      bound += std::abs(c) * b;
    }
    if (tail_bound) *tail_bound += bound;
    if (nodes) *nodes += used;
    return acc;
  }
  const double s = p.s.value();
  const double u0 = u.value(x, t);
  long used = 0;
  double acc = 0.0;
  auto plain = [&](double a, double b) {  // M negligible on [a, b]
    return u0 * (std::pow(a, -s) - (std::isfinite(b) ? std::pow(b, -s) : 0.0)) / s;
  };

  if (const auto w = u.time_window()) {
    // Sigma range over which the shifted time lands inside the window.
    const double lo = side == Side::left ? t - w->hi : w->lo - t;
    const double hi = side == Side::left ? t - w->lo : w->hi - t;
    if (hi <= from) {
      acc = plain(from, kInf);
    } else {
      const double start = std::max(from, lo);
      if (start > from) acc += plain(from, start);
      acc += panel_sum(u, x, t, u0, start, hi, p, side, used);
      acc += plain(hi, kInf);
    }
  } else {
    const double cut = std::clamp(u.suggested_cut(x, t, s, side, p.n), from, p.sigma_max);
    if (cut > from) acc += panel_sum(u, x, t, u0, from, cut, p, side, used);
    const TailEstimate tail = u.history_tail(x, t, std::max(cut, from), s, side, p.n);
    acc += tail.value;
    if (tail_bound) *tail_bound += tail.bound;
  }
  if (nodes) *nodes += used;
  return acc;
}

QuadResult apply_operator(const Field& u, const Point& x, double t, const OperatorParams& params,
                          Side side) {
  params.validate();
  QuadResult out = evaluate(u, x, t, params, side);
  if (params.check_convergence && !u.is_constant()) {
    OperatorParams fine = params;
    fine.n_time_nodes *= 2;
    fine.n_space_nodes *= 2;
    fine.delta *= 0.5;
    const QuadResult ref = evaluate(u, x, t, fine, side);
    const double tol = std::max(params.abs_tol, params.rel_tol * std::abs(ref.value));
    if (std::abs(ref.value - out.value) > tol)
      throw DidNotConverge("operator quadrature changed by " +
                           std::to_string(std::abs(ref.value - out.value)) +
                           " under node doubling (tolerance " + std::to_string(tol) + ")");
    out.nodes_used += ref.nodes_used;
  }
  return out;
}

QuadResult apply_left(const Field& u, const Point& x, double t, const OperatorParams& params) {
  return apply_operator(u, x, t, params, Side::left);
}

QuadResult apply_right(const Field& u, const Point& x, double t, const OperatorParams& params) {
  return apply_operator(u, x, t, params, Side::right);
}

std::vector<QuadResult> apply_batch(const Field& u, const std::vector<SpaceTimePoint>& points,
                                    const OperatorParams& params, Side side) {
  params.validate();
  std::vector<QuadResult> out(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    out[i] = apply_operator(u, points[i].x, points[i].t, params, side);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Pairings

namespace {

struct Nodes1D {
  std::vector<double> x, w;
};

Nodes1D composite_legendre(double a, double b, double max_width, int per_panel) {
  Nodes1D out;
  const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
  const Rule& r = cached_legendre(per_panel);
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (std::size_t k = 0; k < r.size(); ++k) {
      out.x.push_back(mid + 0.5 * h * r.nodes[k]);
      out.w.push_back(0.5 * h * r.weights[k]);
    }
  }
  return out;
}

struct TensorNode {
  Point x;
  double t;
  double w;
};

std::vector<TensorNode> tensor_nodes(int n, const Nodes1D& space, const Nodes1D& time) {
  std::vector<TensorNode> out;
  std::size_t count = 1;
  for (int d = 0; d < n; ++d) count *= space.x.size();
  for (std::size_t j = 0; j < time.x.size(); ++j) {
    for (std::size_t idx = 0; idx < count; ++idx) {
      std::size_t rem = idx;
      TensorNode node{{0.0, 0.0, 0.0}, time.x[j], time.w[j]};
      for (int d = 0; d < n; ++d) {
        const std::size_t k = rem % space.x.size();
        rem /= space.x.size();
        node.x[d] = space.x[k];
        node.w *= space.w[k];
      }
      out.push_back(node);
    }
  }
  return out;
}

constexpr int kPairNodes = 6;
constexpr double kClosureMargin = 2.0;
constexpr double kKernelReach = 60.0;  // |x-y|^2 beyond this many sigma: exp(-15)

}  // namespace

AdjointnessReport adjointness_check(const Field& u, const Field& phi, const OperatorParams& params,
                                    const PairingBox& box) {
  params.validate();
  if (!(box.x_half > 0.0 && box.t_half > 0.0)) throw InvalidArgument("pairing box must be positive");
  const int n = params.n;
  const double s = params.s.value();
  const double g = abs_gamma_neg(s);
  AdjointnessReport rep;

  // <L u, phi> over the box where phi lives.
  const auto core = tensor_nodes(n, composite_legendre(-box.x_half, box.x_half, 1.0, kPairNodes),
                                 composite_legendre(-box.t_half, box.t_half, 1.0, kPairNodes));
  std::vector<double> left(core.size()), closure(core.size());
  double sup_u = 0.0, phi_l1 = 0.0;
  for (const auto& c : core) {
    sup_u = std::max(sup_u, std::abs(u.value(c.x, c.t)));
    phi_l1 += c.w * std::abs(phi.value(c.x, c.t));
  }
  const double T = box.t_half + kClosureMargin;
  parallel_for(core.size(), [&](std::size_t i) {
    const auto& c = core[i];
    const double ph = phi.value(c.x, c.t);
    if (ph == 0.0) return;
    left[i] = c.w * ph * apply_left(u, c.x, c.t, params).value;
    // Far-past closure: phi(y,tau) times int_{sigma > tau+T} sigma^{-1-s} M_u dsigma.
    const double from = c.t + T;
    const double inner = u.value(c.x, c.t) * std::pow(from, -s) / s -
                         history_integral(u, c.x, c.t, from, params, Side::left);
    closure[i] = -c.w * ph * inner / g;
  });

  // <u, R phi> on t in [-T, t_half], with x widened by the heat spread.
  const double reach = box.x_half + std::sqrt(kKernelReach * (T + box.t_half));
  const auto wide = tensor_nodes(n, composite_legendre(-reach, reach, 2.0, kPairNodes),
                                 composite_legendre(-T, box.t_half, 1.0, kPairNodes));
  std::vector<double> right(wide.size());
  parallel_for(wide.size(), [&](std::size_t i) {
    const auto& c = wide[i];
    const double uv = u.value(c.x, c.t);
    if (uv == 0.0) return;
    right[i] = c.w * uv * apply_right(phi, c.x, c.t, params).value;
  });

  for (double v : left) rep.left_pairing += v;
  for (double v : right) rep.right_pairing += v;
  for (double v : closure) rep.right_pairing += v;
  rep.scale = std::max({std::abs(rep.left_pairing), sup_u * phi_l1, 1e-12});
  rep.residual = std::abs(rep.left_pairing - rep.right_pairing) / rep.scale;
  return rep;
}

double adjointness_residual(const Field& u, const Field& phi, const OperatorParams& params,
                            const PairingBox& box) {
  return adjointness_check(u, phi, params, box).residual;
}

}  // namespace fracheat
