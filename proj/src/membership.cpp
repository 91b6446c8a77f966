#include <algorithm>
#include <cmath>

#include "fracheat/core.hpp"
#include "fracheat/gauss_rules.hpp"

namespace fracheat {

namespace {

constexpr int kNodesPerPanel = 6;
constexpr double kNodeBudget = 2e5;

struct Interval {
  double lo, hi;
};

// Composite Legendre nodes on [lo, hi] with `panels` equal panels.
void composite(const Interval& iv, int panels, std::vector<double>& x, std::vector<double>& w) {
  const Rule& r = cached_legendre(kNodesPerPanel);
  const double h = (iv.hi - iv.lo) / panels;
  for (int p = 0; p < panels; ++p) {
    const double a = iv.lo + p * h;
    for (std::size_t k = 0; k < r.size(); ++k) {
      x.push_back(a + 0.5 * h * (r.nodes[k] + 1.0));
      w.push_back(0.5 * h * r.weights[k]);
    }
  }
}

int panel_count(double length, double scale, int cap) {
  if (!std::isfinite(scale) || scale <= 0.0) return 1;
  return std::clamp(static_cast<int>(std::ceil(length / scale)), 1, cap);
}

}  // namespace

const char* to_string(Membership m) {
  switch (m) {
    case Membership::member: return "member";
    case Membership::nonmember: return "nonmember";
    case Membership::inconclusive: return "inconclusive";
  }
  return "?";
}

MembershipResult membership_L2ss(const Field& field, int n, FracOrder s, double r_max, double tol) {
  checked_dimension(n);
  if (!(r_max > 1.0)) throw InvalidArgument("membership needs r_max > 1");
  const int levels = static_cast<int>(std::floor(std::log2(r_max)));
  if (levels < 3) throw InvalidArgument("membership needs r_max >= 8 for three dyadic shells");

  const double sv = s.value();
  const double px = n + 2.0 + 2.0 * sv;
  const double pt = 0.5 * n + 1.0 + sv;
  const int cap = std::max(
      1, static_cast<int>(std::pow(kNodeBudget, 1.0 / (n + 1)) / kNodesPerPanel));

  // Integral of |u| * weight over the product of per-axis interval lists.
  auto integrate_box = [&](const std::vector<Interval>& space, const Interval& time) {
    std::vector<std::vector<double>> xs(n), wxs(n);
    for (int d = 0; d < n; ++d)
      composite(space[d], panel_count(space[d].hi - space[d].lo, field.space_scale(), cap), xs[d],
                wxs[d]);
    std::vector<double> ts, wts;
    composite(time, panel_count(time.hi - time.lo, field.time_scale(), cap), ts, wts);

    std::size_t count = 1;
    for (int d = 0; d < n; ++d) count *= xs[d].size();
    double acc = 0.0;
    for (std::size_t idx = 0; idx < count; ++idx) {
      std::size_t rem = idx;
      Point x{0.0, 0.0, 0.0};
      double w = 1.0;
      double r2 = 0.0;
      for (int d = 0; d < n; ++d) {
        const std::size_t k = rem % xs[d].size();
        rem /= xs[d].size();
        x[d] = xs[d][k];
        w *= wxs[d][k];
        r2 += x[d] * x[d];
      }
      const double rx = std::pow(r2, 0.5 * px);
      for (std::size_t j = 0; j < ts.size(); ++j) {
        const double weight = 1.0 / (1.0 + rx + std::pow(std::abs(ts[j]), pt));
        acc += w * wts[j] * std::abs(field.value(x, ts[j])) * weight;
      }
    }
    return acc;
  };

  MembershipResult out;
  // Box 0 = [-1,1]^n x [-1,1].
  out.shell_contributions.push_back(
      integrate_box(std::vector<Interval>(n, Interval{-1.0, 1.0}), Interval{-1.0, 1.0}));

  for (int k = 1; k <= levels; ++k) {
    const double a = std::ldexp(1.0, k - 1), b = std::ldexp(1.0, k);
    const double ta = a * a, tb = b * b;
    // Each axis of the outer cube splits into [-b,-a], [-a,a], [a,b]; the spatial
    // shell is every combination except the all-inner one.
    const Interval pieces[3] = {{-b, -a}, {-a, a}, {a, b}};
    double shell = 0.0;
    int combos = 1;
    for (int d = 0; d < n; ++d) combos *= 3;
    for (int c = 0; c < combos; ++c) {
      std::vector<Interval> box(n);
      int rem = c;
      bool all_inner = true;
      for (int d = 0; d < n; ++d) {
        const int p = rem % 3;
        rem /= 3;
        box[d] = pieces[p];
        all_inner = all_inner && p == 1;
      }
      if (all_inner) {
        // Inner cube keeps only the new time slabs.
        shell += integrate_box(box, {-tb, -ta}) + integrate_box(box, {ta, tb});
      } else {
        shell += integrate_box(box, {-tb, tb});
      }
    }
    out.shell_contributions.push_back(shell);
  }

  double total = 0.0;
  for (double c : out.shell_contributions) total += c;
  for (std::size_t k = 1; k < out.shell_contributions.size(); ++k) {
    const double prev = out.shell_contributions[k - 1];
    out.shell_ratios.push_back(prev > 0.0 ? out.shell_contributions[k] / prev : 0.0);
  }

  const std::size_t m = out.shell_ratios.size();
  const double r1 = out.shell_ratios[m - 2], r2 = out.shell_ratios[m - 1];
  if (out.shell_contributions.back() == 0.0) {
    out.verdict = Membership::member;
    out.integral_estimate = total;
  } else if (r1 < 1.0 - tol && r2 < 1.0 - tol) {
    out.verdict = Membership::member;
    out.integral_estimate = total + out.shell_contributions.back() * r2 / (1.0 - r2);
  } else if (r1 > 1.0 + tol && r2 > 1.0 + tol) {
    out.verdict = Membership::nonmember;
    out.integral_estimate = kInf;
  } else {
    out.verdict = Membership::inconclusive;
    out.integral_estimate = total;
  }
  return out;
}

}  // namespace fracheat
