// Acceptance run: one PASS/FAIL line per criterion.
// Usage: acceptance [criterion ...]   (all nine when none are given)

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <algorithm>
#include <functional>
#include <string>
#include <vector>

#include "fracheat/core.hpp"
#include "fracheat/equivalence.hpp"
#include "fracheat/greens.hpp"
#include "fracheat/special.hpp"
#include "fracheat/spectral.hpp"
#include "fracheat/verify.hpp"

using namespace fracheat;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double limit_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

OperatorParams params(double s, int n = 1) {
  OperatorParams p;
  p.s = FracOrder(s);
  p.n = n;
  return p;
}

// 1. plane-wave eigenrelation
Outcome symbol_identity() {
  constexpr double kTol = 1e-3;
  const std::vector<SpaceTimePoint> pts = {{{0, 0, 0}, 0.0}, {{0.4, 0, 0}, -0.3}, {{-1.2, 0, 0}, 0.8}};
  const std::pair<double, double> waves[] = {{1, 0}, {0, 1}, {1, 1}};
  double worst = 0.0;
  for (double s : {0.25, 0.5, 0.75})
    for (auto [xi, rho] : waves) {
      const AnalyticField f = AnalyticField::coswave({xi, 0, 0}, rho);
      const auto sym = complex_power_symbol({{xi, 0, 0}, rho}, FracOrder(s), Side::left);
      for (const auto& p : pts) {
        const double want = (sym * std::polar(1.0, xi * p.x[0] + rho * p.t)).real();
        const double got = apply_left(f, p.x, p.t, params(s)).value;
        worst = std::max(worst, std::abs(got - want) / std::abs(sym));
      }
    }
  return {worst < kTol, "max relative error " + fmt("%.2e", worst) + " (< " + fmt("%.0e", kTol) + ")"};
}

// 2. reductions and the s -> 1 limit
Outcome reductions() {
  constexpr double kTol = 1e-3, kLimitTol = 5e-2;
  const std::vector<SpaceTimePoint> pts = {{{0, 0, 0}, 0}, {{0.4, 0, 0}, 0.7}, {{-1.1, 0, 0}, 0.3}};
  double space = 0.0, time = 0.0;
  for (double s : {0.25, 0.5, 0.75}) {
    const auto p = params(s);
    space = std::max({space,
                      reduction_check(ReductionKind::space_to_fraclap, AnalyticField::coswave({1, 0, 0}, 0, 0.3), p, pts).max_relative_error,
                      reduction_check(ReductionKind::space_to_fraclap, AnalyticField::schwartz_product(1, 0), p, pts).max_relative_error});
    time = std::max({time,
                     reduction_check(ReductionKind::time_to_marchaud, AnalyticField::coswave({0, 0, 0}, 1, 0.3), p, pts).max_relative_error,
                     reduction_check(ReductionKind::time_to_marchaud, AnalyticField::schwartz_product(0, 1), p, pts).max_relative_error});
  }
  const auto lim = reduction_check(ReductionKind::s_to_one, AnalyticField::gaussian(1), params(0.5), {{{0, 0, 0}, 0}});
  const bool ok = space < kTol && time < kTol && lim.max_relative_error < kLimitTol && lim.monotone;
  return {ok, "space " + fmt("%.2e", space) + ", time " + fmt("%.2e", time) + " (< 1e-03); s->1 errors " +
                  fmt("%.4f", lim.errors[0]) + ", " + fmt("%.4f", lim.errors[1]) + ", " +
                  fmt("%.4f", lim.errors[2]) + " (last < 5e-02, decreasing)"};
}

// 3. gamma identity and time-kernel closed form
Outcome analytic_identities() {
  constexpr double kGammaTol = 1e-6, kKernelTol = 1e-8;
  double g = 0.0, k = 0.0;
  for (double s : {0.25, 0.5, 0.75}) {
    for (double lam : {0.5, 1.0, 2.0, 4.0, 8.0}) {
      const double ref = special::gamma(-s) * std::pow(lam, s);
      g = std::max(g, std::abs(gamma_tail_identity(lam, FracOrder(s)).value / ref - 1.0));
    }
    for (int n = 1; n <= 3; ++n)
      for (double r : {0.5, 1.0, 2.0, 4.0})
        k = std::max(k, std::abs(time_kernel_integral(r, n, FracOrder(s)).value /
                                     time_kernel_closed_form(r, n, FracOrder(s)) - 1.0));
  }
  return {g < kGammaTol && k < kKernelTol,
          "gamma identity " + fmt("%.2e", g) + " (< 1e-06); time kernel, 36 cases " + fmt("%.2e", k) + " (< 1e-08)"};
}

// 4. decay exponents on time and space rays
Outcome decay() {
  constexpr double kTol = 0.15;
  const AnalyticField phi = AnalyticField::schwartz_product(1, 1);
  bool ok = true;
  std::string detail;
  for (int n : {1, 2}) {
    const auto p = params(0.5, n);
    const double t_target = n / 2.0 + 1.5, x_target = n + 3.0;
    const auto time = decay_estimate_check(phi, p, {RaySpec::geometric(RayFamily::time_axis_negative, 10, 10, 4)}, kTol)[0];
    ok = ok && time.pass;
    detail += "n=" + std::to_string(n) + ": time " + fmt("%.3f", time.fitted_exponent) + " (target " +
              fmt("%.1f", -t_target) + ")";
    try {
      const auto space = decay_estimate_check(phi, p, {RaySpec::geometric(RayFamily::space_axis, 10, 10, 4)}, kTol)[0];
      ok = ok && space.pass;
      detail += ", space " + fmt("%.3f", space.fitted_exponent);
    } catch (const InsufficientDynamicRange&) {
      ok = false;
      detail += ", space: no power law (values underflow, decay is faster than any power)";
    }
    const auto para = decay_estimate_check(phi, p, {RaySpec::geometric(RayFamily::parabola, 10, 10, 4)}, kTol)[0];
    detail += "; along |x|^2=|t| in |x| " + fmt("%.3f", 2.0 * para.fitted_exponent) + " (target " +
              fmt("%.1f", -x_target) + ")";
    if (n == 1) detail += " | ";
  }
  return {ok, detail};
}

// 5. counterexample sharpness
Outcome counterexample() {
  constexpr double kSlope = 0.05;
  const AnalyticField bump = AnalyticField::bump(1, 2, 1, 4);
  bool ok = true;
  double floor_min = kInf, slope_max = 0.0;
  for (int n : {1, 2})
    for (double s : {0.25, 0.5, 0.75}) {
      const auto c = counterexample_sharpness(n, FracOrder(s), bump, {-1e2, -1e3, -1e4}, kSlope);
      ok = ok && c.pass;
      floor_min = std::min(floor_min, *c.parabola.lower_bound_ratio_min);
      slope_max = std::max(slope_max, std::abs(*c.parabola.trend_slope));
    }
  return {ok && floor_min > 0.0 && slope_max <= kSlope,
          "(n,s) in {1,2}x{0.25,0.5,0.75}: min floor " + fmt("%.4f", floor_min) + " (> 0), max |slope| " +
              fmt("%.2e", slope_max) + " (<= 0.05)"};
}

// 6. Green inversion and space-mass law
Outcome greens() {
  constexpr double kResTol = 5e-2, kMassTol = 1e-6;
  const double s = 0.5;
  const auto k = GreensKernel::make(1, FracOrder(s));
  auto bump = std::make_shared<AnalyticField>(AnalyticField::bump(1, 2, 1, 4).scaled(-1.0));
  const std::vector<SpaceTimePoint> pts = {
      {{0, 0, 0}, 0}, {{0.5, 0, 0}, 0.5}, {{-0.5, 0, 0}, -0.5}, {{1, 0, 0}, 1.5}, {{0.3, 0, 0}, -1}};
  const double res = greens_inversion_residual(bump, k, params(s), pts);
  double mass = 0.0;
  for (double t : {1e-3, 1e-1, 1.0, 10.0, 1e3})
    mass = std::max(mass, std::abs(space_mass(k, t) / (std::pow(t, s - 1.0) / special::gamma(s)) - 1.0));
  return {res < kResTol && mass < kMassTol,
          "inversion residual " + fmt("%.2e", res) + " (< 5e-02); space mass " + fmt("%.2e", mass) + " (< 1e-06)"};
}

// 7. integral equation => PDE
Outcome equivalence() {
  constexpr double kResTol = 5e-2, kRatio = 0.9;
  const auto k = GreensKernel::make(1, FracOrder(0.5));
  const auto p = params(0.5);
  auto bump = std::make_shared<AnalyticField>(AnalyticField::bump(1, 2, 1, 4).scaled(-1.0));
  const Lattice lat = Lattice::covering(1, 2.0, 0.25, 0.25);
  const std::vector<SpaceTimePoint> pts = {{{0, 0, 0}, 0}, {{0.5, 0, 0}, 1}, {{-0.7, 0, 0}, -0.5}};

  const NonlinearSource pure{bump, SourceKind::pure_forcing, 0.0, 2.0};
  const auto ps = solve_integral_equation(pure, k, lat, p);
  const double res = pde_residual(ps, pure, k, p, pts);

  const auto ladder = monotone_in_radius(std::make_shared<AnalyticField>(AnalyticField::gaussian(0.25)), k,
                                         {2, 4, 8}, Lattice::covering(1, 2.0, 0.5, 0.5), p);

  const NonlinearSource con{bump, SourceKind::contraction, 0.2, 2.0};
  const auto cs = solve_integral_equation(con, k, lat, p);
  double ratio = 0.0;
  for (double r : cs.ratios()) ratio = std::max(ratio, r);

  const bool ok = ps.iterations == 1 && res < kResTol && ladder.monotone && cs.converged && ratio < kRatio;
  return {ok, "pure forcing: " + std::to_string(ps.iterations) + " sweep, residual " + fmt("%.2e", res) +
                  " (< 5e-02); R in {2,4,8} monotone: " + (ladder.monotone ? "yes" : "no") +
                  "; contraction: " + std::to_string(cs.iterations) + " sweeps, max ratio " +
                  fmt("%.3f", ratio) + " (< 0.9)"};
}

// 8. constants as the only discrete kernel; membership split at s = 1/2
Outcome liouville() {
  constexpr double kTol = 1e-10;
  bool ok = true;
  double proj = 0.0, min_bin = kInf;
  for (int n : {1, 2}) {
    SpaceTimeGrid g;
    g.n = n;
    g.Nx = g.Nt = 16;
    const SpectralPlan plan(g);
    ok = ok && plan.multiplier(0, 0.5, Side::left) == 0.0;
    for (std::size_t i = 1; i < g.size(); ++i)
      min_bin = std::min(min_bin, std::abs(plan.multiplier(i, 0.5, Side::left)));
    for (const char* spec : {"gaussian(a=0.7)", "coswave(xi1=2,rho=3,phase=0.4)", "schwartz_product(a=1,b=2)"}) {
      const auto f = SampledField::sample(parse_field(spec), g);
      const auto h = solve_homogeneous_projection(f, FracOrder(0.5));
      std::complex<double> mean = 0.0;
      for (const auto& v : f.values) mean += v;
      mean /= static_cast<double>(f.values.size());
      for (const auto& v : h.values) ok = ok && std::abs(v - mean) < kTol;
      proj = std::max(proj, apply_symbol(plan, h, FracOrder(0.5), Side::left).max_abs());
    }
    ok = ok && apply_symbol(plan, SampledField::constant(g, 3.0), FracOrder(0.5), Side::left).max_abs() == 0.0;
  }
  const auto lo = membership_L2ss(AnalyticField::monomial(1), 1, FracOrder(0.35), 64).verdict;
  const auto hi = membership_L2ss(AnalyticField::monomial(1), 1, FracOrder(0.65), 64).verdict;
  ok = ok && min_bin > 0.0 && proj < kTol && lo == Membership::nonmember && hi == Membership::member;
  return {ok, "symbol of projection " + fmt("%.1e", proj) + " (< 1e-10), smallest nonzero-bin multiplier " +
                  fmt("%.3f", min_bin) + "; monomial(x1): s=0.35 " + to_string(lo) + ", s=0.65 " + to_string(hi)};
}

// 9. adjointness of the left and right operators
Outcome adjointness() {
  constexpr double kTol = 1e-2;
  const AnalyticField phi = AnalyticField::gaussian(1.0);
  const auto p = params(0.5);
  const double a = adjointness_residual(AnalyticField::constant(1.0), phi, p);
  const double b = adjointness_residual(AnalyticField::gaussian(1.0), phi, p);
  const double c = adjointness_residual(AnalyticField::coswave({1, 0, 0}, 0.0), phi, p);
  return {std::max({a, b, c}) < kTol, "residuals constant " + fmt("%.1e", a) + ", gaussian " + fmt("%.1e", b) +
                                          ", coswave " + fmt("%.1e", c) + " (< 1e-02)"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "symbol identity", 60, symbol_identity},
      {2, "reduction identities", 120, reductions},
      {3, "gamma identity and time kernel", 30, analytic_identities},
      {4, "decay exponents", 300, decay},
      {5, "counterexample sharpness", 300, counterexample},
      {6, "Green inversion", 300, greens},
      {7, "integral equation to PDE", 600, equivalence},
      {8, "constants as the kernel", 60, liouville},
      {9, "adjointness", 120, adjointness},
  };
  std::vector<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));
  int failures = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && secs < c.limit_seconds;
    if (!pass) ++failures;
    std::printf("[%s] %d %s: %s; %.1f s (limit %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.title,
                o.detail.c_str(), secs, c.limit_seconds);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
