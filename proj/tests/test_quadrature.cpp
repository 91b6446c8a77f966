#include <doctest.h>

#include <cmath>
#include <complex>

#include "fracheat/core.hpp"
#include "fracheat/quadrature.hpp"

using namespace fracheat;

namespace {

OperatorParams params(double s, int n = 1) {
  OperatorParams p;
  p.s = FracOrder(s);
  p.n = n;
  return p;
}

double plane_wave_reference(const Point& xi, double rho, double phase, const Point& x, double t,
                            double s, Side side) {
  const auto sym = complex_power_symbol({xi, rho}, FracOrder(s), side);
  const double arg = xi[0] * x[0] + xi[1] * x[1] + xi[2] * x[2] + rho * t + phase;
  return (sym * std::polar(1.0, arg)).real();
}

}  // namespace

TEST_CASE("constants are annihilated exactly") {
  const AnalyticField c = AnalyticField::constant(3.7);
  for (Side side : {Side::left, Side::right}) {
    CHECK(apply_operator(c, {0.3, 0, 0}, -2.0, params(0.5), side).value == 0.0);
    CHECK(apply_operator(c, {0.3, 1.0, 0}, 5.0, params(0.25, 2), side).value == 0.0);
  }
}

TEST_CASE("plane wave examples") {
  const auto p = params(0.5);
  CHECK(apply_left(AnalyticField::coswave({1, 0, 0}, 0.0), {0, 0, 0}, 0.0, p).value ==
        doctest::Approx(1.0).epsilon(1e-4));
  CHECK(apply_left(AnalyticField::coswave({0, 0, 0}, 1.0), {0, 0, 0}, 0.0, p).value ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-4));
  CHECK(apply_right(AnalyticField::coswave({0, 0, 0}, 1.0), {0, 0, 0}, 0.0, p).value ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-4));
}

TEST_CASE("plane-wave eigenrelation on both sides") {
  struct Wave {
    Point xi;
    double rho, phase;
  };
  const Wave waves[] = {{{1, 0, 0}, 0.0, 0.2}, {{0, 0, 0}, 1.0, -0.4}, {{1, 0, 0}, 1.0, 0.0},
                        {{0.6, 0.8, 0}, -1.5, 0.5}};
  const SpaceTimePoint pts[] = {{{0, 0, 0}, 0.0}, {{0.4, -0.3, 0}, 0.7}};
  for (double s : {0.25, 0.5, 0.75})
    for (const auto& w : waves)
      for (Side side : {Side::left, Side::right})
        for (const auto& pt : pts) {
          const int n = w.xi[1] != 0.0 ? 2 : 1;
          const AnalyticField f = AnalyticField::coswave(w.xi, w.rho, w.phase);
          const double got = apply_operator(f, pt.x, pt.t, params(s, n), side).value;
          const double want = plane_wave_reference(w.xi, w.rho, w.phase, pt.x, pt.t, s, side);
          const double scale = std::pow(w.rho * w.rho + std::pow(w.xi[0] * w.xi[0] + w.xi[1] * w.xi[1], 2), s / 2);
          CHECK(std::abs(got - want) < 1e-3 * scale);
        }
}

TEST_CASE("linearity for built-in sums") {
  auto g = std::make_shared<AnalyticField>(AnalyticField::gaussian(1.0));
  auto w = std::make_shared<AnalyticField>(AnalyticField::coswave({1, 0, 0}, 1.0, 0.3));
  LinearCombination c;
  c.add(2.0, g);
  c.add(-0.5, w);
  const auto p = params(0.5);
  const Point x{0.2, 0, 0};
  const double lhs = apply_left(c, x, 0.3, p).value;
  const double rhs = 2.0 * apply_left(*g, x, 0.3, p).value - 0.5 * apply_left(*w, x, 0.3, p).value;
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-8));
}

TEST_CASE("translation covariance") {
  const AnalyticField g = AnalyticField::gaussian(1.0);
  const AnalyticField shifted = g.shifted({0.7, 0, 0}, -1.2);
  const auto p = params(0.5);
  for (Side side : {Side::left, Side::right}) {
    const double a = apply_operator(g, {0.1, 0, 0}, 0.2, p, side).value;
    const double b = apply_operator(shifted, {0.8, 0, 0}, -1.0, p, side).value;
    CHECK(std::abs(a - b) < 1e-8);
  }
}

TEST_CASE("left and right operators mirror under time reversal") {
  // g is even in t, so the right operator at t equals the left one at -t.
  const AnalyticField g = AnalyticField::gaussian(1.0);
  const auto p = params(0.4);
  CHECK(apply_right(g, {0.3, 0, 0}, 0.5, p).value ==
        doctest::Approx(apply_left(g, {0.3, 0, 0}, -0.5, p).value).epsilon(1e-9));
}

TEST_CASE("s -> 1 approaches the heat operator monotonically") {
  const AnalyticField g = AnalyticField::gaussian(1.0);
  const double heat = g.time_derivative({0, 0, 0}, 0.0) - g.laplacian({0, 0, 0}, 0.0, 1);
  double prev = kInf;
  for (double s : {0.9, 0.95, 0.99}) {
    const double v = apply_left(g, {0, 0, 0}, 0.0, params(s)).value;
    const double err = std::abs(v - heat) / std::abs(heat);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 5e-2);
}

TEST_CASE("batch evaluation preserves order") {
  const AnalyticField g = AnalyticField::gaussian(1.0);
  const std::vector<SpaceTimePoint> pts = {{{0, 0, 0}, 0}, {{0.5, 0, 0}, 0.1}, {{-1, 0, 0}, 0.3}};
  const auto p = params(0.5);
  const auto out = apply_batch(g, pts, p, Side::left);
  REQUIRE(out.size() == 3);
  for (std::size_t i = 0; i < pts.size(); ++i)
    CHECK(out[i].value == apply_left(g, pts[i].x, pts[i].t, p).value);
}

TEST_CASE("convergence check: refinement agrees on smooth input") {
  auto p = params(0.5);
  p.check_convergence = true;
  CHECK_NOTHROW(apply_left(AnalyticField::gaussian(1.0), {0, 0, 0}, 0.0, p));
}

TEST_CASE("convergence check: coarse rule on a steep field throws") {
  auto p = params(0.5);
  p.check_convergence = true;
  p.n_time_nodes = 2;
  p.n_space_nodes = 2;
  p.delta = 0.5;
  p.rel_tol = 1e-12;
  p.abs_tol = 1e-14;
  CHECK_THROWS_AS(apply_left(AnalyticField::gaussian(20.0), {0.1, 0, 0}, 0.0, p), DidNotConverge);
}

TEST_CASE("adjointness examples") {
  const auto p = params(0.5);
  const AnalyticField phi = AnalyticField::gaussian(1.0);
  const auto c = adjointness_check(AnalyticField::constant(1.0), phi, p);
  CHECK(c.left_pairing == 0.0);
  CHECK(c.residual < 1e-2);
  CHECK(adjointness_residual(AnalyticField::gaussian(1.0), phi, p) < 1e-2);
  CHECK(adjointness_residual(AnalyticField::coswave({1, 0, 0}, 0.0), phi, p) < 1e-2);
}
