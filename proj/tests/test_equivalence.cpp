#include <doctest.h>

#include <cmath>

#include "fracheat/equivalence.hpp"
#include "fracheat/special.hpp"

using namespace fracheat;

namespace {

std::shared_ptr<const Field> positive_bump() {
  return std::make_shared<AnalyticField>(AnalyticField::bump(1, 2, 1, 4).scaled(-1.0));
}

const GreensKernel kKernel = GreensKernel::make(1, FracOrder(0.5));

}  // namespace

TEST_CASE("lattice layout") {
  const Lattice l = Lattice::covering(2, 2.0, 0.5, 1.0);
  CHECK(l.nx == 9);
  CHECK(l.nt == 9);
  CHECK(l.size() == 729u);
  const auto p = l.point(l.size() - 1);
  CHECK(p.x[0] == doctest::Approx(2.0));
  CHECK(p.x[1] == doctest::Approx(2.0));
  CHECK(p.t == doctest::Approx(4.0));
  const auto q = l.point(1);
  CHECK(q.x[1] == doctest::Approx(-1.5));
  CHECK(q.x[0] == doctest::Approx(-2.0));
  Lattice bad = l;
  bad.nx = 3;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("cubic interpolation reproduces cubics") {
  PicardState st;
  st.lattice = Lattice::covering(1, 2.0, 0.5, 1.0);
  auto f = [](double x, double t) { return 1 + x - 2 * x * x * x + 0.5 * t * t * t - x * t; };
  for (std::size_t i = 0; i < st.lattice.size(); ++i) {
    const auto p = st.lattice.point(i);
    st.values.push_back(f(p.x[0], p.t));
  }
  for (double x : {-1.9, -0.3, 0.77, 1.95})
    for (double t : {-3.7, 0.1, 3.99}) CHECK(st.interpolate({x, 0, 0}, t) == doctest::Approx(f(x, t)));
}

TEST_CASE("pure forcing converges in one sweep") {
  const NonlinearSource src{positive_bump(), SourceKind::pure_forcing, 0.0, 2.0};
  const Lattice lat = Lattice::covering(1, 2.0, 0.5, 0.5);
  const auto st = solve_integral_equation(src, kKernel, lat, OperatorParams{});
  CHECK(st.converged);
  CHECK(st.iterations == 1);
  REQUIRE(st.diff_norms.size() == 1);
  const SourceSpec truncated(positive_bump(), 2.0);
  for (std::size_t i = 0; i < lat.size(); i += 11) {
    const auto p = lat.point(i);
    CHECK(st.values[i] == doctest::Approx(convolve(truncated, kKernel, p.x, p.t, OperatorParams{})));
  }
  CHECK(pde_residual(st, src, kKernel, OperatorParams{}, {{{0, 0, 0}, 0}, {{0.5, 0, 0}, 1}}) < 5e-2);
}

TEST_CASE("zero forcing with the nonlinearity stays zero") {
  const NonlinearSource src{std::make_shared<AnalyticField>(AnalyticField::constant(0.0)),
                            SourceKind::contraction, 0.2, 2.0};
  const auto st = solve_integral_equation(src, kKernel, Lattice::covering(1, 2.0, 0.5, 0.5), OperatorParams{});
  for (double v : st.values) CHECK(v == 0.0);
  CHECK(pde_residual(st, src, kKernel, OperatorParams{}, {{{0, 0, 0}, 0}}) == 0.0);
}

TEST_CASE("contraction: precheck, geometric trace, residual, fixed point") {
  const NonlinearSource src{positive_bump(), SourceKind::contraction, 0.2, 2.0};
  const Lattice lat = Lattice::covering(1, 2.0, 0.5, 0.5);
  const auto st = solve_integral_equation(src, kKernel, lat, OperatorParams{});
  CHECK(st.converged);
  CHECK(st.contraction_constant < 1.0);
  for (double r : st.ratios()) CHECK(r < 0.9);
  CHECK(pde_residual(st, src, kKernel, OperatorParams{}, {{{0, 0, 0}, 0}, {{0.5, 0, 0}, 1}}) < 1e-1);
  // One more outer loop from the converged state barely moves it.
  const auto u = solution_field(st, src, kKernel, OperatorParams{});
  double change = 0.0, sup = 0.0;
  for (std::size_t i = 0; i < lat.size(); i += 7) {
    const auto p = lat.point(i);
    change = std::max(change, std::abs(u->value(p.x, p.t) - st.values[i]));
    sup = std::max(sup, std::abs(st.values[i]));
  }
  CHECK(change < 1e-6 * std::max(1.0, sup) * 10.0);
}

TEST_CASE("precheck failure and iteration cap") {
  const Lattice lat = Lattice::covering(1, 2.0, 0.5, 0.5);
  const NonlinearSource strong{positive_bump(), SourceKind::contraction, 5.0, 2.0};
  try {
    solve_integral_equation(strong, kKernel, lat, OperatorParams{});
    FAIL("expected NotContracting");
  } catch (const NotContracting& e) {
    CHECK(e.constant() >= 1.0);
  }
  const NonlinearSource mild{positive_bump(), SourceKind::contraction, 0.2, 2.0};
  CHECK_THROWS_AS(solve_integral_equation(mild, kKernel, lat, OperatorParams{}, 1e-12, 2), MaxIterExceeded);
  Lattice small = lat;
  small.x_half = 1.0;
  CHECK_THROWS_AS(solve_integral_equation(mild, kKernel, small, OperatorParams{}), InvalidArgument);
}

TEST_CASE("causality of the solution") {
  auto bump = positive_bump();
  auto cut = std::make_shared<FunctionField>([bump](const Point& x, double t) {
    return t <= 0.0 ? bump->value(x, t) : 0.0;
  });
  cut->with_time_window({-4.0, 0.0}).with_time_scale(bump->time_scale()).with_space_scale(bump->space_scale());
  const Lattice lat = Lattice::covering(1, 2.0, 0.5, 0.5);
  const auto a = solve_integral_equation({bump, SourceKind::contraction, 0.2, 2.0}, kKernel, lat, OperatorParams{});
  const auto b = solve_integral_equation({cut, SourceKind::contraction, 0.2, 2.0}, kKernel, lat, OperatorParams{});
  // The centred cubic stencil reads one lattice row ahead, so agreement is up
  // to interpolation error rather than exact.
  for (std::size_t i = 0; i < lat.size(); ++i)
    if (lat.point(i).t <= 0.0) CHECK(a.values[i] == doctest::Approx(b.values[i]).epsilon(2e-3));
}

TEST_CASE("monotone in the truncation radius") {
  const auto ladder = monotone_in_radius(std::make_shared<AnalyticField>(AnalyticField::gaussian(0.25)),
                                         kKernel, {2, 4, 8}, Lattice::covering(1, 2.0, 0.5, 1.0),
                                         OperatorParams{});
  CHECK(ladder.monotone);
  CHECK(ladder.values.size() == 3);
  CHECK_THROWS_AS(monotone_in_radius(positive_bump(), kKernel, {4, 2}, Lattice{}, OperatorParams{}),
                  InvalidArgument);
}

TEST_CASE("nonzero constants cannot solve the homogeneous integral equation") {
  const auto cert = nontrivial_constant_rejection(kKernel, 1.0);
  CHECK(cert.T_star == doctest::Approx(std::pow(1e6 * special::gamma(1.5), 2.0)).epsilon(1e-6));
  CHECK(cert.T_star == doctest::Approx(7.85e11).epsilon(1e-3));
  CHECK(cert.max_doubling_error < 1e-9);
  const auto zero = nontrivial_constant_rejection(kKernel, 0.0);
  CHECK(std::isinf(zero.T_star));
  for (double v : zero.values) CHECK(v == 0.0);
}
