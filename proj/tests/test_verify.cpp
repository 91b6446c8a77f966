#include <doctest.h>

#include <cmath>

#include "fracheat/verify.hpp"

using namespace fracheat;

namespace {

OperatorParams params(double s = 0.5, int n = 1) {
  OperatorParams p;
  p.s = FracOrder(s);
  p.n = n;
  return p;
}

}  // namespace

TEST_CASE("ray specs") {
  const auto r = RaySpec::geometric(RayFamily::parabola, 10, 10, 4);
  CHECK(r.magnitudes.back() == doctest::Approx(1e4));
  const auto p = r.point(100.0);
  CHECK(p.x[0] == doctest::Approx(10.0));
  CHECK(p.t == doctest::Approx(-100.0));
  CHECK_THROWS_AS(RaySpec::geometric(RayFamily::parabola, 10, 2, 4).validate(), InvalidArgument);
  CHECK_THROWS_AS(RaySpec::geometric(RayFamily::parabola, 10, 10, 3).validate(), InvalidArgument);
}

TEST_CASE("decay along time rays and the parabola") {
  const AnalyticField phi = AnalyticField::schwartz_product(1, 1);
  for (int n : {1, 2}) {
    const auto reps = decay_estimate_check(
        phi, params(0.5, n),
        {RaySpec::geometric(RayFamily::time_axis_negative, 10, 10, 4),
         RaySpec::geometric(RayFamily::parabola, 10, 10, 4)});
    for (const auto& r : reps) {
      CHECK(r.target_exponent == doctest::Approx(n / 2.0 + 1.5));
      CHECK(r.fitted_exponent == doctest::Approx(-(n / 2.0 + 1.5)).epsilon(0.15 / (n / 2.0 + 1.5)));
      CHECK(r.pass);
      CHECK(r.upper_bound_ok);
    }
  }
}

TEST_CASE("space rays fall off faster than any power and exhaust double range") {
  for (const char* spec : {"schwartz_product(a=1,b=1)", "gaussian(a=1)"}) {
    const AnalyticField phi = parse_field(spec);
    CHECK_THROWS_AS(decay_estimate_check(phi, params(),
                                         {RaySpec::geometric(RayFamily::space_axis, 10, 10, 4)}),
                    InsufficientDynamicRange);
  }
}

TEST_CASE("zero field is degenerate") {
  const auto r = decay_estimate_check(AnalyticField::constant(0.0), params(),
                                      {RaySpec::geometric(RayFamily::time_axis_negative, 10, 10, 4)});
  CHECK(r[0].degenerate);
  for (double v : r[0].values) CHECK(v == 0.0);
}

TEST_CASE("decay reports are bit-for-bit reproducible") {
  const auto ray = RaySpec::geometric(RayFamily::parabola, 10, 10, 4);
  const auto a = decay_estimate_check(AnalyticField::schwartz_product(1, 1), params(), {ray});
  const auto b = decay_estimate_check(AnalyticField::schwartz_product(1, 1), params(), {ray});
  CHECK(a[0].values == b[0].values);
  CHECK(a[0].fitted_exponent == b[0].fitted_exponent);
}

TEST_CASE("direct bump integral matches the general quadrature") {
  const AnalyticField bump = AnalyticField::bump(1, 2, 1, 4);
  for (double t : {-10.0, -40.0}) {
    const Point x{std::sqrt(-t), 0, 0};
    const double direct = bump_far_right(bump, x, t, 1, FracOrder(0.5));
    const double general = apply_right(bump, x, t, params()).value;
    CHECK(direct == doctest::Approx(general).epsilon(1e-6));
  }
  CHECK_THROWS_AS(bump_far_right(bump, {0, 0, 0}, 0.0, 1, FracOrder(0.5)), InvalidArgument);
}

TEST_CASE("counterexample floor is positive across dimensions and orders") {
  const AnalyticField bump = AnalyticField::bump(1, 2, 1, 4);
  for (int n : {1, 2})
    for (double s : {0.25, 0.5, 0.75}) {
      const auto c = counterexample_sharpness(n, FracOrder(s), bump, {-1e2, -1e3, -1e4});
      REQUIRE(c.parabola.lower_bound_ratio_min.has_value());
      CHECK(*c.parabola.lower_bound_ratio_min > 0.0);
      CHECK(std::abs(*c.parabola.trend_slope) <= 0.05);
      CHECK(c.control_decays);
      CHECK(c.pass);
    }
}

TEST_CASE("reductions to the fractional Laplacian and the Marchaud derivative") {
  const std::vector<SpaceTimePoint> pts = {{{0, 0, 0}, 0}, {{0.4, 0, 0}, 0.7}, {{-1.1, 0, 0}, 0.3}};
  for (double s : {0.25, 0.5, 0.75}) {
    const auto p = params(s);
    CHECK(reduction_check(ReductionKind::space_to_fraclap, AnalyticField::coswave({1, 0, 0}, 0, 0.3), p, pts)
              .max_relative_error < 1e-3);
    CHECK(reduction_check(ReductionKind::space_to_fraclap, AnalyticField::schwartz_product(1, 0), p, pts)
              .max_relative_error < 1e-3);
    CHECK(reduction_check(ReductionKind::time_to_marchaud, AnalyticField::coswave({0, 0, 0}, 1, 0.3), p, pts)
              .max_relative_error < 1e-3);
    CHECK(reduction_check(ReductionKind::time_to_marchaud, AnalyticField::schwartz_product(0, 1), p, pts)
              .max_relative_error < 1e-3);
  }
  const auto c = reduction_check(ReductionKind::space_to_fraclap, AnalyticField::constant(2.0), params(), pts);
  for (std::size_t i = 0; i < c.operator_values.size(); ++i) {
    CHECK(c.operator_values[i] == 0.0);
    CHECK(c.reference_values[i] == doctest::Approx(0.0));
  }
  CHECK_THROWS_AS(reduction_check(ReductionKind::space_to_fraclap, AnalyticField::gaussian(1), params(), pts),
                  InvalidArgument);
}

TEST_CASE("limit s -> 1 against the heat operator") {
  const auto r = reduction_check(ReductionKind::s_to_one, AnalyticField::gaussian(1), params(),
                                 {{{0, 0, 0}, 0}});
  CHECK(r.orders == std::vector<double>{0.9, 0.95, 0.99});
  CHECK(r.monotone);
  CHECK(r.max_relative_error < 5e-2);
  CHECK(r.max_relative_error == r.errors.back());
}

TEST_CASE("one-dimensional reference operators on a cosine") {
  const AnalyticField w = AnalyticField::coswave({2, 0, 0}, 0, 0.0);
  CHECK(fractional_laplacian_1d(w, 0.0, 0.0, FracOrder(0.5)) == doctest::Approx(2.0).epsilon(1e-6));
  const AnalyticField v = AnalyticField::coswave({0, 0, 0}, 1, 0.0);
  CHECK(marchaud_caputo_1d(v, {0, 0, 0}, 0.0, FracOrder(0.5)) ==
        doctest::Approx(std::sqrt(0.5)).epsilon(1e-6));
}
