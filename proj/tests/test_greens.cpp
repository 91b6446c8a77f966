#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "fracheat/greens.hpp"
#include "fracheat/special.hpp"

using namespace fracheat;
using std::numbers::pi;

namespace {

OperatorParams quad(double s = 0.5, int n = 1) {
  OperatorParams p;
  p.s = FracOrder(s);
  p.n = n;
  return p;
}

std::shared_ptr<const Field> positive_bump() {
  return std::make_shared<AnalyticField>(AnalyticField::bump(1, 2, 1, 4).scaled(-1.0));
}

}  // namespace

TEST_CASE("kernel values") {
  const auto k = GreensKernel::make(1, FracOrder(0.5));
  CHECK(eval_G({1, 0, 0}, -1.0, k).value == 0.0);
  CHECK(eval_G({0, 0, 0}, 1.0, k).value == doctest::Approx(1.0 / (2.0 * pi)).epsilon(1e-12));
  CHECK(eval_G({2, 0, 0}, 1.0, k).value == doctest::Approx(std::exp(-1.0) / (2.0 * pi)).epsilon(1e-12));
  const auto blow = eval_G({0, 0, 0}, 1e-31, k);
  CHECK(blow.infinite);
  CHECK(std::isinf(blow.value));
  CHECK_FALSE(eval_G({0.1, 0, 0}, 1e-31, k).infinite);
}

TEST_CASE("space-mass law") {
  for (int n = 1; n <= 3; ++n)
    for (double s : {0.25, 0.5, 0.75}) {
      const auto k = GreensKernel::make(n, FracOrder(s));
      for (double t : {1e-3, 0.1, 1.0, 50.0}) {
        const double ref = std::pow(t, s - 1.0) / special::gamma(s);
        CHECK(std::abs(space_mass(k, t) / ref - 1.0) < 1e-6);
      }
    }
}

TEST_CASE("cutoff profile plateaus and monotonicity") {
  CHECK(cutoff_profile(0.0) == 1.0);
  CHECK(cutoff_profile(0.5) == 1.0);
  CHECK(cutoff_profile(1.0) == 0.0);
  CHECK(cutoff_profile(1.5) == 0.0);
  double prev = 1.0;
  for (double r = 0.5; r <= 1.0; r += 0.01) {
    CHECK(cutoff_profile(r) <= prev);
    prev = cutoff_profile(r);
  }
}

TEST_CASE("convolution of zero and of a unit pulse") {
  const auto k = GreensKernel::make(1, FracOrder(0.5));
  CHECK(convolve(AnalyticField::constant(0.0), k, {0, 0, 0}, 1.0, quad()) == 0.0);
  // f = 1 on (0, 1) in time, constant in space: u(x, 1) = 1 / Gamma(3/2).
  FunctionField pulse([](const Point&, double t) { return t > 0.0 && t < 1.0 ? 1.0 : 0.0; });
  pulse.with_time_window({0.0, 1.0});
  CHECK(convolve(pulse, k, {0.3, 0, 0}, 1.0, quad()) ==
        doctest::Approx(1.0 / special::gamma(1.5)).epsilon(1e-6));
}

TEST_CASE("convolution needs a bounded time window") {
  const auto k = GreensKernel::make(1, FracOrder(0.5));
  const FunctionField unbounded([](const Point&, double) { return 1.0; });
  CHECK_THROWS_AS(convolve(unbounded, k, {0, 0, 0}, 0.0, quad()), InvalidArgument);
}

TEST_CASE("causality: the future of the source is invisible") {
  const auto k = GreensKernel::make(1, FracOrder(0.5));
  const auto bump = positive_bump();
  FunctionField whole([bump](const Point& x, double t) { return bump->value(x, t); });
  whole.with_time_window({-4.0, 4.0}).with_time_scale(bump->time_scale()).with_space_scale(bump->space_scale());
  FunctionField past([bump](const Point& x, double t) { return t <= 0.5 ? bump->value(x, t) : 0.0; });
  past.with_time_window({-4.0, 0.5}).with_time_scale(bump->time_scale()).with_space_scale(bump->space_scale());
  for (double t : {-1.0, 0.0, 0.5}) {
    const double a = convolve(whole, k, {0.2, 0, 0}, t, quad());
    const double b = convolve(past, k, {0.2, 0, 0}, t, quad());
    CHECK(a == doctest::Approx(b).epsilon(1e-12));
  }
}

TEST_CASE("positivity and monotonicity in the truncation radius") {
  const auto k = GreensKernel::make(1, FracOrder(0.5));
  auto g = std::make_shared<AnalyticField>(AnalyticField::gaussian(0.25));
  const SourceSpec r2(g, 2.0), r4(g, 4.0), r8(g, 8.0);
  for (const auto& pt : std::vector<SpaceTimePoint>{{{0, 0, 0}, 0}, {{1.5, 0, 0}, 2}, {{-3, 0, 0}, 6}}) {
    const double a = convolve(r2, k, pt.x, pt.t, quad());
    const double b = convolve(r4, k, pt.x, pt.t, quad());
    const double c = convolve(r8, k, pt.x, pt.t, quad());
    CHECK(a >= 0.0);
    CHECK(a <= b);
    CHECK(b <= c);
  }
}

TEST_CASE("inversion residual") {
  const auto k = GreensKernel::make(1, FracOrder(0.5));
  const std::vector<SpaceTimePoint> pts = {
      {{0, 0, 0}, 0}, {{0.5, 0, 0}, 0.5}, {{-0.5, 0, 0}, -0.5}, {{1, 0, 0}, 1.5}, {{0.3, 0, 0}, -1}};
  CHECK(greens_inversion_residual(
            std::make_shared<SourceSpec>(std::make_shared<AnalyticField>(AnalyticField::constant(0.0)), 2.0),
            k, quad(), pts) == 0.0);
  CHECK(greens_inversion_residual(positive_bump(), k, quad(), pts) < 5e-2);
  CHECK(greens_inversion_residual(
            std::make_shared<SourceSpec>(
                std::make_shared<AnalyticField>(AnalyticField::gaussian(1.0)), 4.0),
            k, quad(), pts) < 5e-2);
}

TEST_CASE("far-field profile of the truncated solution") {
  const auto k = GreensKernel::make(1, FracOrder(0.25));
  const SourceSpec src(positive_bump(), 2.0);
  const auto space = vR_decay_profile(src, k, DecayDirection::space, {8, 16, 32}, quad(0.25));
  CHECK(space.monotone);
  CHECK(space.asymptotic_exponent == doctest::Approx(-2.5));
  // The sup-in-time profile follows its own power law ...
  for (double r : space.ratios) CHECK(r == doctest::Approx(std::pow(2.0, -2.5)).epsilon(0.2));
  // ... so the |x|^{-(n-2s)} bound, measured from the support, holds with a constant.
  for (std::size_t i = 0; i < space.values.size(); ++i)
    CHECK(space.values[i] * std::pow(space.distances[i] - 2.0, 0.5) <= space.bound_constant * (1 + 1e-12));
  CHECK(std::isfinite(space.bound_constant));
  const auto time = vR_decay_profile(src, k, DecayDirection::time, {8, 16, 32}, quad(0.25));
  CHECK(time.monotone);
  for (double r : time.ratios) CHECK(r == doctest::Approx(std::pow(2.0, -1.25)).epsilon(0.2));
  CHECK(time.fitted_exponent <= -(1.0 - 0.25));

  const SourceSpec zero(std::make_shared<AnalyticField>(AnalyticField::constant(0.0)), 2.0);
  const auto z = vR_decay_profile(zero, k, DecayDirection::time, {8, 16}, quad(0.25));
  for (double v : z.values) CHECK(v == 0.0);
}

TEST_CASE("CSV export") {
  std::ostringstream os;
  write_csv(os, 2, {{{1.0, 2.0, 0.0}, 0.5, 0.25}});
  CHECK(os.str() == "x1,x2,t,value\n1,2,0.5,0.25\n");
}
