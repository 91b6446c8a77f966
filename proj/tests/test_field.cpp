#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fracheat/field.hpp"
#include "fracheat/grid.hpp"

using namespace fracheat;

TEST_CASE("mini-language round trip") {
  for (const char* text : {"constant(c=2.5)", "coswave(xi1=1,xi2=-0.5,rho=2,phase=0.3)",
                           "gaussian(a=0.7)", "bump(r1=1,r2=2,t1=1,t2=4)", "monomial(axis=2)",
                           "schwartz_product(a=1,b=3)", "gaussian(a=1,amp=2,x01=0.5,t0=-1)"}) {
    const AnalyticField f = parse_field(text);
    const AnalyticField g = parse_field(f.to_string());
    for (double t : {-0.7, 0.0, 1.3})
      CHECK(g.value({0.3, -0.2, 0.1}, t) == f.value({0.3, -0.2, 0.1}, t));
  }
  CHECK(parse_field("coswave(xi=1)").xi()[0] == 1.0);
  CHECK(parse_field("  gaussian ( a = 2 ) ").param("a") == 2.0);
}

TEST_CASE("parse errors name the offending token") {
  auto token_of = [](const std::string& text) {
    try {
      parse_field(text);
    } catch (const ParseError& e) {
      return e.token();
    }
    return std::string("<no error>");
  };
  CHECK(token_of("cosweve(xi=1)") == "cosweve");
  CHECK(token_of("gaussian(b=1)") == "b");
  CHECK(token_of("gaussian(a=1,a=2)") == "a");
  CHECK(token_of("gaussian(a=1) extra") == "extra");
  CHECK(token_of("gaussian(a=)") == ")");
  CHECK(token_of("coswave(xi=1,rho=0") == "<end of input>");
}

TEST_CASE("parameter validation per kind") {
  CHECK_THROWS_AS(AnalyticField::gaussian(-1.0), ParseError);
  CHECK_THROWS_AS(AnalyticField::bump(2, 1, 1, 4), ParseError);
  CHECK_THROWS_AS(AnalyticField::bump(1, 2, 4, 1), ParseError);
  CHECK_THROWS_AS(AnalyticField::monomial(4), ParseError);
  CHECK_NOTHROW(AnalyticField::gaussian(0.0));
}

TEST_CASE("bump: plateau, support, range and radial monotonicity") {
  const AnalyticField b = AnalyticField::bump(1, 2, 1, 4);
  CHECK(b.value({0.5, 0, 0}, 0.5) == doctest::Approx(-1.0));
  CHECK(b.value({2.0, 0, 0}, 0.0) == 0.0);
  CHECK(b.value({0.0, 0, 0}, 4.0) == 0.0);
  double prev = -1.0;
  for (double r = 0.0; r <= 2.2; r += 0.05) {
    const double v = b.value({r, 0, 0}, 0.3);
    CHECK(v >= -1.0);
    CHECK(v <= 0.0);
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
}

TEST_CASE("closed-form derivatives agree with differences") {
  for (const char* text : {"coswave(xi1=1,xi2=0.5,rho=2,phase=0.3)", "gaussian(a=0.7)",
                           "bump(r1=1,r2=2,t1=1,t2=4)", "schwartz_product(a=1,b=3)"}) {
    const AnalyticField f = parse_field(text);
    const Point x{0.4, -0.3, 0.0};
    const double t = 0.2;
    CHECK(f.time_derivative(x, t) ==
          doctest::Approx(fd_time_derivative(f, x, t, 1e-4)).epsilon(1e-5));
    CHECK(f.laplacian(x, t, 2) == doctest::Approx(fd_laplacian(f, x, t, 2, 1e-3)).epsilon(1e-4));
  }
}

TEST_CASE("linear combination adds values and derivatives") {
  LinearCombination c;
  c.add(2.0, std::make_shared<AnalyticField>(AnalyticField::gaussian(1.0)));
  c.add(-1.0, std::make_shared<AnalyticField>(AnalyticField::constant(3.0)));
  CHECK(c.value({0, 0, 0}, 0.0) == doctest::Approx(-1.0));
  CHECK(c.laplacian({0, 0, 0}, 0.0, 1) == doctest::Approx(-4.0));
}

TEST_CASE("grid validation and coordinates") {
  SpaceTimeGrid g;
  g.Nx = 5;
  CHECK_THROWS_AS(g.validate(), InvalidArgument);
  g.Nx = 2;
  CHECK_THROWS_AS(g.validate(), InvalidArgument);
  g = {};
  g.n = 2;
  g.Nx = 4;
  g.Nt = 6;
  CHECK(g.size() == 96u);
  Point x;
  double t;
  g.coordinates(g.size() - 1, x, t);
  CHECK(x[0] == doctest::Approx(g.x_at(3)));
  CHECK(x[1] == doctest::Approx(g.x_at(3)));
  CHECK(t == doctest::Approx(g.t_at(5)));
}

TEST_CASE("sampled field binary round trip") {
  SpaceTimeGrid g;
  g.n = 2;
  g.Nx = 4;
  g.Nt = 8;
  g.Lx = 3.0;
  const SampledField f = SampledField::sample(AnalyticField::gaussian(0.5), g);
  std::stringstream ss;
  write_binary(ss, f);
  CHECK(ss.str().size() == 3 * 8 + 2 * 8 + 16 * g.size());
  const SampledField back = read_binary(ss);
  CHECK(back.grid.n == 2);
  CHECK(back.grid.Lx == 3.0);
  CHECK(back.values == f.values);
  std::stringstream bad("short");
  CHECK_THROWS(read_binary(bad));
}
