#include "fracheat/special.hpp"

#include <cmath>
#include <limits>

#include "fracheat/types.hpp"

namespace fracheat::special {

double gamma(double z) {
  if (z <= 0.0 && z == std::floor(z)) return std::numeric_limits<double>::quiet_NaN();
  return std::tgamma(z);
}

double lgamma_pos(double z) {
  if (!(z > 0.0)) throw InvalidArgument("lgamma_pos requires z > 0");
  return std::lgamma(z);
}

std::complex<double> cpow_principal(std::complex<double> z, double a) {
  if (z == std::complex<double>(0.0, 0.0)) return {0.0, 0.0};
  return std::exp(a * std::log(z));
}

std::complex<double> upper_incomplete_gamma(double a, std::complex<double> z) {
  using C = std::complex<double>;
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  // Gamma(a,z) = e^{-z} z^a / (z + 1 - a - 1(1-a)/(z + 3 - a - 2(2-a)/(z + 5 - a - ...)))
  C b = z + 1.0 - a;
  C c = 1.0 / tiny;
  C d = 1.0 / b;
  C h = d;
  for (int i = 1; i < 5000; ++i) {
    const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const C del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return std::exp(-z + a * std::log(z)) * h;
  }
  throw DidNotConverge("incomplete gamma continued fraction did not converge");
}

}  // namespace fracheat::special
