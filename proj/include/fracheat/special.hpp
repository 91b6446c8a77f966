#pragma once

#include <complex>

namespace fracheat::special {

/// Gamma function on the real line (poles at non-positive integers give NaN).
double gamma(double z);

/// log|Gamma(z)| for z > 0.
double lgamma_pos(double z);

/// Principal-branch power exp(a Log z); returns 0 for z == 0.
std::complex<double> cpow_principal(std::complex<double> z, double a);

/// Upper incomplete gamma Gamma(a, z) for complex z with Re z >= 0 and |z|
/// moderately large (continued fraction, modified Lentz). Throws when the
/// fraction does not settle.
std::complex<double> upper_incomplete_gamma(double a, std::complex<double> z);

}  // namespace fracheat::special
