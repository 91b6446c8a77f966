#include "fracheat/core.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fracheat/special.hpp"

namespace fracheat {

double normalization_C(int n, FracOrder s) {
  checked_dimension(n);
  return 1.0 / (std::pow(4.0 * std::numbers::pi, 0.5 * n) * std::abs(special::gamma(-s.value())));
}

double normalization_A(int n, FracOrder s) {
  checked_dimension(n);
  return 1.0 / (std::pow(4.0 * std::numbers::pi, 0.5 * n) * special::gamma(s.value()));
}

std::complex<double> complex_power_symbol(const SymbolPoint& p, FracOrder s, Side side) {
  const double k2 = p.xi[0] * p.xi[0] + p.xi[1] * p.xi[1] + p.xi[2] * p.xi[2];
  const std::complex<double> z(k2, side == Side::left ? p.rho : -p.rho);
  return special::cpow_principal(z, s.value());
}

IntegralValue gamma_tail_identity(double lambda, FracOrder s) {
  if (!(lambda >= 0.0)) throw InvalidArgument("gamma_tail_identity requires lambda >= 0");
  if (lambda == 0.0) return {};
  const double sv = s.value();
  // (e^{-x} - 1)/x stays bounded, so tau^{-s} carries the whole endpoint singularity.
  auto f = [&](double tau) {
    const double x = lambda * tau;
    const double ratio = x > 1e-8 ? std::expm1(-x) / x : -1.0 + 0.5 * x;
    return lambda * ratio * std::pow(tau, -sv);
  };
  // Split at the decay scale so both halves see a single endpoint feature.
  const double mid = 1.0 / lambda;
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  double err1 = 0.0, err2 = 0.0, l1 = 0.0, l2 = 0.0;
  const double a = ts.integrate(f, 0.0, mid, 1e-13, &err1, &l1);
  const double b = es.integrate(f, mid, std::numeric_limits<double>::infinity(), 1e-13, &err2, &l2);
  IntegralValue out;
  out.value = a + b;
  out.error_estimate = err1 * std::max(l1, std::abs(a)) + err2 * std::max(l2, std::abs(b));
  out.converged = std::isfinite(out.value) && out.error_estimate <= 1e-8 * std::abs(out.value);
  return out;
}

IntegralValue time_kernel_integral(double r, int n, FracOrder s) {
  if (!(r > 0.0)) throw InvalidArgument("time_kernel_integral requires r > 0");
  checked_dimension(n);
  const double q = 0.5 * n + 1.0 + s.value();
  const double r2 = r * r;
  // Log form: near sigma = 0 the power overflows long before the exponential underflows.
  auto f = [&](double sigma) {
    return sigma > 0.0 ? std::exp(-r2 / (4.0 * sigma) - q * std::log(sigma)) : 0.0;
  };
  const double mid = r2 / 4.0;
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  double err1 = 0.0, err2 = 0.0, l1 = 0.0, l2 = 0.0;
  const double a = ts.integrate(f, 0.0, mid, 1e-14, &err1, &l1);
  const double b = es.integrate(f, mid, std::numeric_limits<double>::infinity(), 1e-14, &err2, &l2);
  IntegralValue out;
  out.value = a + b;
  out.error_estimate = err1 * l1 + err2 * l2;
  out.converged = std::isfinite(out.value) && out.error_estimate <= 1e-10 * std::abs(out.value);
  return out;
}

double time_kernel_closed_form(double r, int n, FracOrder s) {
  if (!(r > 0.0)) throw InvalidArgument("time_kernel_closed_form requires r > 0");
  const double q = 0.5 * n + s.value();
  return std::pow(4.0, q) * special::gamma(q) * std::pow(r, -(n + 2.0 * s.value()));
}

double kernel_comparison_bound(double r, double sigma, int n, FracOrder s) {
  if (!(sigma > 0.0)) throw InvalidArgument("kernel_comparison_bound requires sigma > 0");
  if (!(r >= 0.0)) throw InvalidArgument("kernel_comparison_bound requires r >= 0");
  const double q = 0.5 * n + 1.0 + s.value();
  // lhs * sigma^q = e^{-r^2/4sigma};  lhs * r^{2q} = e^{-u} (4u)^q with u = r^2/(4 sigma)
  const double u = r * r / (4.0 * sigma);
  const double e = std::exp(-u);
  return e + (r == 0.0 ? 0.0 : std::exp(-u + q * std::log(4.0 * u)));
}

KernelSweep kernel_comparison_sweep(int n, FracOrder s, double lo, double hi, int per_axis) {
  if (!(lo > 0.0 && hi > lo) || per_axis < 2)
    throw InvalidArgument("kernel sweep needs 0 < lo < hi and at least 2 samples per axis");
  KernelSweep out;
  const double step = std::log(hi / lo) / (per_axis - 1);
  for (int i = 0; i < per_axis; ++i) {
    const double r = lo * std::exp(step * i);
    for (int j = 0; j < per_axis; ++j) {
      const double sigma = lo * std::exp(step * j);
      const double v = kernel_comparison_bound(r, sigma, n, s);
      ++out.samples;
      if (v > out.max_ratio) {
        out.max_ratio = v;
        out.r_at_max = r;
        out.sigma_at_max = sigma;
      }
    }
  }
  return out;
}

}  // namespace fracheat
