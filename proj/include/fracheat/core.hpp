#pragma once

#include <complex>
#include <vector>

#include "fracheat/field.hpp"
#include "fracheat/types.hpp"

namespace fracheat {

/// C_{n,s} = 1 / ((4 pi)^{n/2} |Gamma(-s)|), the constant in front of the singular integral.
double normalization_C(int n, FracOrder s);

/// A_{n,s} = 1 / ((4 pi)^{n/2} Gamma(s)), the constant of the fundamental solution.
double normalization_A(int n, FracOrder s);

/// Principal branch of (i rho + |xi|^2)^s (left) or (-i rho + |xi|^2)^s (right).
/// The base lies in the closed right half-plane; the value at base 0 is 0.
std::complex<double> complex_power_symbol(const SymbolPoint& p, FracOrder s, Side side);

struct IntegralValue {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
};

/// int_0^inf (e^{-lambda tau} - 1) tau^{-1-s} dtau by double-exponential quadrature.
/// Equals Gamma(-s) lambda^s.
IntegralValue gamma_tail_identity(double lambda, FracOrder s);

/// int_0^inf exp(-r^2/(4 sigma)) sigma^{-(n/2+1+s)} dsigma by quadrature.
IntegralValue time_kernel_integral(double r, int n, FracOrder s);

/// 4^{n/2+s} Gamma(n/2+s) r^{-(n+2s)}.
double time_kernel_closed_form(double r, int n, FracOrder s);

/// lhs * (r^{n+2+2s} + sigma^{n/2+1+s}) where lhs = e^{-r^2/(4 sigma)} / sigma^{n/2+1+s}.
/// Bounded over all (r, sigma), which is the comparison the far-field estimate uses.
double kernel_comparison_bound(double r, double sigma, int n, FracOrder s);

struct KernelSweep {
  double max_ratio = 0.0;
  double r_at_max = 0.0;
  double sigma_at_max = 0.0;
  std::size_t samples = 0;
};

/// Log-spaced sweep of kernel_comparison_bound over r, sigma in [lo, hi].
KernelSweep kernel_comparison_sweep(int n, FracOrder s, double lo, double hi, int per_axis);

// ---------------------------------------------------------------------------
// Membership in the slowly increasing class

enum class Membership { member, nonmember, inconclusive };

const char* to_string(Membership m);

struct MembershipResult {
  Membership verdict = Membership::inconclusive;
  /// Integral of |u| * weight over the largest box, plus the geometric tail when it converges.
  double integral_estimate = 0.0;
  std::vector<double> shell_contributions;  ///< shell k: box_k minus box_{k-1}
  std::vector<double> shell_ratios;         ///< contribution_k / contribution_{k-1}
};

/// Dyadic-shell test of int |u| / (1 + |x|^{n+2+2s} + |t|^{n/2+1+s}) < inf.
///
/// Box k is [-2^k, 2^k]^n x [-4^k, 4^k]; shells run up to 2^k <= r_max. The
/// field is a member when the last two shell ratios are below 1 - tol and a
/// nonmember when both exceed 1 + tol.
MembershipResult membership_L2ss(const Field& field, int n, FracOrder s, double r_max,
                                 double tol = 0.05);

}  // namespace fracheat
