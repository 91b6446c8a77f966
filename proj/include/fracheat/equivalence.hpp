#pragma once

#include <memory>
#include <vector>

#include "fracheat/greens.hpp"

namespace fracheat {

enum class SourceKind { pure_forcing, contraction };

const char* to_string(SourceKind k);

/// f(x,t,u) = (g(x,t) + kappa sin u) phi_R(x) eta_R(t); kappa is ignored for pure forcing.
struct NonlinearSource {
  std::shared_ptr<const Field> g;
  SourceKind kind = SourceKind::pure_forcing;
  double kappa = 0.0;
  double R = 2.0;

  void validate() const;
  double cutoff(const Point& x, double t) const;
  double operator()(const Point& x, double t, double u) const;
};

/// Uniform lattice [-x_half, x_half]^n x [t_lo, t_hi]; nx, nt points per axis.
struct Lattice {
  int n = 1;
  double x_half = 2.0;
  double t_lo = -4.0;
  double t_hi = 4.0;
  int nx = 17;
  int nt = 33;

  /// Lattice covering the support box B_R x (-R^2, R^2) with spacing about h.
  static Lattice covering(int n, double R, double hx, double ht);

  void validate() const;
  std::size_t size() const;
  double x_at(int j) const { return -x_half + 2.0 * x_half * j / (nx - 1); }
  double t_at(int m) const { return t_lo + (t_hi - t_lo) * m / (nt - 1); }
  /// Flat index runs time slowest, x_n fastest.
  SpaceTimePoint point(std::size_t idx) const;
};

struct PicardState {
  Lattice lattice;
  int iterations = 0;
  std::vector<double> values;
  std::vector<double> diff_norms;  ///< sup |u_{k+1} - u_k| per sweep
  double contraction_constant = 0.0;
  bool converged = false;

  /// Tensor cubic interpolation; the nearest edge cell is used outside the box.
  double interpolate(const Point& x, double t) const;
  /// diff_norms[k+1] / diff_norms[k].
  std::vector<double> ratios() const;
};

/// sup over the lattice of G * (phi_R eta_R).
double contraction_precheck(const GreensKernel& kernel, double R, const Lattice& lattice,
                            const OperatorParams& quad);

/// Picard iteration u_{k+1} = G * f(., ., u_k) from u_0 = 0 on the lattice.
/// Pure forcing needs a single sweep. Contraction requires the lattice to cover
/// the support box and kappa * precheck < 1, else NotContracting.
PicardState solve_integral_equation(const NonlinearSource& src, const GreensKernel& kernel,
                                    const Lattice& lattice, const OperatorParams& quad,
                                    double tol = 1e-6, int max_iter = 50);

/// Solution field G * f(., ., u_K) with u_K the interpolated final iterate.
std::shared_ptr<const Field> solution_field(const PicardState& state, const NonlinearSource& src,
                                            const GreensKernel& kernel, const OperatorParams& quad);

/// max |apply_left(U) - f(x,t,u_K)| / max |f| at the points, U = solution_field.
double pde_residual(const PicardState& state, const NonlinearSource& src,
                    const GreensKernel& kernel, const OperatorParams& params,
                    const std::vector<SpaceTimePoint>& points);

struct RadiusLadder {
  std::vector<double> radii;
  std::vector<std::vector<double>> values;  ///< values[r][lattice index]
  double worst_violation = 0.0;             ///< max over pairs of u^{R1} - u^{R2}, scaled
  bool monotone = true;
};

/// Pure-forcing solutions on a shared lattice for increasing R; checks
/// u^{R1} <= u^{R2} up to `slack` relative to max |u|.
RadiusLadder monotone_in_radius(std::shared_ptr<const Field> g, const GreensKernel& kernel,
                                const std::vector<double>& radii, const Lattice& lattice,
                                const OperatorParams& quad, double slack = 1e-9);

struct DivergenceCertificate {
  std::vector<double> horizons;  ///< T values, doubling
  std::vector<double> values;    ///< truncated integral at each T
  double T_star = 0.0;           ///< value first reaches threshold * C (inf when C = 0)
  double max_doubling_error = 0.0;  ///< max |v(2T)/v(T) - 2^s|
};

/// Truncated integral of G against the constant C over a window of length T,
/// int_0^T C int G(x, sigma) dx dsigma = C T^s / Gamma(s+1), for doubling T.
DivergenceCertificate nontrivial_constant_rejection(const GreensKernel& kernel, double C,
                                                    double threshold = 1e6);

}  // namespace fracheat
