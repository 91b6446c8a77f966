#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "fracheat/grid.hpp"
#include "fracheat/quadrature.hpp"

namespace fracheat {

/// FFT plan over a SpaceTimeGrid.
///
/// Convention: a sampled mode exp(i(xi.x + rho t)) sits in bin (k, m) with
/// xi = 2 pi k / L_x and rho = 2 pi m / L_t (k, m in FFT order), so the left
/// operator multiplies bin (k, m) by (i rho + |xi|^2)^s.
class SpectralPlan {
 public:
  explicit SpectralPlan(const SpaceTimeGrid& grid);
  ~SpectralPlan();
  SpectralPlan(const SpectralPlan&) = delete;
  SpectralPlan& operator=(const SpectralPlan&) = delete;

  const SpaceTimeGrid& grid() const { return grid_; }

  /// Signed integer frequency index of FFT bin j on an axis of N points.
  static int signed_index(int j, int N) { return j <= N / 2 ? j : j - N; }
  double xi_of(int j) const;
  double rho_of(int m) const;

  /// Unnormalised forward transform (exp(-i...)).
  std::vector<std::complex<double>> forward(const std::vector<std::complex<double>>& v) const;
  /// Inverse transform including the 1/N factor.
  std::vector<std::complex<double>> inverse(const std::vector<std::complex<double>>& v) const;

  /// Symbol multiplier of flat bin `idx`. The time Nyquist bin takes the real
  /// part of the symbol so real input stays real; the zero bin gets 0.
  std::complex<double> multiplier(std::size_t idx, double s, Side side) const;

 private:
  SpaceTimeGrid grid_;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Transform, multiply each bin by the operator symbol, transform back.
SampledField apply_symbol(const SampledField& f, FracOrder s, Side side);
SampledField apply_symbol(const SpectralPlan& plan, const SampledField& f, FracOrder s, Side side);

/// Component annihilated by the discrete symbol: the constant equal to the mean.
SampledField solve_homogeneous_projection(const SampledField& f, FracOrder s);

/// Trigonometric interpolant of a sampled field at an arbitrary point.
std::complex<double> trig_interpolate(const SpectralPlan& plan, const SampledField& f,
                                      const Point& x, double t);

/// Throws IncommensurateFrequency when a coswave frequency is off the grid's lattice.
void require_commensurate(const AnalyticField& field, const SpaceTimeGrid& grid);

struct CrossValidation {
  std::vector<double> spectral;
  std::vector<double> quadrature;
  /// max_i |spectral_i - quadrature_i| / max_i |quadrature_i| (0 when both vanish).
  double max_discrepancy = 0.0;
};

/// Samples `field` on the grid, applies the left symbol and compares with
/// quadrature at `points`. Throws IncommensurateFrequency when a coswave
/// frequency is off the lattice.
CrossValidation cross_validate(const AnalyticField& field, const SpaceTimeGrid& grid,
                               const OperatorParams& params,
                               const std::vector<SpaceTimePoint>& points);

}  // namespace fracheat
