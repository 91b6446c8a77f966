#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fracheat/field.hpp"
#include "fracheat/quadrature.hpp"

namespace fracheat {

enum class RayFamily { space_axis, time_axis_negative, time_axis_positive, parabola };

const char* to_string(RayFamily f);

/// Ray of sample points parametrised by magnitude m:
///   space_axis          x = anchor + m e_1, t = anchor_t
///   time_axis_negative  x = anchor, t = anchor_t - m
///   time_axis_positive  x = anchor, t = anchor_t + m
///   parabola            x = sqrt(m) e_1, t = -m        (|x|^2 = |t|, t < 0)
struct RaySpec {
  RayFamily family = RayFamily::time_axis_negative;
  Point anchor{0.0, 0.0, 0.0};
  double anchor_t = 0.0;
  std::vector<double> magnitudes;

  /// Geometric magnitudes first * ratio^k, k < count.
  static RaySpec geometric(RayFamily family, double first, double ratio, int count);

  /// At least 4 samples spanning two decades.
  void validate() const;
  SpaceTimePoint point(double m) const;
};

struct DecayReport {
  RaySpec ray;
  std::vector<double> values;          ///< |operator| at each magnitude
  std::vector<double> weighted;        ///< value * (1 + |x|^{n+2+2s} + |t|^{n/2+1+s})
  double fitted_exponent = 0.0;
  double target_exponent = 0.0;        ///< positive; the fit is compared with its negative
  double tolerance = 0.15;
  std::optional<double> lower_bound_ratio_min;
  std::optional<double> trend_slope;   ///< log weighted vs log magnitude
  bool upper_bound_ok = false;         ///< fitted <= -target + tolerance
  bool pass = false;
  bool degenerate = false;             ///< every value is exactly zero
};

/// Power-law decay of the right operator applied to a rapidly decaying field.
/// Target exponent: n+2+2s on space rays, n/2+1+s on time rays and the parabola
/// (both measured in the ray magnitude). pass requires the fit within tolerance.
/// Throws InsufficientDynamicRange when values underflow before two decades.
std::vector<DecayReport> decay_estimate_check(const Field& phi, const OperatorParams& params,
                                              const std::vector<RaySpec>& rays,
                                              double tolerance = 0.15);

struct CounterexampleReport {
  DecayReport parabola;
  std::vector<double> control_times;     ///< |x| = |t| samples
  std::vector<double> control_weighted;
  bool control_decays = false;
  /// max relative gap between the direct support integral and apply_right.
  double method_gap = 0.0;
  bool pass = false;
};

/// Right operator of the bump far before its support, as the finite integral
///   -C_{n,s} int int_{supp} eta(y,tau) (tau-t)^{-n/2-1-s} e^{-|x-y|^2/4(tau-t)} dy dtau.
/// Requires t below the bump's time window.
double bump_far_right(const AnalyticField& bump, const Point& x, double t, int n, FracOrder s,
                      int nodes = 24);

/// Weighted ratio along |x|^2 = |t| at the given (negative) times; positive floor
/// and flat trend (|slope| <= slope_tol) certify that the decay exponent is attained.
CounterexampleReport counterexample_sharpness(int n, FracOrder s, const AnalyticField& bump,
                                              const std::vector<double>& times,
                                              double slope_tol = 0.05);

enum class ReductionKind { space_to_fraclap, time_to_marchaud, s_to_one };

const char* to_string(ReductionKind k);

struct ReductionReport {
  ReductionKind kind = ReductionKind::space_to_fraclap;
  std::vector<double> operator_values;   ///< apply_left
  std::vector<double> reference_values;  ///< 1-D quadrature or local heat operator
  std::vector<double> orders;            ///< s per entry (s_to_one), else params.s
  std::vector<double> errors;            ///< relative error per entry
  double max_relative_error = 0.0;       ///< s_to_one: error at the largest order
  bool monotone = true;                  ///< s_to_one: errors decrease
};

/// (-Delta)^s in one dimension by its own singular integral
///   c_{1,s} int_0^inf (2u(x) - u(x+h) - u(x-h)) h^{-1-2s} dh,
/// c_{1,s} = 4^s Gamma(1/2+s) / (sqrt(pi) |Gamma(-s)|), at fixed t.
double fractional_laplacian_1d(const Field& u, double x, double t, FracOrder s);

/// Left Marchaud derivative in time at fixed x, computed in Caputo form
///   (1/Gamma(1-s)) int_0^inf u_t(x, t - tau) tau^{-s} dtau.
double marchaud_caputo_1d(const Field& u, const Point& x, double t, FracOrder s);

/// space_to_fraclap needs a t-independent field, time_to_marchaud an
/// x-independent one (n = 1). s_to_one evaluates at s in {0.9, 0.95, 0.99}
/// against (d_t - Delta)u.
ReductionReport reduction_check(ReductionKind kind, const AnalyticField& field,
                                const OperatorParams& params,
                                const std::vector<SpaceTimePoint>& points);

}  // namespace fracheat
