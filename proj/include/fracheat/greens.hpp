#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "fracheat/field.hpp"
#include "fracheat/quadrature.hpp"
#include "fracheat/types.hpp"

namespace fracheat {

/// Fundamental solution G(x,t) = A e^{-|x|^2/4t} t^{-(n/2+1-s)} for t > 0, 0 otherwise.
struct GreensKernel {
  int n = 1;
  FracOrder s{0.5};
  double A = 0.0;

  static GreensKernel make(int n, FracOrder s);
};

inline constexpr double kTimeFloor = 1e-30;

struct KernelValue {
  double value = 0.0;
  bool infinite = false;  ///< x = 0 and 0 < t < kTimeFloor
};

KernelValue eval_G(const Point& x, double t, const GreensKernel& kernel);

/// int G(x, t) dx by Gauss-Hermite quadrature after x = 2 sqrt(t) z.
double space_mass(const GreensKernel& kernel, double t, int nodes = 24);

/// phi(r) = 1 for r <= 1/2, 0 for r >= 1, quintic smoothstep in between.
double cutoff_profile(double r);

/// Source f, optionally truncated to f(y,tau) phi(|y|/R) phi(|tau|/R^2).
class SourceSpec final : public Field {
 public:
  explicit SourceSpec(std::shared_ptr<const Field> f, std::optional<double> R = std::nullopt);

  const Field& inner() const { return *f_; }
  std::optional<double> radius() const { return R_; }

  double value(const Point& x, double t) const override;
  double time_derivative(const Point& x, double t) const override;
  double laplacian(const Point& x, double t, int n) const override;
  double time_scale() const override;
  double space_scale() const override;
  std::optional<TimeWindow> time_window() const override;
  std::shared_ptr<const SpatialRule> spatial_rule(int n, int nodes) const override;
  double sup_abs() const override { return f_->sup_abs(); }
  bool is_constant() const override { return f_->is_constant() && !R_; }

 private:
  std::shared_ptr<const Field> f_;
  std::optional<double> R_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<int, int>, std::shared_ptr<const SpatialRule>> rules_;
};

/// u(x,t) = int int G(x-y, t-tau) f(y,tau) dy dtau.
///
/// With sigma = t - tau this is (1/Gamma(s)) int_0^inf sigma^{s-1} M_f(sigma) dsigma,
/// M_f the past heat average of f. The first panel carries the sigma^{s-1}
/// weight in a Gauss-Jacobi rule. The source must have a time window.
double convolve(const Field& source, const GreensKernel& kernel, const Point& x, double t,
                const OperatorParams& quad);

/// Convolution G * f viewed as a field. Heat averages use the semigroup identity
///   K_sigma * (G * f) = (1/Gamma(s)) int_sigma^inf (rho - sigma)^{s-1} M_f(rho) drho,
/// so the spatial integral of u never has to be discretised. Derivatives are
/// central differences.
class ConvolvedField final : public Field {
 public:
  ConvolvedField(std::shared_ptr<const Field> source, GreensKernel kernel, OperatorParams quad);

  double value(const Point& x, double t) const override;
  double time_derivative(const Point& x, double t) const override;
  double laplacian(const Point& x, double t, int n) const override;
  double time_scale() const override { return source_->time_scale(); }
  double space_scale() const override { return source_->space_scale(); }
  std::optional<TimeWindow> time_window() const override;
  double heat_difference(const Point& x, double t, double u0, double sigma, Side side, int n,
                         int nodes) const override;
  bool is_constant() const override { return false; }

  const Field& source() const { return *source_; }

 private:
  std::shared_ptr<const Field> source_;
  GreensKernel kernel_;
  OperatorParams quad_;
};

/// max |apply_left(G * f) - f| / max |f| over the sample points.
double greens_inversion_residual(std::shared_ptr<const Field> source, const GreensKernel& kernel,
                                 const OperatorParams& params,
                                 const std::vector<SpaceTimePoint>& points);

enum class DecayDirection { space, time };

struct DecayProfile {
  DecayDirection direction = DecayDirection::space;
  std::vector<double> distances;
  /// space: sup over t of v_R(d e_1, t); time: sup over x of v_R(x, d).
  std::vector<double> values;
  std::vector<double> ratios;   ///< values[k+1] / values[k]
  double fitted_exponent = 0.0;
  /// Power law of the sup-profile: -(n+2-2s) in space, -(n/2+1-s) in time.
  double asymptotic_exponent = 0.0;
  /// sup_k values[k] * dist_k^{n-2s}: constant of the |x|^{-(n-2s)} bound (space only).
  double bound_constant = 0.0;
  bool monotone = true;
};

/// Samples v_R = G * f_R at distances multiplier * R (space) or multiplier * R^2 (time).
DecayProfile vR_decay_profile(const SourceSpec& source, const GreensKernel& kernel,
                              DecayDirection direction, const std::vector<double>& multipliers,
                              const OperatorParams& quad);

struct CsvRow {
  Point x;
  double t;
  double value;
};

/// Header x1..xn,t,value then one row per point, %.17g formatting.
void write_csv(std::ostream& os, int n, const std::vector<CsvRow>& rows);

}  // namespace fracheat
