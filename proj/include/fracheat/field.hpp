#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fracheat/types.hpp"

namespace fracheat {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Time interval outside of which a field is negligible (relative 1e-17).
struct TimeWindow {
  double lo = -kInf;
  double hi = kInf;
};

/// Quadrature for integrals of the form  int u(y) g(y) dy  with g smooth on the
/// scale of the field. Weights already absorb any weight function of the rule.
struct SpatialRule {
  std::vector<Point> nodes;
  std::vector<double> weights;
};

struct TailEstimate {
  double value = 0.0;  ///< contribution included in the result
  double bound = 0.0;  ///< bound on what was neglected
};

/// A space-time function the operators act on.
///
/// Besides point values, a field exposes the structural information the
/// quadrature needs: where it is negligible in time, whether it is localized in
/// space, and how the history integral behaves beyond a far cut.
class Field {
 public:
  virtual ~Field() = default;

  virtual double value(const Point& x, double t) const = 0;
  virtual double time_derivative(const Point& x, double t) const = 0;
  virtual double laplacian(const Point& x, double t, int n) const = 0;

  /// Panel width (in time) over which the field is well resolved by one panel.
  virtual double time_scale() const { return kInf; }
  /// Spatial variation length.
  virtual double space_scale() const { return kInf; }
  virtual std::optional<TimeWindow> time_window() const { return std::nullopt; }
  /// Field-adapted spatial nodes, available when the field is localized in space.
  virtual std::shared_ptr<const SpatialRule> spatial_rule(int /*n*/, int /*nodes*/) const {
    return nullptr;
  }
  virtual double sup_abs() const { return kInf; }
  /// sup over time of the spatial L1 norm; finite for spatially localized fields.
  virtual double spatial_l1_bound(int /*n*/) const { return kInf; }

  /// Spatial heat average minus the centre value:
  ///   u0 - pi^{-n/2} int e^{-|z|^2} u(x + 2 sqrt(sigma) z, t -/+ sigma) dz
  /// (minus for Side::left, plus for Side::right).
  virtual double heat_difference(const Point& x, double t, double u0, double sigma, Side side,
                                 int n, int nodes) const;

  /// int_cut^inf sigma^{-1-s} (u(x,t) - M(sigma)) dsigma, where M is the heat average.
  virtual TailEstimate history_tail(const Point& x, double t, double cut, double s, Side side,
                                    int n) const;

  /// Far cut for fields without a time window; beyond it history_tail takes over.
  virtual double suggested_cut(const Point& x, double t, double s, Side side, int n) const;

  /// True when the field is a constant, so every difference vanishes identically.
  virtual bool is_constant() const { return false; }
};

// ---------------------------------------------------------------------------

enum class FieldKind { constant, coswave, gaussian, bump, monomial, schwartz_product };

const char* to_string(FieldKind kind);

/// Closed-form field from the built-in family.
///
/// Every kind accepts `amp` (multiplier, default 1) and a shift `x0`/`x01..x03`,
/// `t0`; the field is then amp * base(x - x0, t - t0).
///
///   constant(c)                  c
///   coswave(xi1..3, rho, phase)  cos(xi.x + rho t + phase)        (`xi` aliases xi1)
///   gaussian(a)                  exp(-a(|x|^2 + t^2))
///   bump(r1, r2, t1, t2)         -1 on B_r1 x [-t1,t1], 0 outside B_r2 x (-t2,t2), C-infinity
///   monomial(axis)               x_axis (axis is 1-based)
///   schwartz_product(a, b)       exp(-a|x|^2) exp(-b t^2)
class AnalyticField final : public Field {
 public:
  AnalyticField(FieldKind kind, std::vector<std::pair<std::string, double>> params);

  static AnalyticField constant(double c);
  static AnalyticField coswave(const Point& xi, double rho, double phase = 0.0);
  static AnalyticField gaussian(double a);
  static AnalyticField bump(double r1, double r2, double t1, double t2);
  static AnalyticField monomial(int axis);
  static AnalyticField schwartz_product(double a, double b);

  AnalyticField scaled(double amp) const;
  AnalyticField shifted(const Point& dx, double dt) const;

  FieldKind kind() const { return kind_; }
  double param(const std::string& key) const;
  /// Canonical mini-language spelling; parse(to_string()) reproduces the field.
  std::string to_string() const;

  /// Membership of the field in L^{2s,s} known from its closed form.
  bool known_l2ss_member(double s) const;

  double value(const Point& x, double t) const override;
  double time_derivative(const Point& x, double t) const override;
  double laplacian(const Point& x, double t, int n) const override;
  double time_scale() const override;
  double space_scale() const override;
  std::optional<TimeWindow> time_window() const override;
  std::shared_ptr<const SpatialRule> spatial_rule(int n, int nodes) const override;
  double sup_abs() const override;
  double spatial_l1_bound(int n) const override;
  TailEstimate history_tail(const Point& x, double t, double cut, double s, Side side,
                            int n) const override;
  double suggested_cut(const Point& x, double t, double s, Side side, int n) const override;
  bool is_constant() const override;

  const Point& xi() const { return xi_; }
  double rho() const { return rho_; }
  double phase() const { return phase_; }
  double amp() const { return amp_; }
  const Point& x0() const { return x0_; }
  double t0() const { return t0_; }

 private:
  void finish_construction();

  FieldKind kind_;
  std::vector<std::pair<std::string, double>> raw_;
  double amp_ = 1.0;
  Point x0_{0.0, 0.0, 0.0};
  double t0_ = 0.0;
  // kind parameters
  double c_ = 0.0;
  Point xi_{0.0, 0.0, 0.0};
  double rho_ = 0.0, phase_ = 0.0;
  double a_ = 0.0, b_ = 0.0;
  double r1_ = 0.0, r2_ = 0.0, t1_ = 0.0, t2_ = 0.0;
  int axis_ = 0;

  // Copies start with an empty cache.
  struct RuleCache {
    std::mutex mutex;
    std::map<std::pair<int, int>, std::shared_ptr<const SpatialRule>> rules;
    RuleCache() = default;
    RuleCache(const RuleCache&) {}
    RuleCache& operator=(const RuleCache&) { return *this; }
  };
  mutable RuleCache cache_;
};

/// Parses the field mini-language: kind '(' key '=' number {',' key '=' number} ')'.
/// Throws ParseError naming the offending token.
AnalyticField parse_field(const std::string& text);

// ---------------------------------------------------------------------------

/// Finite linear combination of fields. Heat averages and history integrals are
/// taken term by term so each term keeps its own spatial rule, cut and tail.
class LinearCombination final : public Field {
 public:
  using Term = std::pair<double, std::shared_ptr<const Field>>;

  void add(double coeff, std::shared_ptr<const Field> field);
  const std::vector<Term>& terms() const { return terms_; }

  double value(const Point& x, double t) const override;
  double time_derivative(const Point& x, double t) const override;
  double laplacian(const Point& x, double t, int n) const override;
  double time_scale() const override;
  double space_scale() const override;
  std::optional<TimeWindow> time_window() const override;
  double sup_abs() const override;
  double spatial_l1_bound(int n) const override;
  double heat_difference(const Point& x, double t, double u0, double sigma, Side side, int n,
                         int nodes) const override;
  TailEstimate history_tail(const Point& x, double t, double cut, double s, Side side,
                            int n) const override;
  double suggested_cut(const Point& x, double t, double s, Side side, int n) const override;

 private:
  std::vector<Term> terms_;
};

/// Field backed by callables; derivatives by central differences unless given.
/// Used for sources that are not in the built-in family.
class FunctionField final : public Field {
 public:
  using Fn = std::function<double(const Point&, double)>;

  explicit FunctionField(Fn fn) : fn_(std::move(fn)) {}

  FunctionField& with_time_window(TimeWindow w) { window_ = w; return *this; }
  FunctionField& with_time_scale(double h) { time_scale_ = h; return *this; }
  FunctionField& with_space_scale(double h) { space_scale_ = h; return *this; }
  FunctionField& with_sup(double m) { sup_ = m; return *this; }

  double value(const Point& x, double t) const override { return fn_(x, t); }
  double time_derivative(const Point& x, double t) const override;
  double laplacian(const Point& x, double t, int n) const override;
  double time_scale() const override { return time_scale_; }
  double space_scale() const override { return space_scale_; }
  std::optional<TimeWindow> time_window() const override { return window_; }
  double sup_abs() const override { return sup_; }

 private:
  Fn fn_;
  std::optional<TimeWindow> window_;
  double time_scale_ = kInf;
  double space_scale_ = kInf;
  double sup_ = kInf;
};

/// Central-difference derivatives used by fields without closed-form derivatives.
double fd_time_derivative(const Field& f, const Point& x, double t, double h);
double fd_laplacian(const Field& f, const Point& x, double t, int n, double h);

}  // namespace fracheat
