#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace fracheat {

/// Spatial point. Only the first `n` components are meaningful; the rest are 0.
using Point = std::array<double, 3>;

enum class Side { left, right };

inline const char* to_string(Side side) { return side == Side::left ? "left" : "right"; }

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::string token)
      : Error(what), token_(std::move(token)) {}
  const std::string& token() const { return token_; }

 private:
  std::string token_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DidNotConverge : public Error {
 public:
  using Error::Error;
};

class IncommensurateFrequency : public Error {
 public:
  using Error::Error;
};

class InsufficientDynamicRange : public Error {
 public:
  using Error::Error;
};

class NotContracting : public Error {
 public:
  NotContracting(const std::string& what, double constant)
      : Error(what), constant_(constant) {}
  double constant() const { return constant_; }

 private:
  double constant_;
};

class MaxIterExceeded : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Domain types

/// Fractional order, restricted to the open interval (0, 1).
class FracOrder {
 public:
  explicit FracOrder(double s) : s_(s) {
    if (!(s > 0.0 && s < 1.0))
      throw InvalidArgument("fractional order must lie in (0,1), got " + std::to_string(s));
  }
  double value() const { return s_; }
  operator double() const { return s_; }

 private:
  double s_;
};

/// Checks n in {1,2,3}.
inline int checked_dimension(int n) {
  if (n < 1 || n > 3)
    throw InvalidArgument("dimension must be 1, 2 or 3, got " + std::to_string(n));
  return n;
}

/// Discretisation controls of the singular space-time integral.
///
/// `delta` is the near-field cut in sigma = |t - tau|; below it the integrand is
/// replaced by its Taylor expansion. `sigma_max` caps the automatically chosen
/// far cut. Panels between the two are graded geometrically by `panel_ratio`.
struct OperatorParams {
  FracOrder s{0.5};
  int n = 1;
  double delta = 1e-4;
  double sigma_max = 1e8;
  int n_time_nodes = 12;
  int n_space_nodes = 24;
  double panel_ratio = 2.0;
  /// Re-evaluate with refined nodes and throw DidNotConverge on disagreement.
  bool check_convergence = false;
  double abs_tol = 1e-6;
  double rel_tol = 1e-4;

  void validate() const {
    checked_dimension(n);
    if (!(delta > 0.0 && delta < sigma_max))
      throw InvalidArgument("need 0 < delta < sigma_max");
    if (n_time_nodes < 2 || n_space_nodes < 2)
      throw InvalidArgument("node counts must be at least 2");
    if (!(panel_ratio > 1.0)) throw InvalidArgument("panel_ratio must exceed 1");
  }
};

/// Frequency pair (xi, rho) at which a symbol is evaluated.
struct SymbolPoint {
  Point xi{0.0, 0.0, 0.0};
  double rho = 0.0;
};

}  // namespace fracheat
