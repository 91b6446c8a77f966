#pragma once

#include <utility>
#include <vector>

#include "fracheat/field.hpp"
#include "fracheat/types.hpp"

namespace fracheat {

struct QuadResult {
  double value = 0.0;
  double near_field_part = 0.0;
  double far_field_tail_bound = 0.0;
  long nodes_used = 0;
};

/// (d_t - Delta)^s u at (x, t), history over past times.
QuadResult apply_left(const Field& u, const Point& x, double t, const OperatorParams& params);

/// Adjoint-side operator at (x, t), integrating over future times.
QuadResult apply_right(const Field& u, const Point& x, double t, const OperatorParams& params);

QuadResult apply_operator(const Field& u, const Point& x, double t, const OperatorParams& params,
                          Side side);

struct SpaceTimePoint {
  Point x{0.0, 0.0, 0.0};
  double t = 0.0;
};

/// Evaluates many points; parallel when OpenMP is available. Order is preserved.
std::vector<QuadResult> apply_batch(const Field& u, const std::vector<SpaceTimePoint>& points,
                                    const OperatorParams& params, Side side);

/// int_from^inf sigma^{-1-s} (u(x,t) - M(sigma)) dsigma, unnormalised, with M the
/// heat average towards the past (left) or the future (right). `from` > 0.
/// The far-field tail bound is added to `tail_bound`.
double history_integral(const Field& u, const Point& x, double t, double from,
                        const OperatorParams& params, Side side, double* tail_bound = nullptr,
                        long* nodes = nullptr);

/// Truncation box for pairings: |x_i| <= x_half, |t| <= t_half.
struct PairingBox {
  double x_half = 6.0;
  double t_half = 6.0;
};

struct AdjointnessReport {
  double left_pairing = 0.0;   ///< <L u, phi>
  double right_pairing = 0.0;  ///< <u, R phi>, box part plus far-past closure
  double scale = 0.0;          ///< denominator of the residual
  double residual = 0.0;
};

/// Relative mismatch between <L u, phi> and <u, R phi>.
///
/// The right pairing is split at t = -T: inside, R phi is evaluated pointwise on
/// a box widened to hold the heat spread; beyond, phi's own value is zero and
/// the pairing is rewritten as
///   -(1/|Gamma(-s)|) int phi(y,tau) int_{sigma > tau+T} sigma^{-1-s} M_u(y,tau;sigma) dsigma,
/// where M_u is the past heat average of u.
AdjointnessReport adjointness_check(const Field& u, const Field& phi, const OperatorParams& params,
                                    const PairingBox& box = {});

double adjointness_residual(const Field& u, const Field& phi, const OperatorParams& params,
                            const PairingBox& box = {});

}  // namespace fracheat
