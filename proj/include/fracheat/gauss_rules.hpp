#pragma once

#include <vector>

namespace fracheat {

/// Nodes and weights of a one-dimensional quadrature rule.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

/// Gauss-Legendre on [-1, 1].
Rule gauss_legendre(int n);

/// Gauss-Hermite for weight exp(-x^2) on the real line.
Rule gauss_hermite(int n);

/// Gauss-Jacobi for weight (1-x)^alpha (1+x)^beta on [-1, 1], alpha, beta > -1.
Rule gauss_jacobi(int n, double alpha, double beta);

/// Legendre rule mapped to [a, b].
Rule legendre_on(double a, double b, int n);

/// Rule for the weight (sigma - a)^(beta) on [a, b] (integrable endpoint singularity at a).
Rule left_singular_on(double a, double b, double beta, int n);

/// Cached rules; thread-safe, returned references stay valid for the process lifetime.
const Rule& cached_legendre(int n);
const Rule& cached_hermite(int n);

}  // namespace fracheat
