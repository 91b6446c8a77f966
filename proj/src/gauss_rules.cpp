#include "fracheat/gauss_rules.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <numbers>

#include "fracheat/special.hpp"
#include "fracheat/types.hpp"

namespace fracheat {

namespace {

// Golub-Welsch: eigenvalues of the symmetric tridiagonal Jacobi matrix are the
// nodes; weights are mu0 times the squared first eigenvector components.
// Implicit QL with shifts, tracking only the first row of the eigenvector matrix.
Rule golub_welsch(std::vector<double> diag, std::vector<double> off, double mu0) {
  const int n = static_cast<int>(diag.size());
  std::vector<double> first(n, 0.0);
  first[0] = 1.0;
  off.push_back(0.0);  // off[i] couples i and i+1; off[n-1] unused

  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(diag[m]) + std::abs(diag[m + 1]);
        if (std::abs(off[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (++iter > 60) throw DidNotConverge("Golub-Welsch eigen-iteration did not converge");
        double g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
        double r = std::hypot(g, 1.0);
        g = diag[m] - diag[l] + off[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i;
        for (i = m - 1; i >= l; --i) {
          double f = s * off[i];
          const double b = c * off[i];
          r = std::hypot(f, g);
          off[i + 1] = r;
          if (r == 0.0) {
            diag[i + 1] -= p;
            off[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = diag[i + 1] - p;
          r = (diag[i] - g) * s + 2.0 * c * b;
          p = s * r;
          diag[i + 1] = g + p;
          g = c * r - b;
          f = first[i + 1];
          first[i + 1] = s * first[i] + c * f;
          first[i] = c * first[i] - s * f;
        }
        if (r == 0.0 && i >= l) continue;
        diag[l] -= p;
        off[l] = g;
        off[m] = 0.0;
      }
    } while (m != l);
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return diag[a] < diag[b]; });
  Rule rule;
  rule.nodes.reserve(n);
  rule.weights.reserve(n);
  for (int k : order) {
    rule.nodes.push_back(diag[k]);
    rule.weights.push_back(mu0 * first[k] * first[k]);
  }
  return rule;
}

void symmetrize(Rule& rule) {
  // Exact symmetry for even weights keeps odd moments at zero to rounding.
  const std::size_t n = rule.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    const std::size_t j = n - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
}

}  // namespace

Rule gauss_legendre(int n) {
  if (n < 1) throw InvalidArgument("rule size must be positive");
  std::vector<double> diag(n, 0.0), off(n - 1);
  for (int k = 1; k < n; ++k) off[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  Rule rule = golub_welsch(std::move(diag), std::move(off), 2.0);
  symmetrize(rule);
  return rule;
}

Rule gauss_hermite(int n) {
  if (n < 1) throw InvalidArgument("rule size must be positive");
  std::vector<double> diag(n, 0.0), off(n - 1);
  for (int k = 1; k < n; ++k) off[k - 1] = std::sqrt(0.5 * k);
  Rule rule = golub_welsch(std::move(diag), std::move(off), std::sqrt(std::numbers::pi));
  symmetrize(rule);
  return rule;
}

Rule gauss_jacobi(int n, double alpha, double beta) {
  if (n < 1) throw InvalidArgument("rule size must be positive");
  if (!(alpha > -1.0 && beta > -1.0)) throw InvalidArgument("Jacobi exponents must exceed -1");
  const double ab = alpha + beta;
  std::vector<double> diag(n), off(n > 1 ? n - 1 : 0);
  diag[0] = (beta - alpha) / (ab + 2.0);
  for (int k = 1; k < n; ++k) {
    const double t = 2.0 * k + ab;
    diag[k] = (beta * beta - alpha * alpha) / (t * (t + 2.0));
    const double num = 4.0 * k * (k + alpha) * (k + beta) * (k + ab);
    const double den = t * t * (t + 1.0) * (t - 1.0);
    off[k - 1] = std::sqrt(num / den);
  }
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + special::lgamma_pos(alpha + 1.0) +
                              special::lgamma_pos(beta + 1.0) - special::lgamma_pos(ab + 2.0));
  return golub_welsch(std::move(diag), std::move(off), mu0);
}

Rule legendre_on(double a, double b, int n) {
  Rule rule = cached_legendre(n);
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    rule.nodes[i] = mid + half * rule.nodes[i];
    rule.weights[i] *= half;
  }
  return rule;
}

Rule left_singular_on(double a, double b, double beta, int n) {
  Rule rule = gauss_jacobi(n, 0.0, beta);
  const double half = 0.5 * (b - a);
  const double scale = std::pow(half, beta + 1.0);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    rule.nodes[i] = a + half * (1.0 + rule.nodes[i]);
    rule.weights[i] *= scale;
  }
  return rule;
}

namespace {

template <class Make>
const Rule& cached(std::map<int, std::unique_ptr<Rule>>& cache, std::mutex& mutex, int n,
                   Make make) {
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<Rule>(make(n));
  return *slot;
}

}  // namespace

const Rule& cached_legendre(int n) {
  static std::map<int, std::unique_ptr<Rule>> cache;
  static std::mutex mutex;
  return cached(cache, mutex, n, gauss_legendre);
}

const Rule& cached_hermite(int n) {
  static std::map<int, std::unique_ptr<Rule>> cache;
  static std::mutex mutex;
  return cached(cache, mutex, n, gauss_hermite);
}

}  // namespace fracheat
