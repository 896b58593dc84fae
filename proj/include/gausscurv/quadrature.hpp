#pragma once

#include <span>
#include <vector>

namespace gcurv {

/// Gauss-Legendre rule on [-1, 1], nodes ascending.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  // Barycentric interpolation weights for the nodes.
  std::vector<double> bary;

  int size() const { return static_cast<int>(nodes.size()); }
};

/// Cached rule of order n (thread-safe).
const GaussRule& gauss_legendre(int n);

template <class F>
double integrate(const GaussRule& rule, double a, double b, F&& f) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  double sum = 0.0;
  for (int i = 0; i < rule.size(); ++i) sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

/// Lagrange basis values at x for nodes mapped to [a, b] (barycentric form).
void lagrange_basis(const GaussRule& rule, double a, double b, double x, std::span<double> out);

}  // namespace gcurv
