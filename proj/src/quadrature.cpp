#include "gausscurv/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "gausscurv/geometry.hpp"

namespace gcurv {
namespace {

GaussRule build_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  rule.bary.resize(n);
  for (int k = 0; k < n; ++k) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(kPi * (4.0 * (k + 1) - 1.0) / (4.0 * n + 2.0)) *
               (1.0 - 1.0 / (8.0 * n * n) + 1.0 / (8.0 * n * n * n));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double pj = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = pj;
      }
      const double pn = n == 0 ? 1.0 : (n == 1 ? x : p1);
      const double pn1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pn1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double pj = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = pj;
    }
    const double pn = n == 1 ? x : p1;
    const double pn1 = n == 1 ? 1.0 : p0;
    dp = n * (x * pn - pn1) / (x * x - 1.0);
    // Store ascending.
    rule.nodes[n - 1 - k] = x;
    rule.weights[n - 1 - k] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  for (int i = 0; i < n; ++i) {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    rule.bary[i] = sign * std::sqrt((1.0 - rule.nodes[i] * rule.nodes[i]) * rule.weights[i]);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(build_rule(n));
  return *slot;
}

void lagrange_basis(const GaussRule& rule, double a, double b, double x, std::span<double> out) {
  const int n = rule.size();
  const double s = (2.0 * x - a - b) / (b - a);
  for (int i = 0; i < n; ++i) {
    if (s == rule.nodes[i]) {
      for (int j = 0; j < n; ++j) out[j] = (i == j) ? 1.0 : 0.0;
      return;
    }
  }
  double denom = 0.0;
  for (int i = 0; i < n; ++i) {
    out[i] = rule.bary[i] / (s - rule.nodes[i]);
    denom += out[i];
  }
  for (int i = 0; i < n; ++i) out[i] /= denom;
}

}  // namespace gcurv
