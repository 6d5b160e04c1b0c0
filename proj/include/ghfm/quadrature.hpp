#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace ghfm {

// Gauss-Legendre rule on [-1, 1], exact for polynomials of degree 2n-1.
struct QuadRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

inline QuadRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  QuadRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  // Newton iteration on P_n, seeded with the Chebyshev-like approximation.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

// Integrate f over [a, b] stitched from per-interval Gauss-Legendre panels.
template <typename F>
double integrate_panels(F&& f, const Eigen::VectorXd& breakpoints, int nodes_per_panel) {
  QuadRule rule = gauss_legendre(nodes_per_panel);
  double total = 0.0;
  for (int s = 0; s + 1 < breakpoints.size(); ++s) {
    double a = breakpoints[s], b = breakpoints[s + 1];
    if (b - a <= 0.0) continue;
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int q = 0; q < rule.nodes.size(); ++q)
      total += half * rule.weights[q] * f(mid + half * rule.nodes[q]);
  }
  return total;
}

}  // namespace ghfm
