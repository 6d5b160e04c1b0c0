#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <stdexcept>
#include <vector>

#include "ghfm/quadrature.hpp"

namespace ghfm {

// Clamped B-spline basis of a given order on [domain_start, domain_end] with
// equally spaced distinct knots. With knot_count distinct knots (endpoints
// included) and polynomial degree d = order - 1, the basis dimension is
// L = knot_count - 1 + d.
struct BasisSpec {
  int order = 0;        // d + 1
  int knot_count = 0;   // distinct knots on the domain, endpoints included
  double domain_start = 0.0;
  double domain_end = 0.0;
  Eigen::VectorXd knots;  // full clamped vector, ends repeated `order` times

  int degree() const { return order - 1; }
  int dimension() const { return knot_count - 2 + order; }
  double domain_length() const { return domain_end - domain_start; }
};

inline BasisSpec make_basis(int order, int knot_count, double domain_start, double domain_end) {
  if (order < 2) throw std::invalid_argument("make_basis: order must be >= 2");
  if (knot_count < 2) throw std::invalid_argument("make_basis: knot_count must be >= 2");
  if (!(domain_end > domain_start))
    throw std::invalid_argument("make_basis: domain must have positive length");
  BasisSpec spec;
  spec.order = order;
  spec.knot_count = knot_count;
  spec.domain_start = domain_start;
  spec.domain_end = domain_end;
  const int d = order - 1;
  spec.knots.resize(knot_count + 2 * d);
  for (int i = 0; i < d; ++i) spec.knots[i] = domain_start;
  for (int k = 0; k < knot_count; ++k)
    spec.knots[d + k] =
        domain_start + (domain_end - domain_start) * static_cast<double>(k) / (knot_count - 1);
  for (int i = 0; i < d; ++i) spec.knots[d + knot_count + i] = domain_end;
  return spec;
}

// Convenience: derive the distinct-knot count from a requested dimension L.
inline BasisSpec make_basis_dim(int order, int dimension, double domain_start, double domain_end) {
  int knot_count = dimension - order + 2;
  if (knot_count < 2)
    throw std::invalid_argument("make_basis_dim: dimension must be >= order");
  return make_basis(order, knot_count, domain_start, domain_end);
}

namespace detail {

// Knot span index s with knots[s] <= t < knots[s+1]; the right endpoint maps
// to the last nonempty span so clamped evaluation at t = T works.
inline int find_span(const BasisSpec& spec, double t) {
  const int d = spec.degree();
  const int last = spec.knot_count + d - 2;  // last nonempty span index
  if (t >= spec.domain_end) return last;
  if (t <= spec.domain_start) return d;
  int lo = d, hi = last + 1;
  while (hi - lo > 1) {
    int mid = (lo + hi) / 2;
    if (t < spec.knots[mid])
      hi = mid;
    else
      lo = mid;
  }
  return lo;
}

// Nonzero basis values N[0..order-1] at t for basis indices span-d .. span
// (Cox-de Boor, The NURBS Book A2.2).
inline void basis_values(const BasisSpec& spec, int span, double t, double* N) {
  const int d = spec.degree();
  double left[32], right[32];
  N[0] = 1.0;
  for (int j = 1; j <= d; ++j) {
    left[j] = t - spec.knots[span + 1 - j];
    right[j] = spec.knots[span + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      double tmp = N[r] / (right[r + 1] + left[j - r]);
      N[r] = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    N[j] = saved;
  }
}

// Values and derivatives up to order nders (rows) of the nonzero basis
// functions (columns) at t (The NURBS Book A2.3). Rows beyond the polynomial
// degree are zero.
inline void basis_derivatives(const BasisSpec& spec, int span, double t, int nders,
                              Eigen::MatrixXd& ders) {
  const int d = spec.degree();
  ders.setZero(nders + 1, d + 1);
  Eigen::MatrixXd ndu(d + 1, d + 1);
  double left[32], right[32];
  ndu(0, 0) = 1.0;
  for (int j = 1; j <= d; ++j) {
    left[j] = t - spec.knots[span + 1 - j];
    right[j] = spec.knots[span + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu(j, r) = right[r + 1] + left[j - r];
      double tmp = ndu(r, j - 1) / ndu(j, r);
      ndu(r, j) = saved + right[r + 1] * tmp;
      saved = left[j - r] * tmp;
    }
    ndu(j, j) = saved;
  }
  for (int j = 0; j <= d; ++j) ders(0, j) = ndu(j, d);
  const int kmax = std::min(nders, d);
  Eigen::MatrixXd a(2, d + 1);
  for (int r = 0; r <= d; ++r) {
    int s1 = 0, s2 = 1;
    a(0, 0) = 1.0;
    for (int k = 1; k <= kmax; ++k) {
      double dv = 0.0;
      int rk = r - k, pk = d - k;
      if (r >= k) {
        a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
        dv = a(s2, 0) * ndu(rk, pk);
      }
      int j1 = (rk >= -1) ? 1 : -rk;
      int j2 = (r - 1 <= pk) ? k - 1 : d - r;
      for (int j = j1; j <= j2; ++j) {
        a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
        dv += a(s2, j) * ndu(rk + j, pk);
      }
      if (r <= pk) {
        a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
        dv += a(s2, k) * ndu(r, pk);
      }
      ders(k, r) = dv;
      std::swap(s1, s2);
    }
  }
  double factor = d;
  for (int k = 1; k <= kmax; ++k) {
    for (int j = 0; j <= d; ++j) ders(k, j) *= factor;
    factor *= (d - k);
  }
}

}  // namespace detail

// Full L-vector of basis values at t. Throws if t is outside the domain.
inline Eigen::VectorXd eval_basis(const BasisSpec& spec, double t) {
  if (t < spec.domain_start || t > spec.domain_end)
    throw std::invalid_argument("eval_basis: t outside basis domain");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(spec.dimension());
  int span = detail::find_span(spec, t);
  double N[32];
  detail::basis_values(spec, span, t, N);
  int first = span - spec.degree();
  for (int j = 0; j < spec.order; ++j) out[first + j] = N[j];
  return out;
}

// Full L-vector of k-th derivatives at t.
inline Eigen::VectorXd eval_basis_derivative(const BasisSpec& spec, double t, int deriv) {
  if (t < spec.domain_start || t > spec.domain_end)
    throw std::invalid_argument("eval_basis_derivative: t outside basis domain");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(spec.dimension());
  int span = detail::find_span(spec, t);
  Eigen::MatrixXd ders;
  detail::basis_derivatives(spec, span, t, deriv, ders);
  int first = span - spec.degree();
  for (int j = 0; j < spec.order; ++j) out[first + j] = ders(deriv, j);
  return out;
}

// m x L matrix of basis values at the given times.
inline Eigen::MatrixXd basis_matrix(const BasisSpec& spec, const Eigen::VectorXd& times) {
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(times.size(), spec.dimension());
  double N[32];
  for (int k = 0; k < times.size(); ++k) {
    double t = times[k];
    if (t < spec.domain_start || t > spec.domain_end)
      throw std::invalid_argument("basis_matrix: time outside basis domain");
    int span = detail::find_span(spec, t);
    detail::basis_values(spec, span, t, N);
    int first = span - spec.degree();
    for (int j = 0; j < spec.order; ++j) B(k, first + j) = N[j];
  }
  return B;
}

namespace detail {

// Accumulate sum over knot spans of integral(deriv B_a * deriv B_b) by
// Gauss-Legendre, exact since the integrands are piecewise polynomial.
inline Eigen::MatrixXd basis_product_integral(const BasisSpec& spec, int deriv) {
  const int L = spec.dimension();
  const int d = spec.degree();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(L, L);
  QuadRule rule = gauss_legendre(spec.order);
  Eigen::MatrixXd ders;
  for (int span = d; span < spec.knot_count + d - 1; ++span) {
    double a = spec.knots[span], b = spec.knots[span + 1];
    if (!(b > a)) continue;
    double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int q = 0; q < rule.nodes.size(); ++q) {
      double t = mid + half * rule.nodes[q];
      double w = half * rule.weights[q];
      basis_derivatives(spec, span, t, deriv, ders);
      int first = span - d;
      for (int r = 0; r < spec.order; ++r)
        for (int c = 0; c <= r; ++c)
          out(first + r, first + c) += w * ders(deriv, r) * ders(deriv, c);
    }
  }
  out = out.selfadjointView<Eigen::Lower>();
  return out;
}

}  // namespace detail

// Roughness matrix: R_ab = integral of B_a'' B_b'' over the domain.
inline Eigen::MatrixXd penalty_matrix(const BasisSpec& spec) {
  return detail::basis_product_integral(spec, 2);
}

// Gram matrix: W_ab = integral of B_a B_b over the domain.
inline Eigen::MatrixXd gram_matrix(const BasisSpec& spec) {
  return detail::basis_product_integral(spec, 0);
}

namespace detail {

inline void check_grid(const BasisSpec& spec, const Eigen::VectorXd& times, int min_points) {
  if (times.size() < min_points)
    throw std::invalid_argument("grid has fewer points than the basis dimension");
  for (int k = 0; k + 1 < times.size(); ++k)
    if (!(times[k + 1] > times[k]))
      throw std::invalid_argument("grid times must be strictly increasing");
  if (times[0] < spec.domain_start || times[times.size() - 1] > spec.domain_end)
    throw std::invalid_argument("grid times outside basis domain");
}

inline Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& times) {
  const int m = static_cast<int>(times.size());
  Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
  for (int k = 0; k + 1 < m; ++k) {
    double h = times[k + 1] - times[k];
    w[k] += 0.5 * h;
    w[k + 1] += 0.5 * h;
  }
  return w;
}

}  // namespace detail

// gamma_a = integral of B_a(t) X(t) dt, with the product integrated by the
// trapezoid rule on the observation grid (the curve is only known there).
inline Eigen::VectorXd project_covariate(const BasisSpec& spec, const Eigen::VectorXd& grid_times,
                                         const Eigen::VectorXd& grid_values) {
  if (grid_times.size() != grid_values.size())
    throw std::invalid_argument("project_covariate: times/values size mismatch");
  detail::check_grid(spec, grid_times, spec.dimension());
  Eigen::VectorXd w = detail::trapezoid_weights(grid_times);
  Eigen::VectorXd gamma = Eigen::VectorXd::Zero(spec.dimension());
  double N[32];
  for (int k = 0; k < grid_times.size(); ++k) {
    int span = detail::find_span(spec, grid_times[k]);
    detail::basis_values(spec, span, grid_times[k], N);
    int first = span - spec.degree();
    double wk = w[k] * grid_values[k];
    for (int j = 0; j < spec.order; ++j) gamma[first + j] += wk * N[j];
  }
  return gamma;
}

// Least-squares spline coefficients of a sampled curve; the residual is
// orthogonal to the basis span on the grid.
inline Eigen::VectorXd smooth_curve(const BasisSpec& spec, const Eigen::VectorXd& grid_times,
                                    const Eigen::VectorXd& grid_values) {
  if (grid_times.size() != grid_values.size())
    throw std::invalid_argument("smooth_curve: times/values size mismatch");
  detail::check_grid(spec, grid_times, spec.dimension());
  Eigen::MatrixXd B = basis_matrix(spec, grid_times);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(B);
  if (qr.rank() < spec.dimension())
    throw std::invalid_argument("smooth_curve: rank-deficient design (too few distinct times)");
  return qr.solve(grid_values);
}

}  // namespace ghfm
