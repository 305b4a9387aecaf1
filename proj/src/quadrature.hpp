#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace occtime::quad {

/// Nodes and weights of an n-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int n);

  template <class F>
  double integrate(F&& f, double a, double b) const
  {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(mid + half * nodes[i]);
    return sum * half;
  }
};

/// Shared rules, built once.
const GaussLegendre& gauss_legendre(int n);

using Integrand = std::function<double(double)>;

/// Globally adaptive Gauss-Kronrod (15/31) on a finite interval, stopping
/// when the summed error estimate is below max(rel_tol |total|, abs_tol).
/// Throws NumericError on a non-finite result.
double adaptive(const Integrand& f, double a, double b, double rel_tol = 1e-12,
                const char* what = "adaptive quadrature", double abs_tol = 0.0);

/// Same over [min(points), max(points)], splitting at every point first.
double adaptive_split(const Integrand& f, std::vector<double> points, double rel_tol = 1e-12,
                      const char* what = "adaptive quadrature", double abs_tol = 0.0);

/// The integrals over each [points[i], points[i+1]] (points sorted and
/// distinct) under one global error budget.
std::vector<double> adaptive_pieces(const Integrand& f, const std::vector<double>& points, double rel_tol = 1e-12,
                                    const char* what = "adaptive quadrature", double abs_tol = 0.0);

/// Double-exponential rule on a finite interval; tolerates integrable
/// endpoint singularities.
double tanh_sinh(const Integrand& f, double a, double b, double rel_tol = 1e-12,
                 const char* what = "tanh-sinh quadrature");

/// Integral of f over [start, +inf) for integrands with at most power-law
/// decay. Panels double in width starting from `scale` until a panel adds
/// less than max(rel_tol |total|, abs_tol).
double half_line(const Integrand& f, double start, double scale, double rel_tol = 1e-13,
                 const char* what = "half-line quadrature", double abs_tol = 0.0);

void check_finite(double value, const char* what);

}  // namespace occtime::quad
