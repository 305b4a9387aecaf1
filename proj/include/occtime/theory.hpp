#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "occtime/rng.hpp"
#include "occtime/stable_law.hpp"

namespace occtime {

/// A Monte Carlo or quadrature value with its standard error (0 if exact).
struct Estimate {
  double value = 0.0;
  double se = 0.0;
};

enum class Regime { alpha_gt_1, alpha_lt_1, alpha_eq_1 };

Regime regime_of(double alpha);
const char* to_string(Regime regime);

/// A closed-form limit together with the normalization under which the
/// squared error converges to it.
struct TheoryConstant {
  std::string name;
  double alpha = 0.0;
  Regime regime = Regime::alpha_gt_1;
  double value = 0.0;
  std::string normalization;  // e.g. "delta^(1+1/alpha)", "delta^2 log n"
};

/// Squared-error scale for half-line occupation estimators:
/// delta^(1+1/alpha), delta^2 log n or delta^2 (log n)^2 by regime.
double occupation_error_scale(double alpha, double delta, std::int64_t n);
/// Squared-error scale for local time estimators: delta^(1-1/alpha).
double local_time_error_scale(double alpha, double delta);

/// Fractional-part parabola {x} - {x}^2. Throws DomainError for x < 0.
double psi(double x);

/// Integral of psi(x) x^(1/alpha - 2) over (0, inf) for 1 < alpha <= 2.
double psi_integral(double alpha);

/// P(Z >= 0, Z' >= 0, x^(1/alpha) Z <= y^(1/alpha) Z') by simulation.
Estimate phi_mc(const StableLaw& law, double x, double y, RngStream& rng, std::int64_t reps);

/// E[psi(nD) / (D(1 - D))] by one-dimensional quadrature against f_D.
/// Exactly 1 for n = 1.
double expected_psi_term_quad(const StableLaw& law, std::int64_t n);
/// The same expectation by sampling D.
Estimate expected_psi_term_mc(const StableLaw& law, std::int64_t n, RngStream& rng, std::int64_t reps);

/// Exact mean squared error of the Riemann estimator of the occupation time
/// of [0, inf) for every finite n.
double exact_riemann_error(const StableLaw& law, double T, std::int64_t n);

/// Limit of the normalized error of the half-line Riemann estimator.
TheoryConstant theorem1_limit(const StableLaw& law, double T);

/// E[L_T(y)] for alpha > 1. Throws DomainError otherwise.
double mean_local_time(const StableLaw& law, double T, double y);

/// Lower bound for the ratio of Riemann and optimal limiting errors,
/// 1 < alpha <= 2.
double tilde_C(double alpha);
/// The grid 1.05, 1.10, ..., 2.00.
std::vector<double> figure1_grid();
std::vector<std::pair<double, double>> figure1_table(std::span<const double> alphas);

/// -(alpha - 1) Gamma(alpha) cos(pi alpha / 2) for 1 < alpha <= 2.
double C_of_alpha(double alpha);

/// Density at u > 0 of min(X_r, X_s) for alpha <= 1 and distinct r, s in
/// (0, 1].
double rho_min_density(const StableLaw& law, double r, double s, double u);

/// (1/log n) times the integral over (0, n/2) of psi(x) / (x (1 - x/n)).
double lemma3_integral_i(std::int64_t n);
/// (1/log^2 n) times the integral over (0, n/2) of
/// psi(x) log(n/x - 1) / (x (1 - x/n) (1 - 2x/n)).
double lemma3_integral_ii(std::int64_t n);

}  // namespace occtime
