#pragma once

#include <memory>
#include <span>

#include "occtime/rng.hpp"

namespace occtime {

/// The standard symmetric alpha-stable law with characteristic function
/// exp(-|u|^alpha t) at time t.
///
/// Construction is eager: for alpha outside {1, 2} a piecewise Chebyshev
/// table of the density and tail is built once (a few milliseconds) and
/// shared by copies. All members are safe to call concurrently.
class StableLaw {
 public:
  /// Throws DomainError unless 0 < alpha <= 2, and NumericError for
  /// 0 < alpha < 0.1 where the density tables are not supported.
  explicit StableLaw(double alpha);

  /// A process-wide instance per alpha, built on first use.
  static const StableLaw& shared(double alpha);

  double alpha() const noexcept { return alpha_; }

  /// Density of X_t at x. Throws DomainError for t <= 0.
  double density(double x, double t = 1.0) const;
  /// P(X_t >= x). Throws DomainError for t <= 0.
  double tail_prob(double x, double t = 1.0) const;

  /// One draw of X_1 (Chambers-Mallows-Stuck; Box-Muller at alpha = 2).
  double sample(RngStream& rng) const;
  /// Fills `out` with i.i.d. draws. Consumes the stream exactly as repeated
  /// single draws would, except at alpha = 2 where each counter block
  /// supplies two draws.
  void sample(RngStream& rng, std::span<double> out) const;

  /// E|Z|^p for -1 < p < alpha, memoized. Throws DomainError otherwise.
  double abs_moment(double p) const;

  /// Density of |Z'/Z| for independent copies Z, Z', at x > 0.
  double ratio_density(double x) const;
  /// One draw of D = (1 + |Z'/Z|^alpha)^-1.
  double sample_ratio_D(RngStream& rng) const;
  /// Density of D on (0, 1).
  double f_D(double x) const;

  /// x^(1+alpha) f(x).
  double h_alpha(double x) const;
  /// lim x^(1+alpha) f(x). Throws DomainError at alpha = 2.
  double h_alpha_inf() const;
  double density_at_zero() const;

 private:
  struct Impl;

  double alpha_;
  std::shared_ptr<Impl> impl_;
};

/// g1(a, b) = integral over x > 0 of x f(x) f(a + b x) for the Cauchy density
/// f, in closed form. Requires a >= 0 and b > 0.
double g1_closed(double a, double b);

}  // namespace occtime
