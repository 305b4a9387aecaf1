#pragma once

#include <array>
#include <vector>

namespace occtime::detail {

// Standard symmetric stable law, characteristic function exp(-|u|^alpha).
// Everything here takes x > 0 and alpha outside {1, 2}.

/// Density by the Zolotarev integral representation.
double zolotarev_density(double alpha, double x);
/// P(Z >= x) by the same representation.
double zolotarev_tail(double alpha, double x);

/// Power series of the density around 0 (convergent for alpha > 1).
double taylor_density(double alpha, double x);
/// Integral of taylor_density over [0, x].
double taylor_mass(double alpha, double x);

/// Expansion in powers of x^-alpha: convergent for alpha < 1, asymptotic
/// for alpha > 1. Truncated where the terms stop decreasing at `start`.
class TailSeries {
 public:
  TailSeries() = default;
  TailSeries(double alpha, double start);

  double start() const { return start_; }
  double density(double x) const;
  double tail(double x) const;
  /// Integral of x^p f(x) over [start, inf), p < alpha.
  double moment_tail(double p) const;

 private:
  double alpha_ = 0.0;
  double start_ = 0.0;
  std::vector<double> coef_;
};

/// Piecewise Chebyshev interpolant of the density and tail on [0, inf),
/// dyadic segments, switching to the tail series at the far end.
class DensityTable {
 public:
  static constexpr int kNodes = 25;

  explicit DensityTable(double alpha);

  double density(double x) const;
  double tail(double x) const;
  const TailSeries& tail_series() const { return series_; }

 private:
  struct Segment {
    double lo, hi;
    std::array<double, kNodes> density;
    std::array<double, kNodes> tail;
  };

  int segment_index(double x) const;

  double alpha_;
  double f0_;
  double near_zero_;  // below this, the short expansion around 0 is used
  int first_exponent_;
  std::vector<Segment> segments_;
  TailSeries series_;
};

}  // namespace occtime::detail
