#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "occtime/paths.hpp"
#include "occtime/stable_law.hpp"

namespace occtime {

/// X_{t_0}, ..., X_{t_n} on [0, T] with t_k = k T / n.
struct CoarseObservations {
  double alpha = 0.0;
  double T = 1.0;
  std::vector<double> x;  // n + 1 values, x[0] = 0

  std::int64_t n() const { return static_cast<std::int64_t>(x.size()) - 1; }
  double delta() const { return T / static_cast<double>(n()); }
  /// Throws DomainError unless x has at least two entries and x[0] = 0.
  void validate() const;

  static CoarseObservations from_path(const SamplePath& path);
};

struct EstimateRecord {
  std::string estimator;
  double value = 0.0;
  double truth = 0.0;
  double sq_error = 0.0;
  std::uint64_t rep_id = 0;

  static EstimateRecord make(std::string estimator, double value, double truth, std::uint64_t rep_id)
  {
    const double e = value - truth;
    return {std::move(estimator), value, truth, e * e, rep_id};
  }
};

/// Delta * #{k = 1..n : a <= X_{t_{k-1}} <= b}. Either bound may be infinite.
/// Throws DomainError if a > b.
double riemann_occupation(const CoarseObservations& obs, double a, double b);

/// riemann_occupation(obs, y - h, y + h) / (2h). Throws DomainError if h <= 0.
double riemann_local_time(const CoarseObservations& obs, double y, double h);
/// Same with the default bandwidth h = Delta^(1/alpha).
double riemann_local_time(const CoarseObservations& obs, double y);

/// Conditional expectation of the occupation time of [y, inf) given the
/// observations: a sum of bridge integrals, one per step. A quadrature
/// failure is rethrown as NumericError naming the step index.
double optimal_occupation(const CoarseObservations& obs, double y);
double optimal_occupation(const CoarseObservations& obs, double y, const BridgeKernel& kernel);

}  // namespace occtime
