#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "occtime/theory.hpp"

namespace occtime {

enum class Estimator { riemann_occupation, riemann_local_time, optimal_occupation };

const char* to_string(Estimator e);
/// Throws DomainError for an unknown name.
Estimator estimator_from_string(const std::string& name);

struct StudyConfig {
  double alpha = 2.0;
  double T = 1.0;
  std::vector<std::int64_t> n_grid{64, 128, 256};
  std::int64_t refine = 256;
  std::int64_t reps = 1000;
  std::uint64_t seed = 1;
  std::vector<Estimator> estimators{Estimator::riemann_occupation};
  /// Occupation target [a, b]; the default is the half-line [0, inf).
  double a = 0.0;
  double b = std::numeric_limits<double>::infinity();
  /// Local time level.
  double y = 0.0;
  /// Local time bandwidth h = bandwidth_scale * delta^(1/alpha).
  double bandwidth_scale = 1.0;
  /// Worker threads; 0 means one per hardware thread. Never changes results.
  unsigned threads = 0;

  bool half_line() const { return b == std::numeric_limits<double>::infinity(); }
  /// Throws DomainError on any violated precondition.
  void validate() const;
};

/// Per (n, estimator) aggregate of squared errors.
struct ErrorPoint {
  Estimator estimator = Estimator::riemann_occupation;
  std::int64_t n = 0;
  double delta = 0.0;
  double mse = 0.0;
  double se = 0.0;
  double normalized_mse = 0.0;
  std::optional<double> theory_constant;
  std::optional<double> z_score;
};

struct RatePoint {
  double delta;
  double mse;
  double se;
};

/// Slope and intercept of log(mse) against log(delta) with a 95% interval
/// for the slope.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double ci_half_width = 0.0;
  double chi2_reduced = 0.0;
  bool weighted = false;

  bool covers(double value) const { return std::abs(value - slope) <= ci_half_width; }
};

/// Weighted least squares with weights (mse/se)^2 (the inverse variance of
/// log mse); ordinary least squares if any se is zero. The interval is
/// widened by sqrt(chi2_reduced) when the residuals exceed their standard
/// errors. Needs at least three points; throws DomainError for mse <= 0.
RateFit fit_rate(const std::vector<RatePoint>& points);

struct EstimatorFit {
  Estimator estimator;
  RateFit fit;
  std::optional<double> theory_slope;
};

struct ConvergenceResult {
  StudyConfig config;
  std::vector<ErrorPoint> points;  // ordered by n, then by config.estimators
  std::vector<EstimatorFit> fits;  // empty when n_grid has fewer than three entries
};

/// Simulates reps paths per n (truth on the refined grid, estimators on the
/// coarse subsample) and aggregates squared errors.
ConvergenceResult run_error_study(const StudyConfig& cfg);

/// Writes the study CSV: alpha,T,n,delta,estimator,mse,se,normalized_mse,
/// theory_constant,z_score. Undefined fields are left empty.
void write_study_csv(const ConvergenceResult& result, std::ostream& out);

/// One Monte Carlo moment against its closed-form target.
struct MomentCheck {
  std::string name;
  double estimate = 0.0;
  double se = 0.0;
  double target = 0.0;

  /// (estimate - target) / se; infinite if se = 0 and they differ.
  double z() const;
};

struct IdentityReport {
  double alpha = 0.0;
  double T = 0.0;
  std::int64_t n = 0;
  std::int64_t reps = 0;
  std::vector<MomentCheck> checks;  // E[O^2], E[O_hat^2], 2E[O O_hat], squared error

  const MomentCheck& check(const std::string& name) const;
  bool passed(double z_max = 3.0) const;
};

/// Path Monte Carlo of the second moments of the half-line occupation time
/// at 0 and its Riemann estimator against their exact values.
IdentityReport run_exact_identity_check(const StudyConfig& cfg);

struct OptimalRow {
  std::int64_t n = 0;
  double delta = 0.0;
  double riemann_mse = 0.0, riemann_se = 0.0;
  double optimal_mse = 0.0, optimal_se = 0.0;
  double ratio = 0.0, ratio_se = 0.0;
  double ratio_lower_99 = 0.0;  // one-sided
  /// Normalized optimal error over 2 E[L_T(y)], alpha > 1 only.
  std::optional<double> variance_integral;
};

struct OptimalReport {
  ConvergenceResult errors;
  std::vector<OptimalRow> rows;
  std::optional<double> tilde_C;  // alpha > 1

  bool passed() const;
};

/// Paired comparison of the Riemann and conditional-expectation estimators
/// of the occupation time of [y, inf).
OptimalReport run_optimal_study(const StudyConfig& cfg);

struct LogRegimeRow {
  std::int64_t n = 0;
  double normalized = 0.0;
  double limit = 0.0;
  double deviation = 0.0;  // normalized / limit - 1
};

struct LogRegimeReport {
  double alpha = 0.0;
  double T = 0.0;
  std::vector<LogRegimeRow> rows;
  double tolerance = 0.2;

  bool decreasing() const;
  bool passed() const;
};

/// Exact error of the half-line Riemann estimator along n_list, normalized
/// by delta^2 log n (alpha < 1) or delta^2 log^2 n (alpha = 1).
LogRegimeReport run_logregime_study(double alpha, double T, const std::vector<std::int64_t>& n_list);

struct ConsistencyRow {
  std::int64_t n = 0;
  double mean_abs_error = 0.0;
  double se = 0.0;
};

struct ConsistencyReport {
  StudyConfig config;
  std::vector<ConsistencyRow> rows;
  double tolerance = 0.0;  // 0.01 T

  bool decreasing() const;
  bool passed() const;
};

/// Mean absolute error of the Riemann estimator of the occupation time of
/// [a, b] along n_grid.
ConsistencyReport run_consistency_check(const StudyConfig& cfg);

/// JSON manifest of a run: the full configuration and library version.
std::string study_manifest(const std::string& study, const StudyConfig& cfg);

/// Static partition of [0, count) over the worker threads. `body(i)` must
/// only write state owned by index i.
void parallel_for(std::int64_t count, unsigned threads, const std::function<void(std::int64_t)>& body);

}  // namespace occtime
