#include "occtime/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "json.hpp"
#include "occtime/error.hpp"
#include "occtime/estimators.hpp"
#include "occtime/paths.hpp"

namespace occtime {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t stream_of(std::size_t n_index, std::int64_t rep)
{
  return (static_cast<std::uint64_t>(n_index) << 40) | static_cast<std::uint64_t>(rep);
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  double var = 0.0;
};

// Two-pass mean and standard error, in index order.
MeanSe summarize(const std::vector<double>& v)
{
  const double count = static_cast<double>(v.size());
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / count;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double var = v.size() > 1 ? ss / (count - 1.0) : 0.0;
  return {mean, std::sqrt(var / count), var};
}

double covariance(const std::vector<double>& u, const std::vector<double>& v, double mu, double mv)
{
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += (u[i] - mu) * (v[i] - mv);
  return u.size() > 1 ? s / static_cast<double>(u.size() - 1) : 0.0;
}

// What one replication produces.
struct Replication {
  double occupation_truth = 0.0;
  double local_time_truth = 0.0;
  double riemann_occupation = 0.0;
  double riemann_local_time = 0.0;
  double optimal_occupation = 0.0;
};

struct Needs {
  bool local_time = false;
  bool optimal = false;
};

// One path: fine-grid truths are accumulated while streaming, the coarse
// observations are kept for the estimators.
Replication replicate(const StableLaw& law, const StudyConfig& cfg, const GridSpec& grid, RngStream& rng,
                      const Needs& needs, const BridgeKernel* kernel)
{
  const std::int64_t steps = grid.fine_steps();
  const double fine_h = needs.local_time ? std::pow(grid.fine_step(), 1.0 / law.alpha()) : 0.0;
  CoarseObservations obs{law.alpha(), grid.T, std::vector<double>(static_cast<std::size_t>(grid.n + 1))};
  std::int64_t index = 0, in_target = 0, in_window = 0;
  stream_path(law, grid, rng, [&](std::span<const double> chunk) {
    for (double x : chunk) {
      if (index < steps) {
        in_target += (x >= cfg.a && x <= cfg.b);
        in_window += (std::abs(x - cfg.y) <= fine_h);
      }
      if (index % grid.refine == 0) obs.x[static_cast<std::size_t>(index / grid.refine)] = x;
      ++index;
    }
  });

  Replication out;
  out.occupation_truth = grid.fine_step() * static_cast<double>(in_target);
  out.riemann_occupation = riemann_occupation(obs, cfg.a, cfg.b);
  if (needs.local_time) {
    out.local_time_truth = grid.fine_step() * static_cast<double>(in_window) / (2.0 * fine_h);
    const double h = cfg.bandwidth_scale * std::pow(grid.delta(), 1.0 / law.alpha());
    out.riemann_local_time = riemann_local_time(obs, cfg.y, h);
  }
  if (needs.optimal) out.optimal_occupation = optimal_occupation(obs, cfg.a, *kernel);
  return out;
}

// All replications for one n, in rep order.
std::vector<Replication> replicate_all(const StableLaw& law, const StudyConfig& cfg, std::size_t n_index,
                                       const Needs& needs)
{
  const GridSpec grid{cfg.T, cfg.n_grid[n_index], cfg.refine};
  std::optional<BridgeKernel> kernel;
  if (needs.optimal) kernel.emplace(law, grid.delta());
  std::vector<Replication> reps(static_cast<std::size_t>(cfg.reps));
  parallel_for(cfg.reps, cfg.threads, [&](std::int64_t r) {
    RngStream rng(cfg.seed, stream_of(n_index, r));
    reps[static_cast<std::size_t>(r)] = replicate(law, cfg, grid, rng, needs, kernel ? &*kernel : nullptr);
  });
  return reps;
}

std::vector<double> squared_errors(const std::vector<Replication>& reps, Estimator e)
{
  std::vector<double> out(reps.size());
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const Replication& r = reps[i];
    double d = 0.0;
    switch (e) {
      case Estimator::riemann_occupation: d = r.riemann_occupation - r.occupation_truth; break;
      case Estimator::riemann_local_time: d = r.riemann_local_time - r.local_time_truth; break;
      case Estimator::optimal_occupation: d = r.optimal_occupation - r.occupation_truth; break;
    }
    out[i] = d * d;
  }
  return out;
}

bool is_local_time(Estimator e) { return e == Estimator::riemann_local_time; }

std::optional<double> theory_slope(const StudyConfig& cfg, Estimator e)
{
  if (is_local_time(e)) return 1.0 - 1.0 / cfg.alpha;
  if (cfg.alpha > 1.0) return 1.0 + 1.0 / cfg.alpha;
  if (cfg.half_line()) return 2.0;  // up to the logarithmic factor
  return std::nullopt;
}

std::string format_number(double v)
{
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

}  // namespace

const char* to_string(Estimator e)
{
  switch (e) {
    case Estimator::riemann_occupation: return "riemann_occupation";
    case Estimator::riemann_local_time: return "riemann_local_time";
    case Estimator::optimal_occupation: return "optimal_occupation";
  }
  return "unknown";
}

Estimator estimator_from_string(const std::string& name)
{
  for (Estimator e : {Estimator::riemann_occupation, Estimator::riemann_local_time, Estimator::optimal_occupation}) {
    if (name == to_string(e)) return e;
  }
  throw DomainError("unknown estimator '" + name + "'");
}

void StudyConfig::validate() const
{
  require(alpha > 0.0 && alpha <= 2.0, "alpha must lie in (0, 2]");
  require(T > 0.0, "horizon T must be positive");
  require(!n_grid.empty(), "n grid must not be empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    require(n_grid[i] >= 1, "every n must be at least 1");
    require(i == 0 || n_grid[i] > n_grid[i - 1], "n grid must be strictly increasing");
  }
  require(refine >= 1, "refine factor must be at least 1");
  require(reps >= 2, "reps must be at least 2");
  require(reps < (std::int64_t{1} << 40), "reps must be below 2^40");
  require(!estimators.empty(), "at least one estimator is required");
  require(!(a > b), "target interval needs a <= b");
  require(bandwidth_scale > 0.0, "bandwidth scale must be positive");
  for (Estimator e : estimators) {
    if (is_local_time(e)) require(alpha > 1.0, "local time exists only for alpha > 1");
    if (e == Estimator::optimal_occupation) {
      require(half_line() && std::isfinite(a), "the optimal estimator needs a half-line target [y, inf)");
    }
  }
}

double MomentCheck::z() const
{
  if (se > 0.0) return (estimate - target) / se;
  return estimate == target ? 0.0 : kInf;
}

void parallel_for(std::int64_t count, unsigned threads, const std::function<void(std::int64_t)>& body)
{
  unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::int64_t>(workers, std::max<std::int64_t>(count, 1)));
  if (workers <= 1) {
    for (std::int64_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    const std::int64_t lo = count * w / workers, hi = count * (w + 1) / workers;
    pool.emplace_back([&, w, lo, hi] {
      try {
        for (std::int64_t i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

RateFit fit_rate(const std::vector<RatePoint>& points)
{
  require(points.size() >= 3, "a rate fit needs at least three points");
  bool weighted = true;
  for (const auto& p : points) {
    require(p.mse > 0.0 && p.delta > 0.0, "rate fit needs positive mse and delta");
    if (!(p.se > 0.0)) weighted = false;
  }
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : points) {
    const double w = weighted ? (p.mse / p.se) * (p.mse / p.se) : 1.0;
    const double x = std::log(p.delta), y = std::log(p.mse);
    sw += w;
    sx += w * x;
    sy += w * y;
    sxx += w * x * x;
    sxy += w * x * y;
  }
  const double det = sw * sxx - sx * sx;
  require(det > 0.0, "rate fit needs at least two distinct deltas");
  RateFit fit;
  fit.weighted = weighted;
  fit.slope = (sw * sxy - sx * sy) / det;
  fit.intercept = (sy - fit.slope * sx) / sw;
  double chi2 = 0.0;
  for (const auto& p : points) {
    const double w = weighted ? (p.mse / p.se) * (p.mse / p.se) : 1.0;
    const double r = std::log(p.mse) - fit.intercept - fit.slope * std::log(p.delta);
    chi2 += w * r * r;
  }
  const double dof = static_cast<double>(points.size()) - 2.0;
  fit.chi2_reduced = chi2 / dof;
  if (weighted) {
    fit.ci_half_width = 1.96 * std::sqrt(sw / det) * std::sqrt(std::max(1.0, fit.chi2_reduced));
  } else {
    const boost::math::students_t t(dof);
    fit.ci_half_width = boost::math::quantile(boost::math::complement(t, 0.025)) * std::sqrt(fit.chi2_reduced * sw / det);
  }
  return fit;
}

ConvergenceResult run_error_study(const StudyConfig& cfg)
{
  cfg.validate();
  const StableLaw& law = StableLaw::shared(cfg.alpha);
  Needs needs;
  for (Estimator e : cfg.estimators) {
    needs.local_time |= is_local_time(e);
    needs.optimal |= e == Estimator::optimal_occupation;
  }
  const bool at_zero = cfg.half_line() && cfg.a == 0.0;
  const std::optional<double> limit = at_zero ? std::optional(theorem1_limit(law, cfg.T).value) : std::nullopt;

  ConvergenceResult result{cfg, {}, {}};
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    const std::int64_t n = cfg.n_grid[i];
    const double delta = cfg.T / static_cast<double>(n);
    const auto reps = replicate_all(law, cfg, i, needs);
    for (Estimator e : cfg.estimators) {
      const MeanSe s = summarize(squared_errors(reps, e));
      ErrorPoint p;
      p.estimator = e;
      p.n = n;
      p.delta = delta;
      p.mse = s.mean;
      p.se = s.se;
      p.normalized_mse = s.mean / (is_local_time(e) ? local_time_error_scale(cfg.alpha, delta)
                                                    : occupation_error_scale(cfg.alpha, delta, n));
      if (e == Estimator::riemann_occupation && at_zero) {
        p.theory_constant = limit;
        if (s.se > 0.0) p.z_score = (s.mean - exact_riemann_error(law, cfg.T, n)) / s.se;
      }
      if (e == Estimator::optimal_occupation && at_zero && cfg.alpha <= 1.0) p.theory_constant = limit;
      result.points.push_back(p);
    }
  }
  if (cfg.n_grid.size() >= 3) {
    for (Estimator e : cfg.estimators) {
      std::vector<RatePoint> pts;
      for (const auto& p : result.points) {
        if (p.estimator == e && p.mse > 0.0) pts.push_back({p.delta, p.mse, p.se});
      }
      if (pts.size() >= 3) result.fits.push_back({e, fit_rate(pts), theory_slope(cfg, e)});
    }
  }
  return result;
}

void write_study_csv(const ConvergenceResult& result, std::ostream& out)
{
  out << "alpha,T,n,delta,estimator,mse,se,normalized_mse,theory_constant,z_score\n";
  for (const auto& p : result.points) {
    out << format_number(result.config.alpha) << ',' << format_number(result.config.T) << ',' << p.n << ','
        << format_number(p.delta) << ',' << to_string(p.estimator) << ',' << format_number(p.mse) << ','
        << format_number(p.se) << ',' << format_number(p.normalized_mse) << ',' << format_optional(p.theory_constant)
        << ',' << format_optional(p.z_score) << '\n';
  }
}

const MomentCheck& IdentityReport::check(const std::string& name) const
{
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw DomainError("no moment check named '" + name + "'");
}

bool IdentityReport::passed(double z_max) const
{
  return std::all_of(checks.begin(), checks.end(), [&](const MomentCheck& c) { return std::abs(c.z()) < z_max; });
}

IdentityReport run_exact_identity_check(const StudyConfig& cfg_in)
{
  StudyConfig cfg = cfg_in;
  cfg.a = 0.0;
  cfg.b = kInf;
  cfg.estimators = {Estimator::riemann_occupation};
  cfg.n_grid.resize(1);
  cfg.validate();
  const StableLaw& law = StableLaw::shared(cfg.alpha);
  const auto reps = replicate_all(law, cfg, 0, Needs{});

  const std::size_t count = reps.size();
  std::vector<double> truth_sq(count), est_sq(count), cross(count), err_sq(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double o = reps[i].occupation_truth, e = reps[i].riemann_occupation;
    truth_sq[i] = o * o;
    est_sq[i] = e * e;
    cross[i] = 2.0 * o * e;
    err_sq[i] = (e - o) * (e - o);
  }
  const double T = cfg.T, n = static_cast<double>(cfg.n_grid[0]);
  const double delta = T / n;
  const double psi_term = expected_psi_term_quad(law, cfg.n_grid[0]);

  IdentityReport report{cfg.alpha, T, cfg.n_grid[0], cfg.reps, {}};
  auto add = [&](const char* name, const std::vector<double>& v, double target) {
    const MeanSe s = summarize(v);
    report.checks.push_back({name, s.mean, s.se, target});
  };
  add("occupation_second_moment", truth_sq, 3.0 / 8.0 * T * T);
  add("riemann_second_moment", est_sq, 3.0 / 8.0 * T * T + 3.0 / 8.0 * T * delta + delta * delta / 4.0);
  add("cross_moment", cross, 3.0 / 4.0 * T * T + 3.0 / 8.0 * T * delta - delta * delta / 8.0 * psi_term);
  add("squared_error", err_sq, delta * delta / 4.0 + delta * delta / 8.0 * psi_term);
  return report;
}

bool OptimalReport::passed() const
{
  if (rows.empty()) return false;
  return std::all_of(rows.begin(), rows.end(), [&](const OptimalRow& r) {
    if (tilde_C) return r.ratio_lower_99 > 1.0;
    return r.ratio > 1.0 - 3.0 * r.ratio_se;  // no strict gain is claimed for alpha <= 1
  });
}

OptimalReport run_optimal_study(const StudyConfig& cfg_in)
{
  StudyConfig cfg = cfg_in;
  cfg.estimators = {Estimator::riemann_occupation, Estimator::optimal_occupation};
  cfg.validate();
  const StableLaw& law = StableLaw::shared(cfg.alpha);

  OptimalReport report;
  report.errors.config = cfg;
  if (cfg.alpha > 1.0) report.tilde_C = tilde_C(cfg.alpha);
  const bool at_zero = cfg.a == 0.0;
  const double limit = theorem1_limit(law, cfg.T).value;
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    const std::int64_t n = cfg.n_grid[i];
    const double delta = cfg.T / static_cast<double>(n);
    const double scale = occupation_error_scale(cfg.alpha, delta, n);
    const auto reps = replicate_all(law, cfg, i, Needs{false, true});
    const auto r = squared_errors(reps, Estimator::riemann_occupation);
    const auto o = squared_errors(reps, Estimator::optimal_occupation);
    const MeanSe sr = summarize(r), so = summarize(o);
    if (!(so.mean > 0.0)) throw DomainError("ratio undefined: optimal estimator has zero error");

    OptimalRow row;
    row.n = n;
    row.delta = delta;
    row.riemann_mse = sr.mean;
    row.riemann_se = sr.se;
    row.optimal_mse = so.mean;
    row.optimal_se = so.se;
    row.ratio = sr.mean / so.mean;
    // Delta method for a ratio of paired means.
    const double cov = covariance(r, o, sr.mean, so.mean);
    const double var = (sr.var - 2.0 * row.ratio * cov + row.ratio * row.ratio * so.var) /
                       (static_cast<double>(r.size()) * so.mean * so.mean);
    row.ratio_se = std::sqrt(std::max(var, 0.0));
    row.ratio_lower_99 = row.ratio - 2.326347874 * row.ratio_se;
    if (cfg.alpha > 1.0) row.variance_integral = so.mean / scale / (2.0 * mean_local_time(law, cfg.T, cfg.a));
    report.rows.push_back(row);

    for (Estimator e : cfg.estimators) {
      const MeanSe& s = e == Estimator::riemann_occupation ? sr : so;
      ErrorPoint p{e, n, delta, s.mean, s.se, s.mean / scale, std::nullopt, std::nullopt};
      if (at_zero && (e == Estimator::riemann_occupation || cfg.alpha <= 1.0)) p.theory_constant = limit;
      if (at_zero && e == Estimator::riemann_occupation && s.se > 0.0) {
        p.z_score = (s.mean - exact_riemann_error(law, cfg.T, n)) / s.se;
      }
      report.errors.points.push_back(p);
    }
  }
  return report;
}

bool LogRegimeReport::decreasing() const
{
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(std::abs(rows[i].deviation) < std::abs(rows[i - 1].deviation))) return false;
  }
  return true;
}

bool LogRegimeReport::passed() const
{
  return !rows.empty() && decreasing() && std::abs(rows.back().deviation) <= tolerance;
}

LogRegimeReport run_logregime_study(double alpha, double T, const std::vector<std::int64_t>& n_list)
{
  require(alpha > 0.0 && alpha <= 1.0, "the log regimes need 0 < alpha <= 1");
  require(T > 0.0, "horizon T must be positive");
  require(!n_list.empty(), "n list must not be empty");
  const StableLaw& law = StableLaw::shared(alpha);
  const double limit = theorem1_limit(law, T).value;
  LogRegimeReport report{alpha, T, {}, 0.2};
  for (std::int64_t n : n_list) {
    require(n >= 2, "the log normalization needs n >= 2");
    const double delta = T / static_cast<double>(n);
    const double normalized = exact_riemann_error(law, T, n) / occupation_error_scale(alpha, delta, n);
    report.rows.push_back({n, normalized, limit, normalized / limit - 1.0});
  }
  return report;
}

bool ConsistencyReport::decreasing() const
{
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].mean_abs_error < rows[i - 1].mean_abs_error)) return false;
  }
  return true;
}

bool ConsistencyReport::passed() const
{
  if (rows.empty()) return false;
  if (rows.back().mean_abs_error == 0.0) return true;  // e.g. A = R
  return decreasing() && rows.back().mean_abs_error <= tolerance;
}

ConsistencyReport run_consistency_check(const StudyConfig& cfg_in)
{
  StudyConfig cfg = cfg_in;
  cfg.estimators = {Estimator::riemann_occupation};
  cfg.validate();
  const StableLaw& law = StableLaw::shared(cfg.alpha);
  ConsistencyReport report{cfg, {}, 0.01 * cfg.T};
  for (std::size_t i = 0; i < cfg.n_grid.size(); ++i) {
    const auto reps = replicate_all(law, cfg, i, Needs{});
    std::vector<double> abs_err(reps.size());
    for (std::size_t k = 0; k < reps.size(); ++k) {
      abs_err[k] = std::abs(reps[k].riemann_occupation - reps[k].occupation_truth);
    }
    const MeanSe s = summarize(abs_err);
    report.rows.push_back({cfg.n_grid[i], s.mean, s.se});
  }
  return report;
}

std::string study_manifest(const std::string& study, const StudyConfig& cfg)
{
  auto bound = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(v > 0 ? "inf" : "-inf"); };
  nlohmann::json estimators = nlohmann::json::array();
  for (Estimator e : cfg.estimators) estimators.push_back(to_string(e));
  nlohmann::json j = {
      {"library", "occtime"},
      {"version", OCCTIME_VERSION},
      {"study", study},
      {"alpha", cfg.alpha},
      {"T", cfg.T},
      {"n_grid", cfg.n_grid},
      {"refine", cfg.refine},
      {"reps", cfg.reps},
      {"seed", cfg.seed},
      {"estimators", estimators},
      {"a", bound(cfg.a)},
      {"b", bound(cfg.b)},
      {"y", cfg.y},
      {"bandwidth_scale", cfg.bandwidth_scale},
      {"rng", "philox4x32-10, stream (n_index << 40) | rep"},
  };
  return j.dump(2);
}

}  // namespace occtime
