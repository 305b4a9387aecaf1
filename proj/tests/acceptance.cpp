// Acceptance runner. `acceptance K` checks criterion K (1..9) and prints one
// verdict line "[PASS] C<K> ..." or "[FAIL] C<K> ..."; detail lines start with
// two spaces. `acceptance all` runs every criterion. Exit status is nonzero
// if any requested criterion fails.

#include <algorithm>
#include <cstdarg>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "occtime/error.hpp"
#include "occtime/experiments.hpp"
#include "occtime/theory.hpp"

using namespace occtime;

namespace {

constexpr double kPi = std::numbers::pi;
const double kAlphas[] = {0.5, 1.0, 1.5, 2.0};

struct Verdict {
  bool pass = true;
  std::string summary;
};

void detail(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void detail(const char* fmt, ...)
{
  va_list args;
  va_start(args, fmt);
  std::printf("  ");
  std::vprintf(fmt, args);
  std::printf("\n");
  std::fflush(stdout);
  va_end(args);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0)
{
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Verdict moment_identities()
{
  Verdict v;
  double worst = 0.0;
  for (double alpha : kAlphas) {
    StudyConfig cfg;
    cfg.alpha = alpha;
    cfg.n_grid = {8};
    cfg.refine = 512;
    cfg.reps = 100000;
    cfg.seed = 101;
    const auto rep = run_exact_identity_check(cfg);
    for (const char* name : {"occupation_second_moment", "riemann_second_moment"}) {
      const auto& c = rep.check(name);
      detail("alpha=%.2g %-26s estimate=%.6f se=%.2e target=%.6f z=%+.2f", alpha, name, c.estimate, c.se, c.target,
             c.z());
      worst = std::max(worst, std::abs(c.z()));
      if (!(std::abs(c.z()) < 3.0)) v.pass = false;
    }
  }
  v.summary = fmt("second-moment identities at n=8, max |z| = %.2f (< 3)", worst);
  return v;
}

Verdict exact_error_identity()
{
  // The fine-grid truth error is correlated with the coarse error, so its
  // effect on the measured MSE scales like sqrt(truth error / coarse error)
  // rather than their ratio. A common fine grid of 2^14 steps keeps it below
  // a tenth of the Monte Carlo error at n = 4.
  constexpr std::int64_t kFineSteps = 16384;
  Verdict v;
  double worst = 0.0;
  for (double alpha : kAlphas) {
    for (std::int64_t n : {4, 16, 64}) {
      StudyConfig cfg;
      cfg.alpha = alpha;
      cfg.n_grid = {n};
      cfg.refine = kFineSteps / n;
      cfg.reps = 100000;
      cfg.seed = 202 + static_cast<std::uint64_t>(n);
      const auto p = run_error_study(cfg).points.front();
      const double exact = exact_riemann_error(StableLaw::shared(alpha), 1.0, p.n);
      const double z = (p.mse - exact) / p.se;
      detail("alpha=%.2g n=%-3lld refine=%-4lld mc=%.6e se=%.2e exact=%.6e z=%+.2f", alpha, static_cast<long long>(n),
             static_cast<long long>(cfg.refine), p.mse, p.se, exact, z);
      worst = std::max(worst, std::abs(z));
      if (!(std::abs(z) < 3.0)) v.pass = false;
    }
  }
  v.summary = fmt("path MC squared error vs exact identity, max |z| = %.2f (< 3)", worst);
  return v;
}

Verdict theorem1_alpha_gt_1()
{
  Verdict v;
  std::string tail;
  for (double alpha : {1.5, 2.0}) {
    const StableLaw& law = StableLaw::shared(alpha);
    const double limit = theorem1_limit(law, 1.0).value;
    double prev_dev = INFINITY, ratio = 0.0;
    bool monotone = true;
    for (int k = 4; k <= 20; k += 2) {
      const std::int64_t n = std::int64_t{1} << k;
      const double delta = 1.0 / static_cast<double>(n);
      ratio = exact_riemann_error(law, 1.0, n) / std::pow(delta, 1.0 + 1.0 / alpha) / limit;
      const double dev = std::abs(ratio - 1.0);
      detail("alpha=%.2g n=2^%-2d normalized/limit=%.6f", alpha, k, ratio);
      if (!(dev < prev_dev)) monotone = false;
      prev_dev = dev;
    }
    const bool ok = monotone && prev_dev < 0.05;
    if (!ok) v.pass = false;
    tail += fmt(" alpha=%.2g: ratio %.4f at 2^20", alpha, ratio) + (monotone ? "" : " (not monotone)") + ";";
  }
  v.summary = "normalized exact error vs stated constant within 5% at n=2^20:" + tail;
  return v;
}

Verdict theorem1_log_regimes()
{
  Verdict v;
  std::string tail;
  for (double alpha : {1.0, 0.5}) {
    const auto rep = run_logregime_study(alpha, 1.0, {10000, 1000000, 100000000});
    for (const auto& row : rep.rows)
      detail("alpha=%.2g n=%-10lld normalized=%.6e limit=%.6e deviation=%+.4f", alpha, static_cast<long long>(row.n),
             row.normalized, row.limit, row.deviation);
    if (!rep.passed()) v.pass = false;
    tail += fmt(" alpha=%.2g dev %.3f at 1e8", alpha, rep.rows.back().deviation) +
            (rep.decreasing() ? " (decreasing)" : " (not decreasing)") + ";";
  }
  v.summary = "log-regime limits within 20% at n=1e8:" + tail;
  return v;
}

Verdict rate_fits()
{
  Verdict v;
  std::string tail;
  for (double alpha : {2.0, 1.5}) {
    StudyConfig cfg;
    cfg.alpha = alpha;
    cfg.n_grid = {64, 128, 256, 512, 1024, 2048, 4096};
    cfg.refine = 32;
    cfg.reps = 10000;
    cfg.seed = 505;
    cfg.estimators = {Estimator::riemann_occupation, Estimator::riemann_local_time};
    const auto result = run_error_study(cfg);
    for (const auto& p : result.points)
      detail("alpha=%.2g n=%-5lld %-19s mse=%.4e se=%.2e", alpha, static_cast<long long>(p.n), to_string(p.estimator),
             p.mse, p.se);
    for (const auto& f : result.fits) {
      double lo, hi;
      if (f.estimator == Estimator::riemann_occupation) {
        lo = alpha == 2.0 ? 1.45 : 1.0 + 1.0 / alpha - 0.07;
        hi = alpha == 2.0 ? 1.55 : 1.0 + 1.0 / alpha + 0.07;
      } else {
        lo = 1.0 - 1.0 / alpha - 0.1;
        hi = 1.0 - 1.0 / alpha + 0.1;
      }
      const bool ok = f.fit.slope >= lo && f.fit.slope <= hi;
      detail("alpha=%.2g %-19s slope=%.4f +- %.4f (95%%) target [%.3f, %.3f] %s", alpha, to_string(f.estimator),
             f.fit.slope, f.fit.ci_half_width, lo, hi, ok ? "ok" : "out");
      if (!ok) v.pass = false;
      tail += fmt(" %.4f", f.fit.slope);
    }
  }
  v.summary = "rate slopes (occ a=2, lt a=2, occ a=1.5, lt a=1.5):" + tail;
  return v;
}

Verdict optimal_ordering()
{
  StudyConfig cfg;
  cfg.alpha = 2.0;
  cfg.n_grid = {16, 64};
  cfg.refine = 64;
  cfg.reps = 10000;
  cfg.seed = 606;
  const auto rep = run_optimal_study(cfg);
  Verdict v;
  v.pass = rep.passed();
  std::string tail;
  for (const auto& row : rep.rows) {
    detail("n=%-3lld riemann_mse=%.4e optimal_mse=%.4e ratio=%.4f se=%.4f lower99=%.4f tilde_C(2)=%.4f",
           static_cast<long long>(row.n), row.riemann_mse, row.optimal_mse, row.ratio, row.ratio_se,
           row.ratio_lower_99, rep.tilde_C.value_or(NAN));
    if (!(row.ratio_lower_99 > 1.0)) v.pass = false;
    tail += fmt(" n=%.0f ratio %.3f (99%% lower %.3f);", static_cast<double>(row.n), row.ratio, row.ratio_lower_99);
  }
  v.summary = "Riemann/optimal MSE ratio > 1 at 99%:" + tail + fmt(" tilde_C(2)=%.4f", rep.tilde_C.value_or(NAN));
  return v;
}

Verdict closed_forms()
{
  Verdict v;
  std::vector<std::string> failed;

  // g1 closed form vs its defining integral.
  boost::math::quadrature::exp_sinh<double> integrator;
  auto cauchy = [](double x) { return 1.0 / (kPi * (1.0 + x * x)); };
  double g1_worst = 0.0;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) {
      const double a = 0.25 * i, b = 0.1 + 0.25 * j;
      const double q = integrator.integrate([&](double x) { return x * cauchy(x) * cauchy(a + b * x); }, 1e-15);
      g1_worst = std::max(g1_worst, std::abs(q - g1_closed(a, b)));
    }
  detail("g1 closed form vs quadrature, 20x20 grid: max abs diff %.2e", g1_worst);
  if (!(g1_worst < 1e-10)) failed.push_back("g1");

  // f_D for alpha = 1: log form vs 4 x^-2 g1(0, 1/x - 1).
  const StableLaw& cauchy_law = StableLaw::shared(1.0);
  double fd_worst = 0.0;
  for (int i = 1; i < 200; ++i) {
    const double x = i / 200.0;
    fd_worst = std::max(fd_worst, std::abs(cauchy_law.f_D(x) - 4.0 / (x * x) * g1_closed(0.0, 1.0 / x - 1.0)));
  }
  detail("f_D(alpha=1) two formulas: max abs diff %.2e", fd_worst);
  if (!(fd_worst < 1e-10)) failed.push_back("f_D");

  // phi identities.
  double phi_worst = 0.0;
  for (double alpha : {0.5, 1.5}) {
    const StableLaw& law = StableLaw::shared(alpha);
    RngStream rng(707, static_cast<std::uint64_t>(alpha * 10));
    const std::int64_t reps = 400000;
    const auto a = phi_mc(law, 0.4, 1.3, rng, reps), b = phi_mc(law, 1.3, 0.4, rng, reps);
    const double z1 = (a.value + b.value - 0.25) / std::hypot(a.se, b.se);
    const auto s = phi_mc(law, 4.0, 13.0, rng, reps);
    const double z2 = (s.value - a.value) / std::hypot(s.se, a.se);
    const int nodes = 64;
    double sum = 0.0, var = 0.0;
    for (int k = 0; k < nodes; ++k) {
      const double u = (k + 0.5) / nodes;
      const auto e = phi_mc(law, 3.0 * (1.0 - u), 3.0 * u, rng, 50000);
      sum += 3.0 * e.value / nodes;
      var += std::pow(3.0 * e.se / nodes, 2);
    }
    const double z3 = (sum - 3.0 / 8.0) / std::sqrt(var);
    detail("alpha=%.2g phi(x,y)+phi(y,x)=1/4 z=%+.2f; phi(ax,ay)=phi(x,y) z=%+.2f; int_0^3 phi(3-x,x)dx=3/8 z=%+.2f",
           alpha, z1, z2, z3);
    phi_worst = std::max({phi_worst, std::abs(z1), std::abs(z2), std::abs(z3)});
  }
  if (!(phi_worst < 4.0)) failed.push_back("phi");

  // Log-normalized psi integrals at n = 1e6.
  const double li = lemma3_integral_i(1000000), lii = lemma3_integral_ii(1000000);
  const double di = li * 6.0 - 1.0, dii = lii * 12.0 - 1.0;
  detail("psi/(x(1-x/n)) integral / log n at n=1e6: %.6f vs 1/6 (deviation %+.3f, tolerance 0.05)", li, di);
  detail("log-weighted integral / log^2 n at n=1e6: %.6f vs 1/12 (deviation %+.3f, tolerance 0.08)", lii, dii);
  if (!(std::abs(di) < 0.05)) failed.push_back("log integral (i)");
  if (!(std::abs(dii) < 0.08)) failed.push_back("log integral (ii)");

  // Tail of the density of min(X_r, X_s).
  const StableLaw& half = StableLaw::shared(0.5);
  const double r = 0.3, s = 0.7, z = 1e3;
  const double rho_ratio = std::pow(z, 1.5) * rho_min_density(half, r, s, z) / (r * half.h_alpha_inf());
  detail("z^(1+alpha) rho(z) / ((r^s) h_inf) at z=1e3, alpha=0.5: %.5f", rho_ratio);
  if (!(rho_ratio >= 0.95 && rho_ratio <= 1.05)) failed.push_back("rho tail");

  v.pass = failed.empty();
  v.summary = "closed-form cross-checks";
  if (!failed.empty()) {
    v.summary += ", failing:";
    for (const auto& f : failed) v.summary += " " + f;
  }
  v.summary += fmt(" (g1 %.1e, f_D %.1e, phi max|z| %.2f", g1_worst, fd_worst, phi_worst) +
               fmt(", log integrals %.4f/%.4f, rho %.4f)", li, lii, rho_ratio);
  return v;
}

Verdict figure1()
{
  const auto table = figure1_table(figure1_grid());
  Verdict v;
  for (std::size_t i = 0; i < table.size(); ++i) {
    detail("alpha=%.2f tilde_C=%.6f", table[i].first, table[i].second);
    if (i > 0 && !(table[i].second > table[i - 1].second)) v.pass = false;
  }
  const double c2 = table.back().second;
  if (!(c2 >= 2.06 && c2 <= 2.10)) v.pass = false;
  v.summary = fmt("tilde_C strictly increasing on 1.05..2.00, tilde_C(2) = %.5f in [2.06, 2.10]", c2);
  return v;
}

Verdict determinism()
{
  Verdict v;
  auto run = [](unsigned threads, Estimator e, double alpha) {
    StudyConfig cfg;
    cfg.alpha = alpha;
    cfg.n_grid = {8, 16, 32};
    cfg.refine = 16;
    cfg.reps = 500;
    cfg.seed = 909;
    cfg.threads = threads;
    cfg.estimators = {e};
    if (e == Estimator::optimal_occupation) {
      cfg.n_grid = {4, 8};
      cfg.reps = 40;
    }
    std::ostringstream out;
    write_study_csv(run_error_study(cfg), out);
    return out.str();
  };
  int compared = 0;
  for (auto [e, alpha] : {std::pair{Estimator::riemann_occupation, 0.7}, {Estimator::riemann_local_time, 1.5},
                          {Estimator::optimal_occupation, 1.5}}) {
    const auto one = run(1, e, alpha);
    for (unsigned t : {2u, 4u}) {
      const bool same = one == run(t, e, alpha);
      detail("%s alpha=%.2g threads 1 vs %u: %s", to_string(e), alpha, t, same ? "identical" : "DIFFERENT");
      if (!same) v.pass = false;
      ++compared;
    }
  }
  v.summary = "study CSV byte-identical across thread counts (" + std::to_string(compared) + " comparisons)";
  return v;
}

const std::vector<std::function<Verdict()>> kCriteria = {
    moment_identities, exact_error_identity, theorem1_alpha_gt_1, theorem1_log_regimes, rate_fits,
    optimal_ordering,  closed_forms,         figure1,             determinism};

bool run_criterion(int k)
{
  const auto start = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = kCriteria[k - 1]();
  } catch (const std::exception& e) {
    v = {false, std::string("error: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::printf("[%s] C%d %s [%.0fs]\n", v.pass ? "PASS" : "FAIL", k, v.summary.c_str(), secs);
  std::fflush(stdout);
  return v.pass;
}

}  // namespace

int main(int argc, char** argv)
{
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <1..9|all>\n", argv[0]);
    return 2;
  }
  const std::string which = argv[1];
  bool ok = true;
  if (which == "all") {
    for (int k = 1; k <= 9; ++k) ok = run_criterion(k) && ok;
  } else {
    const int k = std::atoi(which.c_str());
    if (k < 1 || k > 9) {
      std::fprintf(stderr, "criterion must be 1..9 or all\n");
      return 2;
    }
    ok = run_criterion(k);
  }
  return ok ? 0 : 1;
}
