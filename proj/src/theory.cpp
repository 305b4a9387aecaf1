#include "occtime/theory.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "occtime/error.hpp"
#include "quadrature.hpp"

namespace occtime {

namespace {

constexpr double kPi = std::numbers::pi;

// 2 atanh(e) / e, continuous at e = 0.
double atanh_ratio(double e)
{
  if (std::abs(e) < 1e-4) return 2.0 * (1.0 + e * e / 3.0 + e * e * e * e / 5.0);
  return 2.0 * std::atanh(e) / e;
}

// Integral of psi(x) g(x) over (0, n/2) for g smooth on (0, n/2], with an
// integrable singularity allowed at 0. The caller passes xg(x) = x g(x), which
// stays finite at the tiny abscissas of the double-exponential rule. The
// first period is integrated with
// a double-exponential rule and the next ones per period. Past kPeriods
// periods psi is replaced by its mean 1/6 plus the Euler-Maclaurin
// correction for the periodic Bernoulli polynomial, which is exact up to
// terms in g'''.
double psi_weighted_integral(const std::function<double(double)>& xg, std::int64_t n)
{
  auto g = [&](double x) { return xg(x) / x; };
  constexpr std::int64_t kPeriods = 256;
  const double end = 0.5 * static_cast<double>(n);
  double sum = quad::tanh_sinh([&](double x) { return (1.0 - x) * xg(x); }, 0.0, std::min(1.0, end), 1e-12,
                               "psi integral");
  if (end <= 1.0) return sum;

  const auto& rule = quad::gauss_legendre(10);
  auto period = [&](double j, double upper) {
    return rule.integrate(
        [&](double x) {
          const double u = x - j;
          return (u - u * u) * g(x);
        },
        j, upper);
  };

  const std::int64_t whole = n / 2;  // floor(end)
  if (whole <= kPeriods) {
    for (std::int64_t j = 1; j < whole; ++j) sum += period(static_cast<double>(j), j + 1.0);
    if (n % 2 == 1) sum += period(static_cast<double>(whole), end);
    return sum;
  }

  for (std::int64_t j = 1; j < kPeriods; ++j) sum += period(static_cast<double>(j), j + 1.0);
  const double start = static_cast<double>(kPeriods);
  const double log_start = std::log(start), log_end = std::log(end);
  std::vector<double> cuts{log_start};
  for (double c = std::ceil(log_start); c < log_end; c += 1.0) cuts.push_back(c);
  cuts.push_back(log_end);
  const double mean_part = quad::adaptive_split(
      [&](double u) {
        return xg(std::exp(u));
      },
      cuts, 1e-12, "psi integral");
  auto slope = [&](double x) {
    const double h = 1e-3 * x;
    return (g(x + h) - g(x - h)) / (2.0 * h);
  };
  const double correction = n % 2 == 0 ? -(slope(end) - slope(start)) / 360.0
                                       : 7.0 * slope(end) / 2880.0 + slope(start) / 360.0;
  return sum + mean_part / 6.0 + correction;
}

}  // namespace

Regime regime_of(double alpha)
{
  if (alpha > 1.0) return Regime::alpha_gt_1;
  if (alpha < 1.0) return Regime::alpha_lt_1;
  return Regime::alpha_eq_1;
}

const char* to_string(Regime regime)
{
  switch (regime) {
    case Regime::alpha_gt_1: return "alpha_gt_1";
    case Regime::alpha_lt_1: return "alpha_lt_1";
    case Regime::alpha_eq_1: return "alpha_eq_1";
  }
  return "unknown";
}

double occupation_error_scale(double alpha, double delta, std::int64_t n)
{
  const double log_n = std::log(static_cast<double>(n));
  switch (regime_of(alpha)) {
    case Regime::alpha_gt_1: return std::pow(delta, 1.0 + 1.0 / alpha);
    case Regime::alpha_lt_1: return delta * delta * log_n;
    case Regime::alpha_eq_1: return delta * delta * log_n * log_n;
  }
  return 0.0;
}

double local_time_error_scale(double alpha, double delta) { return std::pow(delta, 1.0 - 1.0 / alpha); }

double psi(double x)
{
  require(x >= 0.0, "psi needs x >= 0");
  const double u = x - std::floor(x);
  return u - u * u;
}

double psi_integral(double alpha)
{
  require(alpha > 1.0 && alpha <= 2.0, "psi_integral needs 1 < alpha <= 2 (the integral diverges otherwise)");
  const double p = 2.0 - 1.0 / alpha;
  const auto& rule = quad::gauss_legendre(20);
  // Shifted-period terms t(k) and their k-derivatives; all smooth in u.
  auto term = [&](double k, int derivative) {
    double falling = 1.0;
    for (int i = 0; i < derivative; ++i) falling *= -(p + i);
    return falling * rule.integrate([&](double u) { return (u - u * u) * std::pow(u + k, -p - derivative); }, 0.0, 1.0);
  };

  double sum = alpha * alpha / (alpha + 1.0);  // first period in closed form
  constexpr int kTerms = 64;
  for (int k = 1; k < kTerms; ++k) sum += term(k, 0);

  // Euler-Maclaurin for the remaining sum over k >= kTerms.
  const double K = kTerms;
  const double integral_tail =
      rule.integrate([&](double u) { return (u - u * u) * std::pow(u + K, 1.0 - p); }, 0.0, 1.0) / (p - 1.0);
  constexpr double kBernoulli[] = {1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0};
  double correction = 0.0;
  double factorial = 1.0;
  for (int j = 1; j <= 4; ++j) {
    factorial *= (2.0 * j - 1.0) * (2.0 * j);
    correction += kBernoulli[j - 1] / factorial * term(K, 2 * j - 1);
  }
  return sum + integral_tail + 0.5 * term(K, 0) - correction;
}

Estimate phi_mc(const StableLaw& law, double x, double y, RngStream& rng, std::int64_t reps)
{
  require(reps >= 1, "phi_mc needs at least one replication");
  require(x >= 0.0 && y >= 0.0, "phi needs x, y >= 0");
  const double sx = std::pow(x, 1.0 / law.alpha());
  const double sy = std::pow(y, 1.0 / law.alpha());
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < reps; ++i) {
    const double z = law.sample(rng);
    const double z2 = law.sample(rng);
    hits += (z >= 0.0 && z2 >= 0.0 && sx * z <= sy * z2);
  }
  const double p = static_cast<double>(hits) / static_cast<double>(reps);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(reps))};
}

double expected_psi_term_quad(const StableLaw& law, std::int64_t n)
{
  require(n >= 1, "n must be at least 1");
  if (n == 1) return 1.0;  // psi(D) = D(1 - D) on (0, 1)
  const double nn = static_cast<double>(n);
  auto xg = [&](double x) { return law.f_D(x / nn) / (1.0 - x / nn); };
  return 2.0 * psi_weighted_integral(xg, n);
}

Estimate expected_psi_term_mc(const StableLaw& law, std::int64_t n, RngStream& rng, std::int64_t reps)
{
  require(n >= 1, "n must be at least 1");
  require(reps >= 2, "need at least two replications");
  double mean = 0.0, m2 = 0.0;
  for (std::int64_t i = 0; i < reps; ++i) {
    const double d = law.sample_ratio_D(rng);
    const double v = psi(static_cast<double>(n) * d) / (d * (1.0 - d));
    const double step = v - mean;
    mean += step / static_cast<double>(i + 1);
    m2 += step * (v - mean);
  }
  return {mean, std::sqrt(m2 / static_cast<double>(reps - 1) / static_cast<double>(reps))};
}

double exact_riemann_error(const StableLaw& law, double T, std::int64_t n)
{
  require(T > 0.0, "horizon T must be positive");
  require(n >= 1, "n must be at least 1");
  const double delta = T / static_cast<double>(n);
  return delta * delta / 4.0 + delta * delta / 8.0 * expected_psi_term_quad(law, n);
}

TheoryConstant theorem1_limit(const StableLaw& law, double T)
{
  require(T > 0.0, "horizon T must be positive");
  const double alpha = law.alpha();
  TheoryConstant c;
  c.name = "riemann_occupation_limit";
  c.alpha = alpha;
  c.regime = regime_of(alpha);
  switch (c.regime) {
    case Regime::alpha_gt_1:
      c.value = std::pow(T, 1.0 - 1.0 / alpha) * 2.0 * std::tgamma(1.0 / alpha) / (kPi * alpha * alpha) *
                law.abs_moment(1.0) * psi_integral(alpha);
      c.normalization = "delta^(1+1/alpha)";
      break;
    case Regime::alpha_lt_1:
      c.value = std::tgamma(alpha) * std::sin(kPi * alpha / 2.0) / (12.0 * kPi) * law.abs_moment(-alpha);
      c.normalization = "delta^2 log(n)";
      break;
    case Regime::alpha_eq_1:
      c.value = 1.0 / (12.0 * kPi * kPi);
      c.normalization = "delta^2 log(n)^2";
      break;
  }
  return c;
}

double mean_local_time(const StableLaw& law, double T, double y)
{
  const double alpha = law.alpha();
  require(alpha > 1.0, "local time exists only for alpha > 1");
  require(T > 0.0, "horizon T must be positive");
  if (y == 0.0) return std::tgamma(1.0 / alpha) / (kPi * (alpha - 1.0)) * std::pow(T, 1.0 - 1.0 / alpha);
  return quad::tanh_sinh([&](double t) { return t > 0.0 ? law.density(y, t) : 0.0; }, 0.0, T, 1e-12,
                         "mean local time");
}

double tilde_C(double alpha)
{
  require(alpha > 1.0 && alpha <= 2.0, "tilde_C needs 1 < alpha <= 2");
  return 2.0 * (2.0 * alpha + 1.0) * (alpha - 1.0) / (alpha * alpha * alpha) * psi_integral(alpha);
}

std::vector<double> figure1_grid()
{
  std::vector<double> grid;
  for (int k = 21; k <= 40; ++k) grid.push_back(k * 0.05);
  return grid;
}

std::vector<std::pair<double, double>> figure1_table(std::span<const double> alphas)
{
  std::vector<std::pair<double, double>> rows;
  rows.reserve(alphas.size());
  for (double a : alphas) rows.emplace_back(a, tilde_C(a));
  return rows;
}

double C_of_alpha(double alpha)
{
  require(alpha > 1.0 && alpha <= 2.0, "C(alpha) needs 1 < alpha <= 2");
  return -(alpha - 1.0) * std::tgamma(alpha) * std::cos(kPi * alpha / 2.0);
}

double rho_min_density(const StableLaw& law, double r, double s, double u)
{
  require(law.alpha() <= 1.0, "rho_min_density needs alpha <= 1");
  require(r > 0.0 && r <= 1.0 && s > 0.0 && s <= 1.0, "times r, s must lie in (0, 1]");
  require(r != s, "times r and s must differ");
  require(u > 0.0, "rho_min_density needs u > 0");
  if (r > s) std::swap(r, s);
  const double gap = s - r;
  const double width = std::pow(gap, 1.0 / law.alpha());
  const double convolution = quad::half_line(
      [&](double v) { return law.density(u + v, r) * law.density(v, gap); }, 0.0, width, 1e-13, "rho density");
  return 0.5 * law.density(u, r) + convolution;
}

double lemma3_integral_i(std::int64_t n)
{
  require(n >= 4, "n must be at least 4");
  const double nn = static_cast<double>(n);
  return psi_weighted_integral([&](double x) { return 1.0 / (1.0 - x / nn); }, n) / std::log(nn);
}

double lemma3_integral_ii(std::int64_t n)
{
  require(n >= 4, "n must be at least 4");
  const double nn = static_cast<double>(n);
  // log(n/x - 1) / (1 - 2x/n) = 2 atanh(e) / e with e = 1 - 2x/n, which has
  // no singularity at x = n/2; the log form keeps precision near x = 0.
  auto log_ratio = [&](double x) {
    if (4.0 * x < nn) return std::log(nn / x - 1.0) / (1.0 - 2.0 * x / nn);
    return atanh_ratio(1.0 - 2.0 * x / nn);
  };
  const double value = psi_weighted_integral([&](double x) { return log_ratio(x) / (1.0 - x / nn); }, n);
  const double log_n = std::log(nn);
  return value / (log_n * log_n);
}

}  // namespace occtime
