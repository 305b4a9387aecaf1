#include "stable_density.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <span>

#include <boost/math/tools/roots.hpp>

#include "occtime/error.hpp"
#include "quadrature.hpp"

namespace occtime::detail {

namespace {

constexpr double kPi = std::numbers::pi;

// Past this level of log g the factor exp(-g) underflows.
constexpr double kSaturated = 6.7;

// Integrals over theta in (0, pi/2) are taken in s with
// theta = (pi/2) / (1 + e^-s), which puts both endpoints on a log scale and
// keeps pi/2 - theta exact.
constexpr double kSpan = 700.0;

double theta_of(double s) { return (kPi / 2) / (1.0 + std::exp(-s)); }
double complement_of(double s) { return (kPi / 2) / (1.0 + std::exp(s)); }
double dtheta_ds(double s) { return theta_of(s) * complement_of(s) / (kPi / 2); }

class Zolotarev {
 public:
  Zolotarev(double alpha, double x)
      : alpha_(alpha), exponent_(alpha / (alpha - 1.0)), log_scale_(exponent_ * std::log(x))
  {
  }

  // log g as a function of s; monotone.
  double log_g(double s) const
  {
    const double theta = theta_of(s);
    return log_scale_ + (exponent_ - 1.0) * std::log(std::sin(complement_of(s))) -
           exponent_ * std::log(std::sin(alpha_ * theta)) + std::log(std::cos((alpha_ - 1.0) * theta));
  }

  // Points where log g crosses the levels, plus both ends of the range.
  std::vector<double> breakpoints(std::span<const double> levels) const
  {
    std::vector<double> points{-kSpan, kSpan};
    const double at_lo = log_g(-kSpan);
    const double at_hi = log_g(kSpan);
    for (double level : levels) {
      if ((at_lo - level) * (at_hi - level) >= 0.0) continue;
      std::uintmax_t iterations = 200;
      auto f = [&](double s) { return log_g(s) - level; };
      const auto root = boost::math::tools::toms748_solve(
          f, -kSpan, kSpan, at_lo - level, at_hi - level, boost::math::tools::eps_tolerance<double>(40),
          iterations);
      points.push_back(0.5 * (root.first + root.second));
    }
    std::sort(points.begin(), points.end());
    return points;
  }

 private:
  double alpha_;
  double exponent_;
  double log_scale_;
};

constexpr std::array<double, 6> kLevels = {-40.0, -20.0, -3.0, 0.0, 3.0, kSaturated};

double signed_exp(double log_value, int sign) { return sign * std::exp(log_value); }

}  // namespace

double zolotarev_density(double alpha, double x)
{
  const Zolotarev z(alpha, x);
  const auto points = z.breakpoints(kLevels);
  auto integrand = [&](double s) {
    const double lg = z.log_g(s);
    return lg > kSaturated ? 0.0 : std::exp(lg - std::exp(lg)) * dtheta_ds(s);
  };
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (z.log_g(0.5 * (points[i] + points[i + 1])) > kSaturated) continue;
    sum += quad::adaptive(integrand, points[i], points[i + 1], 1e-11, "stable density");
  }
  return alpha / (kPi * std::abs(alpha - 1.0) * x) * sum;
}

double zolotarev_tail(double alpha, double x)
{
  const Zolotarev z(alpha, x);
  const auto points = z.breakpoints(kLevels);
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double lo = points[i], hi = points[i + 1];
    const bool saturated = z.log_g(0.5 * (lo + hi)) > kSaturated;
    if (alpha > 1.0) {
      if (saturated) continue;
      sum += quad::adaptive([&](double s) { return std::exp(-std::exp(z.log_g(s))) * dtheta_ds(s); }, lo, hi,
                            1e-11, "stable tail");
    } else if (saturated) {
      sum += hi > 0.0 ? complement_of(lo) - complement_of(hi) : theta_of(hi) - theta_of(lo);
    } else {
      sum += quad::adaptive([&](double s) { return -std::expm1(-std::exp(z.log_g(s))) * dtheta_ds(s); }, lo,
                            hi, 1e-11, "stable tail");
    }
  }
  return sum / kPi;
}

double taylor_density(double alpha, double x)
{
  double sum = 0.0;
  const double log_x = std::log(x);
  for (int k = 0; k < 400; ++k) {
    if (k > 0 && x == 0.0) break;
    const double log_term = std::lgamma((2.0 * k + 1.0) / alpha) - std::lgamma(2.0 * k + 1.0) +
                            (k > 0 ? 2.0 * k * log_x : 0.0);
    const double term = signed_exp(log_term, k % 2 == 0 ? 1 : -1);
    sum += term;
    if (k > 4 && std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum / (kPi * alpha);
}

double taylor_mass(double alpha, double x)
{
  if (x == 0.0) return 0.0;
  double sum = 0.0;
  const double log_x = std::log(x);
  for (int k = 0; k < 400; ++k) {
    const double log_term =
        std::lgamma((2.0 * k + 1.0) / alpha) - std::lgamma(2.0 * k + 2.0) + (2.0 * k + 1.0) * log_x;
    const double term = signed_exp(log_term, k % 2 == 0 ? 1 : -1);
    sum += term;
    if (k > 4 && std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum / (kPi * alpha);
}

TailSeries::TailSeries(double alpha, double start) : alpha_(alpha), start_(start)
{
  // c_k = (-1)^{k+1} Gamma(alpha k + 1) / k! sin(pi alpha k / 2) / pi,
  // f(x) = sum_k c_k x^{-alpha k - 1}.
  const double y = std::pow(start, -alpha);
  double previous = std::numeric_limits<double>::infinity();
  double total = 0.0;
  for (int k = 1; k < 400; ++k) {
    const double magnitude = std::exp(std::lgamma(alpha * k + 1.0) - std::lgamma(k + 1.0));
    const double c = (k % 2 == 1 ? 1.0 : -1.0) * magnitude * std::sin(kPi * alpha * k / 2.0) / kPi;
    const double size = magnitude * std::pow(y, k);
    if (size > previous) break;
    coef_.push_back(c);
    total += c * std::pow(y, k);
    previous = size;
    if (size < 1e-18 * std::abs(total)) break;
  }
}

double TailSeries::density(double x) const
{
  const double y = std::pow(x, -alpha_);
  double sum = 0.0;
  for (std::size_t k = coef_.size(); k-- > 0;) sum = (sum + coef_[k]) * y;
  return sum / x;
}

double TailSeries::tail(double x) const
{
  const double y = std::pow(x, -alpha_);
  double sum = 0.0;
  for (std::size_t k = coef_.size(); k-- > 0;) sum = (sum + coef_[k] / (alpha_ * (k + 1.0))) * y;
  return sum;
}

double TailSeries::moment_tail(double p) const
{
  double sum = 0.0;
  for (std::size_t i = 0; i < coef_.size(); ++i) {
    const double power = alpha_ * (i + 1.0);
    sum += coef_[i] * std::pow(start_, p - power) / (power - p);
  }
  return sum;
}

namespace {

std::array<double, DensityTable::kNodes> chebyshev_fit(const std::array<double, DensityTable::kNodes>& values)
{
  constexpr int n = DensityTable::kNodes;
  std::array<double, n> coef{};
  for (int m = 0; m < n; ++m) {
    double sum = 0.0;
    for (int j = 0; j < n; ++j) sum += values[j] * std::cos(kPi * m * (j + 0.5) / n);
    coef[m] = (m == 0 ? 1.0 : 2.0) * sum / n;
  }
  return coef;
}

double clenshaw(const std::array<double, DensityTable::kNodes>& coef, double t)
{
  double b1 = 0.0, b2 = 0.0;
  for (int m = DensityTable::kNodes - 1; m >= 1; --m) {
    const double b0 = 2.0 * t * b1 - b2 + coef[m];
    b2 = b1;
    b1 = b0;
  }
  return t * b1 - b2 + coef[0];
}

}  // namespace

DensityTable::DensityTable(double alpha) : alpha_(alpha), f0_(std::tgamma(1.0 / alpha) / (alpha * kPi))
{
  if (alpha < 0.1) throw NumericError("stable density: alpha below 0.1 is not supported numerically");

  double far;
  if (alpha > 1.0) {
    near_zero_ = 0.0;
    first_exponent_ = -1;
    far = 64.0;
  } else {
    // Third term of the expansion at 0 below 1e-14 relative.
    const double log_x0 =
        (std::log(1e-14 * 24.0) + std::lgamma(1.0 / alpha) - std::lgamma(5.0 / alpha)) / 4.0;
    first_exponent_ = static_cast<int>(std::floor(log_x0 / std::numbers::ln2));
    near_zero_ = std::ldexp(1.0, first_exponent_);
    far = std::max(64.0, std::exp2(std::ceil(std::log2(std::pow(0.25, -1.0 / alpha)))));
  }
  series_ = TailSeries(alpha, far);

  auto build = [&](double lo, double hi, auto&& density, auto&& tail) {
    Segment seg{lo, hi, {}, {}};
    std::array<double, kNodes> fv{}, tv{};
    for (int j = 0; j < kNodes; ++j) {
      const double t = std::cos(kPi * (j + 0.5) / kNodes);
      const double x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * t;
      fv[j] = density(x);
      tv[j] = tail(x);
    }
    seg.density = chebyshev_fit(fv);
    seg.tail = chebyshev_fit(tv);
    segments_.push_back(seg);
  };

  if (alpha > 1.0) {
    build(0.0, 0.5, [&](double x) { return taylor_density(alpha, x); },
          [&](double x) { return 0.5 - taylor_mass(alpha, x); });
  }
  for (double lo = std::ldexp(1.0, first_exponent_); lo < far; lo *= 2.0) {
    build(lo, 2.0 * lo, [&](double x) { return zolotarev_density(alpha, x); },
          [&](double x) { return zolotarev_tail(alpha, x); });
  }
}

int DensityTable::segment_index(double x) const
{
  int exponent = 0;
  std::frexp(x, &exponent);  // x in [2^(exponent-1), 2^exponent)
  const int offset = alpha_ > 1.0 ? 1 : 0;
  return exponent - 1 - first_exponent_ + offset;
}

double DensityTable::density(double x) const
{
  if (x >= series_.start()) return series_.density(x);
  if (alpha_ < 1.0 && x < near_zero_) {
    return f0_ - std::tgamma(3.0 / alpha_) * x * x / (2.0 * alpha_ * kPi);
  }
  const Segment& seg = segments_[alpha_ > 1.0 && x < 0.5 ? 0 : segment_index(x)];
  return clenshaw(seg.density, (2.0 * x - seg.lo - seg.hi) / (seg.hi - seg.lo));
}

double DensityTable::tail(double x) const
{
  if (x >= series_.start()) return series_.tail(x);
  if (alpha_ < 1.0 && x < near_zero_) {
    return 0.5 - (f0_ * x - std::tgamma(3.0 / alpha_) * x * x * x / (6.0 * alpha_ * kPi));
  }
  const Segment& seg = segments_[alpha_ > 1.0 && x < 0.5 ? 0 : segment_index(x)];
  return clenshaw(seg.tail, (2.0 * x - seg.lo - seg.hi) / (seg.hi - seg.lo));
}

}  // namespace occtime::detail
