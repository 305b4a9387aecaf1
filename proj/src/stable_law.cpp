#include "occtime/stable_law.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <string>

#include "occtime/error.hpp"
#include "quadrature.hpp"
#include "stable_density.hpp"

namespace occtime {

namespace {

constexpr double kPi = std::numbers::pi;

// log b / (b^2 - 1), continuous at b = 1.
double log_over_square_minus_one(double b)
{
  const double e = b - 1.0;
  if (std::abs(e) < 1e-5) return 0.5 - 0.5 * e + e * e / 3.0;
  const double num = std::abs(e) < 0.5 ? std::log1p(e) : std::log(b);
  return num / (e * (2.0 + e));
}

// 2 atanh(e) / e, continuous at e = 0.
double atanh_ratio(double e)
{
  if (std::abs(e) < 1e-4) return 2.0 * (1.0 + e * e / 3.0 + e * e * e * e / 5.0);
  return 2.0 * std::atanh(e) / e;
}

}  // namespace

struct StableLaw::Impl {
  std::optional<detail::DensityTable> table;
  detail::TailSeries cauchy_series;
  std::mutex moment_mutex;
  std::map<double, double> moments;
};

StableLaw::StableLaw(double alpha) : alpha_(alpha), impl_(std::make_shared<Impl>())
{
  require(alpha > 0.0 && alpha <= 2.0, "alpha must lie in (0, 2], got " + std::to_string(alpha));
  if (alpha == 1.0) {
    impl_->cauchy_series = detail::TailSeries(1.0, 64.0);
  } else if (alpha != 2.0) {
    impl_->table.emplace(alpha);
  }
}

const StableLaw& StableLaw::shared(double alpha)
{
  static std::mutex mutex;
  static std::map<double, std::unique_ptr<StableLaw>> laws;
  std::lock_guard lock(mutex);
  auto& slot = laws[alpha];
  if (!slot) {
    try {
      slot = std::make_unique<StableLaw>(alpha);
    } catch (...) {
      laws.erase(alpha);
      throw;
    }
  }
  return *slot;
}

double StableLaw::density(double x, double t) const
{
  require(t > 0.0, "time must be positive");
  if (alpha_ == 2.0) return std::exp(-x * x / (4.0 * t)) / (2.0 * std::sqrt(kPi * t));
  if (alpha_ == 1.0) return t / (kPi * (t * t + x * x));
  const double scale = std::pow(t, -1.0 / alpha_);
  return scale * impl_->table->density(std::abs(x) * scale);
}

double StableLaw::tail_prob(double x, double t) const
{
  require(t > 0.0, "time must be positive");
  if (x == 0.0) return 0.5;
  if (x < 0.0) return 1.0 - tail_prob(-x, t);
  if (alpha_ == 2.0) return 0.5 * std::erfc(x / (2.0 * std::sqrt(t)));
  if (alpha_ == 1.0) return std::atan2(t, x) / kPi;
  return impl_->table->tail(x * std::pow(t, -1.0 / alpha_));
}

double StableLaw::sample(RngStream& rng) const
{
  if (alpha_ == 2.0) return std::numbers::sqrt2 * rng.normal_pair().first;
  const auto [u1, u2] = rng.uniform_pair();
  const double v = kPi * (u1 - 0.5);
  if (alpha_ == 1.0) return std::tan(v);
  const double w = -std::log(u2);
  return std::sin(alpha_ * v) / std::pow(std::cos(v), 1.0 / alpha_) *
         std::pow(std::cos((1.0 - alpha_) * v) / w, (1.0 - alpha_) / alpha_);
}

void StableLaw::sample(RngStream& rng, std::span<double> out) const
{
  if (alpha_ != 2.0) {
    for (double& x : out) x = sample(rng);
    return;
  }
  std::size_t i = 0;
  for (; i + 1 < out.size(); i += 2) {
    const auto [a, b] = rng.normal_pair();
    out[i] = std::numbers::sqrt2 * a;
    out[i + 1] = std::numbers::sqrt2 * b;
  }
  if (i < out.size()) out[i] = sample(rng);
}

double StableLaw::abs_moment(double p) const
{
  require(p > -1.0 && p < alpha_, "moment order must lie in (-1, alpha)");
  {
    std::lock_guard lock(impl_->moment_mutex);
    if (auto it = impl_->moments.find(p); it != impl_->moments.end()) return it->second;
  }
  // [0,1] after x = s^(1/(1+p)), which absorbs x^p; [1, far] in log x; the
  // rest termwise from the tail expansion.
  const double head =
      quad::adaptive([&](double s) { return density(std::pow(s, 1.0 / (1.0 + p))); }, 0.0, 1.0, 1e-13,
                     "absolute moment") /
      (1.0 + p);
  double far = 64.0;
  double tail = 0.0;
  if (alpha_ == 1.0) {
    tail = impl_->cauchy_series.moment_tail(p);
  } else if (alpha_ != 2.0) {
    far = impl_->table->tail_series().start();
    tail = impl_->table->tail_series().moment_tail(p);
  }
  const double log_far = std::log(far);
  std::vector<double> cuts{0.0};
  for (double c = 1.0; c < log_far; c += 1.0) cuts.push_back(c);
  cuts.push_back(log_far);
  const double mid = quad::adaptive_split(
      [&](double u) { return std::exp((p + 1.0) * u) * density(std::exp(u)); }, cuts, 1e-13, "absolute moment");
  const double value = 2.0 * (head + mid + tail);
  std::lock_guard lock(impl_->moment_mutex);
  impl_->moments.emplace(p, value);
  return value;
}

double StableLaw::ratio_density(double x) const
{
  require(x > 0.0, "ratio density needs x > 0");
  if (alpha_ == 2.0) return 2.0 / (kPi * (1.0 + x * x));
  if (alpha_ == 1.0) return 4.0 * g1_closed(0.0, x);
  if (x < 1e-100) {
    // Leading small-x terms: 2 f(0) E|Z| for alpha > 1, else the tail of f
    // against E|Z|^-alpha.
    if (alpha_ > 1.0) return 2.0 * density(0.0) * abs_moment(1.0);
    return 2.0 * h_alpha_inf() * abs_moment(-alpha_) * std::pow(x, alpha_ - 1.0);
  }
  // 4 int y f(y) f(xy) dy in s = log y; both factors bend at s = 0 and at
  // s = -log x, and the integrand decays like exp(-2 alpha s) beyond.
  const double shift = -std::log(x);
  const double upper = std::min(std::max(0.0, shift) + 40.0 / alpha_, 700.0);
  const double lower = std::min(0.0, shift) - 40.0;
  std::vector<double> cuts{lower, std::min(0.0, shift), std::max(0.0, shift), upper};
  for (double c = std::max(0.0, shift) + 5.0; c < upper; c += 5.0) cuts.push_back(c);
  std::sort(cuts.begin(), cuts.end());
  const double value = quad::adaptive_split(
      [&](double s) {
        const double y = std::exp(s);
        return (y * density(y)) * (y * density(x * y));
      },
      cuts, 1e-12, "ratio density");
  return 4.0 * value;
}

double StableLaw::sample_ratio_D(RngStream& rng) const
{
  const double a = std::pow(std::abs(sample(rng)), alpha_);
  const double b = std::pow(std::abs(sample(rng)), alpha_);
  return a / (a + b);
}

double StableLaw::f_D(double x) const
{
  require(x > 0.0 && x < 1.0, "f_D needs x in (0, 1)");
  const double u = std::min(x, 1.0 - x);
  if (alpha_ == 2.0) return 1.0 / (kPi * std::sqrt(u * (1.0 - u)));
  if (alpha_ == 1.0) {
    // log(1/u - 1) / (1 - 2u); the log form keeps precision as u -> 0.
    const double r = 4.0 * u < 1.0 ? std::log(1.0 / u - 1.0) / (1.0 - 2.0 * u) : atanh_ratio(1.0 - 2.0 * u);
    return 4.0 / (kPi * kPi) * r;
  }
  if (u < 1e-12) {
    if (alpha_ < 1.0) return 2.0 / kPi * std::sin(kPi * alpha_ / 2.0) * std::tgamma(alpha_) * abs_moment(-alpha_);
    return 2.0 / (kPi * alpha_ * alpha_) * std::tgamma(1.0 / alpha_) * abs_moment(1.0) *
           std::pow(u, 1.0 / alpha_ - 1.0);
  }
  // Reflected form: the ratio density is evaluated at v <= 1.
  const double v = std::pow(u / (1.0 - u), 1.0 / alpha_);
  return std::pow(u, 1.0 / alpha_ - 1.0) * std::pow(1.0 - u, -1.0 - 1.0 / alpha_) * ratio_density(v) / alpha_;
}

double StableLaw::h_alpha(double x) const
{
  require(x >= 0.0, "h_alpha needs x >= 0");
  return std::pow(x, 1.0 + alpha_) * density(x);
}

double StableLaw::h_alpha_inf() const
{
  require(alpha_ < 2.0, "the tail limit x^(1+alpha) f(x) is degenerate at alpha = 2");
  return alpha_ / kPi * std::sin(kPi * alpha_ / 2.0) * std::tgamma(alpha_);
}

double StableLaw::density_at_zero() const { return std::tgamma(1.0 / alpha_) / (alpha_ * kPi); }

double g1_closed(double a, double b)
{
  require(b > 0.0, "g1 needs b > 0");
  require(a >= 0.0, "g1 needs a >= 0");
  if (a == 0.0) return log_over_square_minus_one(b) / (kPi * kPi);
  const double m = 1.0 + a * a - b * b;
  const double k = m * m + 4.0 * a * a * b * b;
  const double bracket = 0.5 * m * std::log((1.0 + a * a) / (b * b)) + kPi * a * b -
                         a * (1.0 + a * a + b * b) * (kPi / 2.0 - std::atan(a));
  return bracket / (kPi * kPi * k);
}

}  // namespace occtime
