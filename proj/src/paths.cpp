#include "occtime/paths.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "occtime/error.hpp"
#include "quadrature.hpp"

namespace occtime {

void GridSpec::validate() const
{
  require(T > 0.0, "horizon T must be positive");
  require(n >= 1, "number of steps n must be at least 1");
  require(refine >= 1, "refine factor must be at least 1");
}

std::vector<double> SamplePath::coarse() const
{
  std::vector<double> out(static_cast<std::size_t>(grid.n + 1));
  for (std::int64_t k = 0; k <= grid.n; ++k) out[k] = values[static_cast<std::size_t>(k * grid.refine)];
  return out;
}

SamplePath simulate_path(const StableLaw& law, const GridSpec& grid, RngStream& rng)
{
  grid.validate();
  SamplePath path;
  path.alpha = law.alpha();
  path.grid = grid;
  path.seed = rng.seed();
  path.stream_id = rng.stream_id();
  path.values.reserve(static_cast<std::size_t>(grid.fine_steps() + 1));
  stream_path(law, grid, rng, [&](std::span<const double> chunk) {
    path.values.insert(path.values.end(), chunk.begin(), chunk.end());
  });
  return path;
}

void write_path_csv(const SamplePath& path, std::ostream& out)
{
  out << "t,X_t\n";
  char line[64];
  for (std::size_t i = 0; i < path.values.size(); ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g\n", path.time(i), path.values[i]);
    out << line;
  }
}

double occupation_truth(const SamplePath& path, double y)
{
  return occupation_truth(path, y, std::numeric_limits<double>::infinity());
}

double occupation_truth(const SamplePath& path, double a, double b)
{
  std::int64_t count = 0;
  for (std::size_t i = 0; i + 1 < path.values.size(); ++i) count += (path.values[i] >= a && path.values[i] <= b);
  return path.grid.fine_step() * static_cast<double>(count);
}

double local_time_truth(const SamplePath& path, double y)
{
  require(path.alpha > 1.0, "local time exists only for alpha > 1");
  const double h = std::pow(path.grid.fine_step(), 1.0 / path.alpha);
  return occupation_truth(path, y - h, y + h) / (2.0 * h);
}

namespace {

double gaussian_bridge_mean(double a, double b, double delta, double r, double y)
{
  const double mean = a + (r / delta) * (b - a);
  const double sd = std::sqrt(2.0 * r * (delta - r) / delta);
  return 0.5 * std::erfc((y - mean) / (sd * std::numbers::sqrt2));
}

// Integral over z in R of f_r(z - a) f_{delta-r}(b - z), split at y. The
// scale factors are r^(-1/alpha) and (delta - r)^(-1/alpha).
double bridge_split(const StableLaw& law, double a, double b, double y, double scale_left, double scale_right)
{
  auto integrand = [&](double z) {
    return scale_left * law.density((z - a) * scale_left) * scale_right * law.density((b - z) * scale_right);
  };
  const double w_left = 8.0 / scale_left;
  const double w_right = 8.0 / scale_right;
  std::vector<double> points{a - w_left, a, a + w_left, b - w_right, b, b + w_right, y};
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  const std::vector<double> pieces = quad::adaptive_pieces(integrand, points, 1e-10, "bridge quadrature");
  double lower = 0.0, upper = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) (points[i] < y ? lower : upper) += pieces[i];
  const double scale = std::max({w_left, w_right, std::abs(b - a)});
  const double lo = points.front(), hi = points.back();
  const double floor = 1e-12 * (lower + upper);
  lower += quad::half_line([&](double u) { return integrand(lo - u); }, 0.0, scale, 1e-12, "bridge quadrature", floor);
  upper += quad::half_line([&](double u) { return integrand(hi + u); }, 0.0, scale, 1e-12, "bridge quadrature", floor);
  const double total = lower + upper;
  if (!(total > 0.0)) throw NumericError("bridge quadrature: vanishing normalizer");
  return upper / total;
}

}  // namespace

double bridge_indicator_mean(const StableLaw& law, double a, double b, double delta, double r, double y)
{
  require(delta > 0.0, "bridge step delta must be positive");
  require(r > 0.0 && r < delta, "bridge time r must lie in (0, delta)");
  if (law.alpha() == 2.0) return gaussian_bridge_mean(a, b, delta, r, y);
  const double inv = -1.0 / law.alpha();
  return bridge_split(law, a, b, y, std::pow(r, inv), std::pow(delta - r, inv));
}

BridgeKernel::BridgeKernel(const StableLaw& law, double delta) : law_(law), delta_(delta)
{
  require(delta > 0.0, "bridge step delta must be positive");
  const auto& rule = quad::gauss_legendre(kNodes);
  const double inv = -1.0 / law.alpha();
  for (int i = 0; i < kNodes; ++i) {
    // r = delta sin^2(pi theta / 2) clusters nodes at both ends of the step.
    const double theta = 0.5 * (1.0 + rule.nodes[i]);
    const double s = std::sin(0.5 * std::numbers::pi * theta);
    const double c = std::cos(0.5 * std::numbers::pi * theta);
    const double r = delta * s * s;
    const double rest = delta * c * c;
    const double jacobian = delta * 0.5 * std::numbers::pi * std::sin(std::numbers::pi * theta);
    nodes_.push_back({r, 0.5 * rule.weights[i] * jacobian, std::pow(r, inv), std::pow(rest, inv)});
  }
  if (law.alpha() < 2.0) {
    // Supremum bounds on a log grid with a 1% margin; both functions tend
    // to their limits monotonically far out.
    const double alpha = law.alpha();
    const double limit = law.h_alpha_inf();
    double h = limit, k = limit / alpha;
    for (double x = 1e-3; x < 1e8; x *= 1.05) {
      h = std::max(h, law.h_alpha(x));
      k = std::max(k, std::pow(x, alpha) * law.tail_prob(x));
    }
    density_bound_ = 1.01 * h;
    tail_bound_ = 1.01 * k;
  }
}

double BridgeKernel::indicator_mean(const Node& node, double a, double b, double y) const
{
  if (law_.alpha() == 2.0) return gaussian_bridge_mean(a, b, delta_, node.r, y);
  return bridge_split(law_, a, b, y, node.scale_left, node.scale_right);
}

bool BridgeKernel::far_from(double a, double b, double y) const
{
  if (law_.alpha() == 2.0) return false;
  const double da = std::abs(a - y), db = std::abs(b - y);
  if ((a - y) * (b - y) <= 0.0) return false;
  const double alpha = law_.alpha();
  // Mass of the bridge on the far side of y, integrated over the step.
  const double cross = std::min(std::pow(da, -1.0 - alpha) * std::pow(db, -alpha),
                                std::pow(db, -1.0 - alpha) * std::pow(da, -alpha));
  const double bound = density_bound_ * tail_bound_ * delta_ * delta_ * delta_ / 6.0 * cross /
                       law_.density(b - a, delta_);
  return bound < 1e-8 * delta_;
}

double BridgeKernel::increment(double a, double b, double y) const
{
  if (far_from(a, b, y)) return a > y ? delta_ : 0.0;
  double sum = 0.0;
  for (const Node& node : nodes_) sum += node.weight * indicator_mean(node, a, b, y);
  return sum;
}

double conditional_occupation_increment(const StableLaw& law, double a, double b, double delta, double y)
{
  return BridgeKernel(law, delta).increment(a, b, y);
}

}  // namespace occtime
