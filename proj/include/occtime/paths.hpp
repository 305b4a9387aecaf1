#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "occtime/rng.hpp"
#include "occtime/stable_law.hpp"

namespace occtime {

/// Horizon T split into n coarse steps, each refined `refine` times for the
/// ground-truth grid.
struct GridSpec {
  double T = 1.0;
  std::int64_t n = 1;
  std::int64_t refine = 1;

  double delta() const { return T / static_cast<double>(n); }
  std::int64_t fine_steps() const { return n * refine; }
  double fine_step() const { return T / static_cast<double>(fine_steps()); }
  /// Throws DomainError unless T > 0, n >= 1, refine >= 1.
  void validate() const;
};

struct SamplePath {
  double alpha = 0.0;
  GridSpec grid;
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  /// X at the fine grid times i T / (n refine), i = 0..n refine; values[0] = 0.
  std::vector<double> values;

  double time(std::size_t i) const { return grid.fine_step() * static_cast<double>(i); }
  /// X_{t_0}, ..., X_{t_n}.
  std::vector<double> coarse() const;
};

/// Walks a path on the fine grid without storing it. `visit` receives
/// consecutive chunks of X values covering indices 0..n*refine exactly once,
/// in order. Draws are consumed identically to simulate_path.
template <class Visitor>
void stream_path(const StableLaw& law, const GridSpec& grid, RngStream& rng, Visitor&& visit);

SamplePath simulate_path(const StableLaw& law, const GridSpec& grid, RngStream& rng);

/// Writes the path as CSV with header "t,X_t" at full precision.
void write_path_csv(const SamplePath& path, std::ostream& out);

/// Fine-grid Riemann sum of the time spent in [y, inf).
double occupation_truth(const SamplePath& path, double y);
/// Fine-grid Riemann sum of the time spent in [a, b]; a and b may be
/// infinite.
double occupation_truth(const SamplePath& path, double a, double b);
/// Box-kernel local time at y with bandwidth fine_step^(1/alpha).
/// Throws DomainError for alpha <= 1.
double local_time_truth(const SamplePath& path, double y);

/// P(X_r >= y | X_0 = a, X_delta = b) for the process started at a.
/// Throws DomainError unless 0 < r < delta.
double bridge_indicator_mean(const StableLaw& law, double a, double b, double delta, double r, double y);

/// Bridge quantities for one step length, with the r-rule and per-node
/// scale factors precomputed. Read-only after construction.
class BridgeKernel {
 public:
  static constexpr int kNodes = 32;

  BridgeKernel(const StableLaw& law, double delta);

  double delta() const { return delta_; }
  const StableLaw& law() const { return law_; }

  /// Expected time in [y, inf) during one step from a to b:
  /// the integral over r in (0, delta) of bridge_indicator_mean.
  double increment(double a, double b, double y) const;

 private:
  struct Node {
    double r, weight;
    double scale_left, scale_right;  // r^(-1/alpha), (delta - r)^(-1/alpha)
  };

  double indicator_mean(const Node& node, double a, double b, double y) const;
  bool far_from(double a, double b, double y) const;

  StableLaw law_;
  double delta_;
  std::vector<Node> nodes_;
  double density_bound_ = 0.0;  // sup x^(1+alpha) f(x)
  double tail_bound_ = 0.0;     // sup x^alpha P(Z >= x)
};

/// One summand of the conditional expectation of the occupation time of
/// [y, inf) given the observations at the ends of a step of length delta.
double conditional_occupation_increment(const StableLaw& law, double a, double b, double delta, double y);

// ---------------------------------------------------------------------------

template <class Visitor>
void stream_path(const StableLaw& law, const GridSpec& grid, RngStream& rng, Visitor&& visit)
{
  constexpr std::int64_t kChunk = 4096;  // even, so paired Gaussian draws never straddle chunks
  const double scale = std::pow(grid.fine_step(), 1.0 / law.alpha());
  const std::int64_t steps = grid.fine_steps();
  std::vector<double> buffer(static_cast<std::size_t>(std::min(kChunk, steps) + 1));
  double x = 0.0;
  buffer[0] = 0.0;
  std::size_t filled = 1;
  for (std::int64_t done = 0; done < steps;) {
    const std::int64_t count = std::min(kChunk, steps - done);
    std::span<double> increments(buffer.data() + filled, static_cast<std::size_t>(count));
    law.sample(rng, increments);
    for (double& v : increments) {
      x += scale * v;
      v = x;
    }
    visit(std::span<const double>(buffer.data(), filled + static_cast<std::size_t>(count)));
    done += count;
    filled = 0;
  }
}

}  // namespace occtime
