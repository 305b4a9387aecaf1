#include "occtime/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "occtime/error.hpp"

namespace occtime {

void CoarseObservations::validate() const
{
  require(x.size() >= 2, "observations need at least two points");
  require(x[0] == 0.0, "observations must start at X_0 = 0");
  require(T > 0.0, "horizon T must be positive");
}

CoarseObservations CoarseObservations::from_path(const SamplePath& path)
{
  return {path.alpha, path.grid.T, path.coarse()};
}

double riemann_occupation(const CoarseObservations& obs, double a, double b)
{
  require(!(a > b), "interval bounds must satisfy a <= b");
  obs.validate();
  std::int64_t count = 0;
  for (std::size_t k = 0; k + 1 < obs.x.size(); ++k) count += (obs.x[k] >= a && obs.x[k] <= b);
  return obs.delta() * static_cast<double>(count);
}

double riemann_local_time(const CoarseObservations& obs, double y, double h)
{
  require(h > 0.0, "bandwidth h must be positive");
  return riemann_occupation(obs, y - h, y + h) / (2.0 * h);
}

double riemann_local_time(const CoarseObservations& obs, double y)
{
  return riemann_local_time(obs, y, std::pow(obs.delta(), 1.0 / obs.alpha));
}

double optimal_occupation(const CoarseObservations& obs, double y)
{
  obs.validate();
  return optimal_occupation(obs, y, BridgeKernel(StableLaw::shared(obs.alpha), obs.delta()));
}

double optimal_occupation(const CoarseObservations& obs, double y, const BridgeKernel& kernel)
{
  obs.validate();
  double sum = 0.0;
  for (std::size_t k = 0; k + 1 < obs.x.size(); ++k) {
    try {
      sum += kernel.increment(obs.x[k], obs.x[k + 1], y);
    } catch (const NumericError& e) {
      throw NumericError("optimal estimator, step " + std::to_string(k + 1) + ": " + e.what());
    }
  }
  return std::clamp(sum, 0.0, obs.T);
}

}  // namespace occtime
