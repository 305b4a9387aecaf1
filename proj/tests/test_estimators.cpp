#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "occtime/error.hpp"
#include "occtime/estimators.hpp"

using namespace occtime;

namespace {

CoarseObservations obs_of(double alpha, double T, std::vector<double> x) { return {alpha, T, std::move(x)}; }

struct Running {
  double s = 0.0, s2 = 0.0;
  int n = 0;
  void add(double v)
  {
    s += v;
    s2 += v * v;
    ++n;
  }
  double mean() const { return s / n; }
  double se() const { return std::sqrt((s2 / n - mean() * mean()) / (n - 1)); }
};

}  // namespace

TEST(Observations, Validation)
{
  EXPECT_THROW(obs_of(1.5, 1.0, {0.0}).validate(), DomainError);
  EXPECT_THROW(obs_of(1.5, 1.0, {0.1, 0.2}).validate(), DomainError);
  EXPECT_THROW(obs_of(1.5, 0.0, {0.0, 0.2}).validate(), DomainError);
  const auto o = obs_of(1.5, 2.0, {0.0, 0.3, -0.1, 0.4});
  EXPECT_NO_THROW(o.validate());
  EXPECT_EQ(o.n(), 3);
  EXPECT_DOUBLE_EQ(o.delta(), 2.0 / 3.0);
}

TEST(Observations, FromPathSubsamples)
{
  const StableLaw law(1.1);
  RngStream rng(1, 1);
  const auto path = simulate_path(law, {3.0, 6, 4}, rng);
  const auto o = CoarseObservations::from_path(path);
  EXPECT_EQ(o.x, path.coarse());
  EXPECT_EQ(o.T, 3.0);
  EXPECT_EQ(o.alpha, 1.1);
}

TEST(EstimateRecordTest, SquaredError)
{
  const auto r = EstimateRecord::make("riemann_occupation", 0.75, 0.5, 3);
  EXPECT_DOUBLE_EQ(r.sq_error, 0.0625);
  EXPECT_EQ(r.rep_id, 3u);
}

TEST(RiemannOccupation, Examples)
{
  const auto o = obs_of(1.5, 2.0, {0.0, 0.5, -0.2, 1.5, -3.0});
  EXPECT_DOUBLE_EQ(riemann_occupation(o, -INFINITY, INFINITY), 2.0);
  // Left endpoints 0, 0.5, -0.2, 1.5; the last value never counts.
  EXPECT_DOUBLE_EQ(riemann_occupation(o, 0.0, INFINITY), 1.5);
  EXPECT_DOUBLE_EQ(riemann_occupation(o, -0.2, 0.5), 1.5);
  EXPECT_DOUBLE_EQ(riemann_occupation(o, -INFINITY, -1.0), 0.0);
  EXPECT_DOUBLE_EQ(riemann_occupation(obs_of(2.0, 1.0, {0.0, -5.0}), 0.0, INFINITY), 1.0);
  EXPECT_THROW(riemann_occupation(o, 1.0, 0.0), DomainError);
}

TEST(RiemannOccupation, MonotoneInInterval)
{
  const StableLaw law(0.9);
  RngStream rng(6, 0);
  const auto o = CoarseObservations::from_path(simulate_path(law, {1.0, 200, 1}, rng));
  for (double a = -2.0; a <= 0.0; a += 0.1)
    for (double b = 0.0; b <= 2.0; b += 0.1) {
      const double inner = riemann_occupation(o, a, b);
      EXPECT_LE(inner, riemann_occupation(o, a - 0.3, b));
      EXPECT_LE(inner, riemann_occupation(o, a, b + 0.3));
      EXPECT_GE(inner, 0.0);
      EXPECT_LE(inner, 1.0);
    }
}

TEST(RiemannOccupation, GaussianMean)
{
  const StableLaw law(2.0);
  Running r;
  for (int i = 0; i < 20000; ++i) {
    RngStream rng(44, i);
    r.add(riemann_occupation(CoarseObservations::from_path(simulate_path(law, {1.0, 16, 1}, rng)), 0.0, INFINITY));
  }
  // X_0 = 0 always counts, so the mean is T/2 + Delta/2.
  EXPECT_NEAR(r.mean(), 0.5 + 0.5 / 16, 4.0 * r.se());
}

TEST(RiemannLocalTime, MatchesOccupationIdentity)
{
  const auto o = obs_of(1.5, 1.0, {0.0, 0.02, -0.05, 0.3});
  EXPECT_DOUBLE_EQ(riemann_local_time(o, 0.0, 0.1), riemann_occupation(o, -0.1, 0.1) / 0.2);
  EXPECT_DOUBLE_EQ(riemann_local_time(o, 0.0, 10.0), 1.0 / 20.0);  // all inside: T / (2h)
  EXPECT_DOUBLE_EQ(riemann_local_time(o, 5.0, 0.1), 0.0);
  const double h = std::pow(1.0 / 3.0, 1.0 / 1.5);
  EXPECT_DOUBLE_EQ(riemann_local_time(o, 0.0), riemann_local_time(o, 0.0, h));
  EXPECT_THROW(riemann_local_time(o, 0.0, 0.0), DomainError);
}

TEST(RiemannLocalTime, GaussianMeanApproachesLimit)
{
  const StableLaw law(2.0);
  Running r;
  for (int i = 0; i < 20000; ++i) {
    RngStream rng(45, i);
    r.add(riemann_local_time(CoarseObservations::from_path(simulate_path(law, {1.0, 256, 1}, rng)), 0.0));
  }
  // Exact mean Delta/(2h) sum_k P(|X_{k Delta}| <= h), which tends to 1/sqrt(pi).
  const double delta = 1.0 / 256, h = std::sqrt(delta);
  double exact = 1.0;
  for (int k = 1; k < 256; ++k) exact += 1.0 - 2.0 * law.tail_prob(h, k * delta);
  exact *= delta / (2.0 * h);
  EXPECT_NEAR(r.mean(), exact, 4.0 * r.se());
  EXPECT_NEAR(exact, 1.0 / std::sqrt(std::numbers::pi), 0.02);
}

TEST(OptimalOccupation, Examples)
{
  EXPECT_NEAR(optimal_occupation(obs_of(2.0, 1.0, {0.0, 0.0}), 0.0), 0.5, 1e-10);
  const auto high = obs_of(1.5, 1.0, {0.0, 50.0, 60.0, 55.0, 70.0});
  EXPECT_NEAR(optimal_occupation(high, -50.0), 1.0, 1e-6);
  EXPECT_NEAR(optimal_occupation(high, 1e3), 0.0, 1e-6);
  const BridgeKernel kernel(StableLaw(1.5), 0.25);
  EXPECT_DOUBLE_EQ(optimal_occupation(high, 0.3, kernel), optimal_occupation(high, 0.3));
}

TEST(OptimalOccupation, RangeAndSymmetry)
{
  const StableLaw law(1.2);
  RngStream rng(9, 9);
  auto o = CoarseObservations::from_path(simulate_path(law, {1.0, 12, 1}, rng));
  const double v = optimal_occupation(o, 0.1);
  EXPECT_GE(v, 0.0);
  EXPECT_LE(v, 1.0);
  for (double& x : o.x) x = -x;
  EXPECT_NEAR(v + optimal_occupation(o, -0.1), 1.0, 1e-9);
}

TEST(OptimalOccupation, BeatsRiemann)
{
  // Conditional expectation contraction on paired replications.
  const StableLaw law(1.5);
  const GridSpec grid{1.0, 8, 64};
  const BridgeKernel kernel(law, grid.delta());
  Running diff;
  for (int i = 0; i < 400; ++i) {
    RngStream rng(10, i);
    const auto path = simulate_path(law, grid, rng);
    const auto o = CoarseObservations::from_path(path);
    const double truth = occupation_truth(path, 0.0);
    const double er = riemann_occupation(o, 0.0, INFINITY) - truth;
    const double eo = optimal_occupation(o, 0.0, kernel) - truth;
    diff.add(er * er - eo * eo);
  }
  EXPECT_GT(diff.mean(), -3.0 * diff.se());
}
