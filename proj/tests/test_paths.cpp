#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "occtime/error.hpp"
#include "occtime/paths.hpp"

using namespace occtime;

namespace {

constexpr double kPi = std::numbers::pi;

SamplePath flat_path(double T, std::int64_t n, std::int64_t refine)
{
  SamplePath p;
  p.alpha = 1.5;
  p.grid = {T, n, refine};
  p.values.assign(static_cast<std::size_t>(n * refine + 1), 0.0);
  return p;
}

struct Moments {
  double mean = 0.0, se = 0.0;
};

template <class F>
Moments mc(int reps, F&& draw)
{
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < reps; ++i) {
    const double v = draw(i);
    s += v;
    s2 += v * v;
  }
  const double m = s / reps;
  return {m, std::sqrt((s2 / reps - m * m) / (reps - 1))};
}

}  // namespace

TEST(GridSpec, Validation)
{
  EXPECT_NO_THROW((GridSpec{1.0, 4, 2}.validate()));
  EXPECT_THROW((GridSpec{0.0, 4, 2}.validate()), DomainError);
  EXPECT_THROW((GridSpec{1.0, 0, 2}.validate()), DomainError);
  EXPECT_THROW((GridSpec{1.0, 4, 0}.validate()), DomainError);
  const GridSpec g{2.0, 8, 4};
  EXPECT_DOUBLE_EQ(g.delta(), 0.25);
  EXPECT_EQ(g.fine_steps(), 32);
  EXPECT_DOUBLE_EQ(g.fine_step(), 1.0 / 16);
}

TEST(Paths, ShapeAndStart)
{
  const StableLaw law(0.7);
  RngStream rng(1, 2);
  const auto p = simulate_path(law, {1.0, 5, 1}, rng);
  ASSERT_EQ(p.values.size(), 6u);
  EXPECT_EQ(p.values[0], 0.0);
  const auto q = simulate_path(law, {1.0, 5, 3}, rng);
  ASSERT_EQ(q.values.size(), 16u);
  const auto c = q.coarse();
  ASSERT_EQ(c.size(), 6u);
  for (std::size_t k = 0; k < c.size(); ++k) EXPECT_EQ(c[k], q.values[3 * k]);
}

TEST(Paths, StreamingMatchesStoredPath)
{
  const StableLaw law(1.2);
  const GridSpec grid{1.0, 37, 300};  // spans several chunks
  RngStream a(4, 9), b(4, 9);
  const auto p = simulate_path(law, grid, a);
  std::vector<double> streamed;
  stream_path(law, grid, b, [&](std::span<const double> chunk) { streamed.insert(streamed.end(), chunk.begin(), chunk.end()); });
  EXPECT_EQ(streamed, p.values);
}

TEST(Paths, GaussianIncrementVariance)
{
  const StableLaw law(2.0);
  const GridSpec grid{1.0, 4, 1};
  std::vector<double> inc;
  for (int r = 0; r < 20000; ++r) {
    RngStream rng(8, r);
    const auto p = simulate_path(law, grid, rng);
    for (int k = 1; k <= 4; ++k) inc.push_back(p.values[k] - p.values[k - 1]);
  }
  const auto m = mc(static_cast<int>(inc.size()), [&](int i) { return inc[i] * inc[i]; });
  EXPECT_NEAR(m.mean, 2.0 * 0.25, 4.0 * m.se);
}

TEST(Paths, SelfSimilarEndpoint)
{
  // median |X_T| / T^(1/alpha) against the median of |Z| from the tail function.
  const StableLaw law(1.5);
  std::vector<double> ends;
  for (int r = 0; r < 10000; ++r) {
    RngStream rng(12, r);
    ends.push_back(std::abs(simulate_path(law, {2.0, 4, 2}, rng).values.back()) / std::pow(2.0, 1 / 1.5));
  }
  std::nth_element(ends.begin(), ends.begin() + 5000, ends.end());
  const double med = ends[5000];
  // Fraction of |Z| below the sample median must be 1/2 within 4 binomial sigma.
  const double p = 1.0 - 2.0 * law.tail_prob(med);
  EXPECT_NEAR(p, 0.5, 4.0 * 0.5 / std::sqrt(10000.0));
}

TEST(Paths, CsvDump)
{
  auto p = flat_path(1.0, 2, 1);
  p.values = {0.0, 0.1, -0.3};
  std::ostringstream out;
  write_path_csv(p, out);
  EXPECT_EQ(out.str(), "t,X_t\n0,0\n0.5,0.10000000000000001\n1,-0.29999999999999999\n");
}

TEST(OccupationTruth, DegeneratePaths)
{
  const auto p = flat_path(2.0, 4, 8);
  EXPECT_DOUBLE_EQ(occupation_truth(p, -1.0), 2.0);
  EXPECT_DOUBLE_EQ(occupation_truth(p, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(occupation_truth(p, -INFINITY, INFINITY), 2.0);
}

TEST(OccupationTruth, MonotoneInLevel)
{
  const StableLaw law(1.3);
  RngStream rng(5, 5);
  const auto p = simulate_path(law, {1.0, 16, 64}, rng);
  double prev = occupation_truth(p, -10.0);
  for (double y = -10.0; y <= 10.0; y += 0.05) {
    const double v = occupation_truth(p, y);
    EXPECT_LE(v, prev);
    EXPECT_GE(v, 0.0);
    prev = v;
  }
}

TEST(OccupationTruth, GaussianHalfMean)
{
  const StableLaw law(2.0);
  const auto m = mc(4000, [&](int r) {
    RngStream rng(21, r);
    return occupation_truth(simulate_path(law, {1.0, 8, 32}, rng), 0.0);
  });
  EXPECT_NEAR(m.mean, 0.5, 4.0 * m.se);
}

TEST(LocalTimeTruth, RequiresAlphaAboveOne)
{
  auto p = flat_path(1.0, 2, 2);
  p.alpha = 1.0;
  EXPECT_THROW(local_time_truth(p, 0.0), DomainError);
}

TEST(LocalTimeTruth, MeanAtZero)
{
  for (double alpha : {1.5, 2.0}) {
    const StableLaw law(alpha);
    const auto m = mc(3000, [&](int r) {
      RngStream rng(31, r);
      return local_time_truth(simulate_path(law, {1.0, 16, 256}, rng), 0.0);
    });
    const double want = std::tgamma(1.0 / alpha) / (kPi * (alpha - 1.0));
    // The box kernel at the finest scale carries a small positive bias.
    EXPECT_NEAR(m.mean, want, 4.0 * m.se + 0.02 * want) << alpha;
  }
}

TEST(LocalTimeTruth, OccupationTimeFormula)
{
  const StableLaw law(1.6);
  RngStream rng(2, 77);
  const auto p = simulate_path(law, {1.0, 8, 512}, rng);
  const double h = std::pow(p.grid.fine_step(), 1.0 / 1.6);
  const double lo = *std::min_element(p.values.begin(), p.values.end()) - 2 * h;
  const double hi = *std::max_element(p.values.begin(), p.values.end()) + 2 * h;
  double total = 0.0;
  const double dy = h / 8;
  for (double y = lo; y <= hi; y += dy) total += local_time_truth(p, y) * dy;
  EXPECT_NEAR(total, 1.0, 0.02);
}

TEST(Bridge, DomainChecks)
{
  const StableLaw law(1.5);
  EXPECT_THROW(bridge_indicator_mean(law, 0, 0, 1.0, 0.0, 0), DomainError);
  EXPECT_THROW(bridge_indicator_mean(law, 0, 0, 1.0, 1.0, 0), DomainError);
  EXPECT_THROW(bridge_indicator_mean(law, 0, 0, -1.0, 0.5, 0), DomainError);
  EXPECT_THROW(conditional_occupation_increment(law, 0, 0, 0.0, 0), DomainError);
}

TEST(Bridge, SpecExamples)
{
  EXPECT_NEAR(bridge_indicator_mean(StableLaw(2.0), 0, 0, 1.0, 0.5, 0), 0.5, 1e-10);
  EXPECT_NEAR(bridge_indicator_mean(StableLaw(1.5), 1.0, 0.0, 1.0, 1e-9, 0.0), 1.0, 1e-6);

  // Brute-force oracle for alpha = 1.5, a = -1, b = 2, delta = 1, r = 0.3, y = 0.
  const StableLaw law(1.5);
  auto joint = [&](double z) { return law.density(z + 1.0, 0.3) * law.density(2.0 - z, 0.7); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double num = 0.0, den = 0.0;
  for (double lo = -400.0; lo < 400.0; lo += 0.5) {
    const double part = GK::integrate(joint, lo, lo + 0.5, 0, 1e-13);
    den += part;
    if (lo >= 0.0) num += part;
  }
  const double brute = num / den;
  const double v = bridge_indicator_mean(law, -1.0, 2.0, 1.0, 0.3, 0.0);
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, 1.0);
  EXPECT_NEAR(v, brute, 2e-4);  // truncation of the +-400 window
  EXPECT_NEAR(v, 0.377106734423, 1e-9);
}

TEST(Bridge, MonotoneAndReflection)
{
  const StableLaw law(1.2);
  double prev = 1.0;
  for (double y = -3.0; y <= 3.0; y += 0.25) {
    const double v = bridge_indicator_mean(law, 0.3, -0.4, 0.5, 0.2, y);
    EXPECT_LE(v, prev + 1e-12);
    EXPECT_NEAR(v + bridge_indicator_mean(law, -0.3, 0.4, 0.5, 0.2, -y), 1.0, 1e-9) << y;
    prev = v;
  }
}

TEST(Bridge, IncrementProperties)
{
  for (double alpha : {0.6, 1.0, 1.5, 2.0}) {
    const StableLaw law(alpha);
    const double delta = 0.05;
    const double far = 60.0 * std::pow(delta, 1.0 / alpha);
    // Heavy tails leave a genuine excursion probability of order 1e-4 at this
    // distance, so only the Gaussian-like end gets the tight bound.
    const double tol = (alpha >= 1.5 ? 1e-6 : 1e-4) * delta;
    const double high = conditional_occupation_increment(law, far, far * 1.1, delta, 0.0);
    EXPECT_NEAR(high, delta, tol) << alpha;
    EXPECT_NEAR(conditional_occupation_increment(law, -far, -far, delta, 0.0), 0.0, tol) << alpha;
    const double oracle = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double r) { return bridge_indicator_mean(law, far, far * 1.1, delta, r, 0.0); }, 0.0, delta, 12, 1e-12);
    EXPECT_NEAR(high, oracle, 1e-9 * delta) << alpha;
    for (double a : {-0.1, 0.0, 0.3})
      for (double b : {-0.2, 0.05, 0.2}) {
        const double v = conditional_occupation_increment(law, a, b, delta, 0.01);
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, delta);
        EXPECT_NEAR(v + conditional_occupation_increment(law, -a, -b, delta, -0.01), delta, 1e-9 * delta + 1e-12)
            << alpha << " " << a << " " << b;
      }
  }
  EXPECT_NEAR(conditional_occupation_increment(StableLaw(2.0), 0.2, 0.2, 0.1, 0.2), 0.05, 1e-10);
}

TEST(Bridge, IncrementMatchesRIntegral)
{
  // alpha = 1.5, a = -0.1, b = 0.2, delta = 0.05, y = 0 against adaptive r-quadrature.
  const StableLaw law(1.5);
  const double v = conditional_occupation_increment(law, -0.1, 0.2, 0.05, 0.0);
  const double oracle = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      [&](double r) { return bridge_indicator_mean(law, -0.1, 0.2, 0.05, r, 0.0); }, 0.0, 0.05, 12, 1e-11);
  EXPECT_GT(v, 0.0);
  EXPECT_LT(v, 0.05);
  EXPECT_NEAR(v, oracle, 1e-8);
}

TEST(Bridge, KernelMatchesFreeFunction)
{
  const StableLaw law(0.8);
  const BridgeKernel kernel(law, 0.125);
  for (double a : {-0.5, 0.0, 0.7})
    EXPECT_DOUBLE_EQ(kernel.increment(a, 0.1, 0.0), conditional_occupation_increment(law, a, 0.1, 0.125, 0.0));
}
