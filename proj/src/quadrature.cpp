#include "quadrature.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "occtime/error.hpp"

namespace occtime::quad {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x)
{
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return {p1, n * (x * p1 - p0) / (x * x - 1.0)};
}

}  // namespace

GaussLegendre::GaussLegendre(int n) : nodes(n), weights(n)
{
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = legendre(n, x).second;
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  if (n % 2 == 1) nodes[n / 2] = 0.0;
}

const GaussLegendre& gauss_legendre(int n)
{
  static std::mutex mutex;
  static std::map<int, GaussLegendre> rules;
  std::lock_guard lock(mutex);
  auto it = rules.find(n);
  if (it == rules.end()) it = rules.emplace(n, GaussLegendre(n)).first;
  return it->second;
}

void check_finite(double value, const char* what)
{
  if (!std::isfinite(value)) throw NumericError(std::string(what) + ": non-finite result");
}

double adaptive(const Integrand& f, double a, double b, double rel_tol, const char* what, double abs_tol)
{
  if (a == b) return 0.0;
  return adaptive_pieces(f, {a, b}, rel_tol, what, abs_tol).front();
}

double adaptive_split(const Integrand& f, std::vector<double> points, double rel_tol, const char* what, double abs_tol)
{
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  if (points.size() < 2) return 0.0;
  double sum = 0.0;
  for (double v : adaptive_pieces(f, points, rel_tol, what, abs_tol)) sum += v;
  return sum;
}

// Globally adaptive: the subinterval with the largest error estimate is
// bisected until the summed estimate falls below the tolerance for the
// whole. A per-interval criterion would stall on intervals whose value is
// at roundoff level relative to the total.
std::vector<double> adaptive_pieces(const Integrand& f, const std::vector<double>& points, double rel_tol,
                                    const char* what, double abs_tol)
{
  using Rule = boost::math::quadrature::gauss_kronrod<double, 15>;
  struct Piece {
    double a, b, value, error;
    std::size_t owner;
    bool operator<(const Piece& other) const { return error < other.error; }
  };
  auto evaluate = [&](double a, double b, std::size_t owner) {
    double error = 0.0;
    const double value = Rule::integrate(f, a, b, 0, 0.0, &error);
    return Piece{a, b, value, error, owner};
  };

  std::priority_queue<Piece> heap;
  double total = 0.0, error = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const Piece p = evaluate(points[i], points[i + 1], i);
    total += p.value;
    error += p.error;
    heap.push(p);
  }
  constexpr int kMaxSplits = 2000;
  for (int split = 0; split < kMaxSplits && !heap.empty(); ++split) {
    if (error <= std::max(rel_tol * std::abs(total), abs_tol)) break;
    const Piece worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted
    heap.pop();
    const Piece left = evaluate(worst.a, mid, worst.owner), right = evaluate(mid, worst.b, worst.owner);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-add from the pieces to shed accumulated cancellation.
  std::vector<double> sums(points.size() > 1 ? points.size() - 1 : 0, 0.0);
  for (; !heap.empty(); heap.pop()) sums[heap.top().owner] += heap.top().value;
  for (double v : sums) check_finite(v, what);
  return sums;
}

double tanh_sinh(const Integrand& f, double a, double b, double rel_tol, const char* what)
{
  if (a == b) return 0.0;
  static thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  double error = 0.0;
  const double value = integrator.integrate(f, a, b, rel_tol, &error);
  check_finite(value, what);
  return value;
}

double half_line(const Integrand& f, double start, double scale, double rel_tol, const char* what, double abs_tol)
{
  double total = 0.0;
  double lo = start;
  double width = scale;
  for (int panel = 0; panel < 200; ++panel) {
    const double floor = std::max(1e-3 * rel_tol * std::abs(total), abs_tol);
    const double piece = adaptive(f, lo, lo + width, 1e-12, what, floor);
    total += piece;
    lo += width;
    width *= 2.0;
    if (panel >= 3 && std::abs(piece) <= std::max(rel_tol * std::abs(total), abs_tol)) return total;
  }
  throw NumericError(std::string(what) + ": tail did not decay");
}

}  // namespace occtime::quad
