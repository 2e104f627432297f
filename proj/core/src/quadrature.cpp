#include "hlab/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "hlab/error.hpp"

namespace hlab {

namespace {

GaussRule build_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const double nd = static_cast<double>(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (nd + 0.5));
    double derivative = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      derivative = nd * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / derivative;
      x -= step;
      if (std::abs(step) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * derivative * derivative);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.nodes[lo] = -x;
    rule.nodes[hi] = x;
    rule.weights[lo] = w;
    rule.weights[hi] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

double panel(const std::function<double(double)>& f, double a, double b, const GaussRule& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * sum;
}

double refine(const std::function<double(double)>& f, double a, double b, double whole,
              double tol, int depth, const AdaptiveOptions& options, const GaussRule& rule) {
  const double mid = 0.5 * (a + b);
  const double left = panel(f, a, mid, rule);
  const double right = panel(f, mid, b, rule);
  const double split = left + right;
  if (std::abs(split - whole) <= tol) return split;
  if (depth >= options.max_depth) {
    fail(ErrorCode::kQuadratureFailure,
         "adaptive quadrature did not converge on [" + std::to_string(a) + ", " +
             std::to_string(b) + "]");
  }
  return refine(f, a, mid, left, 0.5 * tol, depth + 1, options, rule) +
         refine(f, mid, b, right, 0.5 * tol, depth + 1, options, rule);
}

}  // namespace

const GaussRule& gauss_legendre(int points) {
  require(points >= 1 && points <= 4096, ErrorCode::kInvalidArgument,
          "Gauss-Legendre order out of range");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[points];
  if (!slot) slot = std::make_unique<GaussRule>(build_rule(points));
  return *slot;
}

void gauss_legendre_on(int points, double a, double b, std::vector<double>& nodes,
                       std::vector<double>& weights) {
  const GaussRule& rule = gauss_legendre(points);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  nodes.resize(rule.nodes.size());
  weights.resize(rule.nodes.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    nodes[i] = mid + half * rule.nodes[i];
    weights[i] = half * rule.weights[i];
  }
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          const AdaptiveOptions& options) {
  if (b <= a) return 0.0;
  const GaussRule& rule = gauss_legendre(options.points);
  const double whole = panel(f, a, b, rule);
  const double tol = std::max(options.abs_tol, options.rel_tol * std::abs(whole));
  return refine(f, a, b, whole, tol, 0, options, rule);
}

double integrate_piecewise(const std::function<double(double)>& f,
                           std::span<const double> breakpoints, const AdaptiveOptions& options) {
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    sum += integrate_adaptive(f, breakpoints[i], breakpoints[i + 1], options);
  }
  return sum;
}

}  // namespace hlab
