#pragma once

#include <functional>
#include <span>
#include <vector>

namespace hlab {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule; cached, thread-safe.
const GaussRule& gauss_legendre(int points);

/// Nodes and weights of the n-point rule mapped onto [a, b].
void gauss_legendre_on(int points, double a, double b, std::vector<double>& nodes,
                       std::vector<double>& weights);

struct AdaptiveOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  int points = 16;
  int max_depth = 40;
};

/// Adaptive bisection Gauss-Legendre quadrature of a scalar integrand on
/// [a, b]; each panel is accepted when the one-panel and two-half-panel
/// estimates agree to tolerance. Throws kQuadratureFailure past max_depth.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          const AdaptiveOptions& options = {});

/// Same as integrate_adaptive, summed over the pieces between consecutive
/// sorted breakpoints (which must include a and b).
double integrate_piecewise(const std::function<double(double)>& f,
                           std::span<const double> breakpoints,
                           const AdaptiveOptions& options = {});

}  // namespace hlab
