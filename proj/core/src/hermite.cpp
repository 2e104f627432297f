#include "hlab/hermite.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hlab/error.hpp"

namespace hlab {

namespace {

constexpr double kRescaleThreshold = 1e150;
const double kRescaleLog = std::log(1e150);

// Recurrence state: value = mantissa * exp(log_scale).
struct ScaledPair {
  double previous = 0.0;
  double current = 1.0;
  double log_scale = 0.0;
};

double unscale(double mantissa, double log_scale) {
  if (mantissa == 0.0) return 0.0;
  return std::copysign(std::exp(std::log(std::abs(mantissa)) + log_scale), mantissa);
}

void check_order(int k) {
  require(k >= 0 && k <= kMaxHermiteOrder, ErrorCode::kInvalidArgument,
          "Hermite order out of range: " + std::to_string(k));
}

template <typename Sink>
void run_recurrence(int max_order, double x, Sink&& sink) {
  ScaledPair state;
  state.log_scale = -0.5 * x * x - 0.25 * std::log(std::numbers::pi);
  sink(0, unscale(state.current, state.log_scale));
  for (int j = 0; j < max_order; ++j) {
    const double jd = static_cast<double>(j);
    const double next = std::sqrt(2.0 / (jd + 1.0)) * x * state.current -
                        std::sqrt(jd / (jd + 1.0)) * state.previous;
    state.previous = state.current;
    state.current = next;
    if (std::abs(state.current) > kRescaleThreshold) {
      state.current /= kRescaleThreshold;
      state.previous /= kRescaleThreshold;
      state.log_scale += kRescaleLog;
    }
    sink(j + 1, unscale(state.current, state.log_scale));
  }
}

}  // namespace

double hermite_function(int k, double x) {
  check_order(k);
  require(std::isfinite(x), ErrorCode::kInvalidArgument, "Hermite argument must be finite");
  double result = 0.0;
  run_recurrence(k, x, [&](int order, double value) {
    if (order == k) result = value;
  });
  return result;
}

void hermite_functions(int max_order, double x, std::span<double> out) {
  check_order(max_order);
  require(out.size() >= static_cast<std::size_t>(max_order) + 1, ErrorCode::kInvalidArgument,
          "output span too small for Hermite values");
  run_recurrence(max_order, x, [&](int order, double value) {
    out[static_cast<std::size_t>(order)] = value;
  });
}

std::vector<double> hermite_functions(int max_order, double x) {
  std::vector<double> out(static_cast<std::size_t>(max_order) + 1);
  hermite_functions(max_order, x, out);
  return out;
}

double hermite_product(const MultiIndex& alpha, std::span<const double> x) {
  require(static_cast<int>(x.size()) == alpha.dim(), ErrorCode::kDimensionMismatch,
          "point dimension " + std::to_string(x.size()) + " does not match multi-index dimension " +
              std::to_string(alpha.dim()));
  double product = 1.0;
  for (int j = 0; j < alpha.dim(); ++j) {
    product *= hermite_function(alpha[j], x[static_cast<std::size_t>(j)]);
  }
  return product;
}

}  // namespace hlab
