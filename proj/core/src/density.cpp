#include "hlab/density.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "hlab/error.hpp"

namespace hlab {

double japanese_bracket(std::span<const double> x) {
  double s = 1.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

DensityFn DensityFn::constant(double m) {
  require(m > 0.0 && std::isfinite(m), ErrorCode::kInvalidDensity,
          "constant density must be positive");
  return DensityFn(Constant{m}, DensityBounds{m, m, 1.0});
}

DensityFn DensityFn::power(double R, double epsilon) {
  require(R > 0.0 && std::isfinite(R), ErrorCode::kInvalidDensity, "power density needs R > 0");
  require(epsilon > 0.0 && epsilon <= 1.0, ErrorCode::kInvalidDensity,
          "power density needs epsilon in (0, 1]");
  return DensityFn(Power{R, epsilon}, DensityBounds{R, R, epsilon});
}

DensityFn DensityFn::tabulated(std::vector<double> radii, std::vector<double> values,
                               std::optional<DensityBounds> bounds) {
  require(!radii.empty() && radii.size() == values.size(), ErrorCode::kInvalidDensity,
          "tabulated density needs matching non-empty radius and value grids");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    require(values[i] > 0.0 && std::isfinite(values[i]), ErrorCode::kInvalidDensity,
            "tabulated density value " + std::to_string(values[i]) + " at radius " +
                std::to_string(radii[i]) + " is not positive");
    require(radii[i] >= 0.0, ErrorCode::kInvalidDensity, "tabulated radii must be >= 0");
    if (i) {
      require(radii[i] > radii[i - 1], ErrorCode::kInvalidDensity,
              "tabulated radii must be strictly increasing");
    }
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  DensityBounds b = bounds.value_or(DensityBounds{*lo, *hi, 1.0});
  return DensityFn(Tabulated{std::move(radii), std::move(values)}, b);
}

double DensityFn::operator()(std::span<const double> x) const {
  if (const auto* c = std::get_if<Constant>(&kind_)) return c->value;
  if (const auto* p = std::get_if<Power>(&kind_)) {
    return p->R * std::pow(japanese_bracket(x), 1.0 - p->epsilon);
  }
  const auto& t = std::get<Tabulated>(kind_);
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  const double r = std::sqrt(r2);
  if (r <= t.radii.front()) return t.values.front();
  if (r >= t.radii.back()) return t.values.back();
  const auto upper = std::upper_bound(t.radii.begin(), t.radii.end(), r);
  const auto i = static_cast<std::size_t>(upper - t.radii.begin());
  const double w = (r - t.radii[i - 1]) / (t.radii[i] - t.radii[i - 1]);
  return (1.0 - w) * t.values[i - 1] + w * t.values[i];
}

nlohmann::json DensityFn::describe() const {
  nlohmann::json j;
  if (const auto* c = std::get_if<Constant>(&kind_)) {
    j = {{"type", "constant"}, {"m", c->value}};
  } else if (const auto* p = std::get_if<Power>(&kind_)) {
    j = {{"type", "power"}, {"R", p->R}, {"epsilon", p->epsilon}};
  } else {
    const auto& t = std::get<Tabulated>(kind_);
    j = {{"type", "tabulated"}, {"radii", t.radii}, {"values", t.values}};
  }
  j["bounds"] = {{"m", bounds_.m}, {"R", bounds_.R}, {"epsilon", bounds_.epsilon}};
  return j;
}

}  // namespace hlab
