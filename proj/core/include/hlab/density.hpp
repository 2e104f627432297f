#pragma once

#include <optional>
#include <span>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace hlab {

/// Declared bounds m ≤ ρ(x) ≤ R⟨x⟩^{1-ε}.
struct DensityBounds {
  double m = 1.0;
  double R = 1.0;
  double epsilon = 1.0;
};

/// ⟨x⟩ = (1 + |x|²)^{1/2}
double japanese_bracket(std::span<const double> x);

/// The radius function ρ used for thickness and coverings.
class DensityFn {
 public:
  struct Constant {
    double value;
  };
  /// ρ(x) = R⟨x⟩^{1-ε}
  struct Power {
    double R;
    double epsilon;
  };
  /// Radial profile ρ(x) = interp(|x|), linear between samples, clamped outside.
  struct Tabulated {
    std::vector<double> radii;
    std::vector<double> values;
  };
  using Kind = std::variant<Constant, Power, Tabulated>;

  static DensityFn constant(double m);
  static DensityFn power(double R, double epsilon);
  /// Throws kInvalidDensity on non-positive values or malformed grids.
  static DensityFn tabulated(std::vector<double> radii, std::vector<double> values,
                             std::optional<DensityBounds> bounds = std::nullopt);

  double operator()(std::span<const double> x) const;
  double operator()(double x) const { return (*this)(std::span<const double>(&x, 1)); }

  const DensityBounds& bounds() const { return bounds_; }
  const Kind& kind() const { return kind_; }

  nlohmann::json describe() const;

 private:
  DensityFn(Kind kind, DensityBounds bounds) : kind_(std::move(kind)), bounds_(bounds) {}

  Kind kind_;
  DensityBounds bounds_;
};

}  // namespace hlab
