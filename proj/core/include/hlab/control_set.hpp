#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace hlab {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi > lo ? hi - lo : 0.0; }
};

/// Axis-aligned box, one interval per axis; bounds may be infinite.
struct Box {
  std::vector<Interval> sides;
  int dim() const { return static_cast<int>(sides.size()); }
  bool contains(std::span<const double> x) const;
};

struct Ball {
  std::vector<double> center;
  double radius = 0.0;
  int dim() const { return static_cast<int>(center.size()); }
};

/// Sorted, merged, non-degenerate intervals.
std::vector<Interval> merge_intervals(std::vector<Interval> intervals);

/// A measurable control region ω ⊂ ℝⁿ (n ≤ 3) drawn from a few closed-form
/// families. Every family supports exact membership, axis-0 slicing (the slice
/// of a family is again in the family, one dimension lower) and, in 1-D, exact
/// interval decomposition on a bounded window.
class ControlSet {
 public:
  struct Full {};
  struct BoxUnion {
    std::vector<Box> boxes;
  };
  /// Tensor-product periodic pattern: along every axis the kept part of each
  /// cell [offset + kL, offset + (k+1)L) is [offset + kL, offset + kL + fraction·L).
  struct Periodic {
    double period = 1.0;
    double fraction = 0.5;
    double offset = 0.0;
  };
  struct BallUnion {
    std::vector<Ball> balls;
  };
  using Shape = std::variant<Full, BoxUnion, Periodic, BallUnion>;

  static ControlSet full(int dim);
  static ControlSet boxes(int dim, std::vector<Box> boxes);
  static ControlSet intervals(std::vector<Interval> intervals);
  static ControlSet periodic(int dim, double period, double fraction, double offset = 0.0);
  static ControlSet balls(int dim, std::vector<Ball> balls);
  static ControlSet empty(int dim) { return boxes(dim, {}); }

  int dim() const { return dim_; }
  const Shape& shape() const { return shape_; }

  bool contains(std::span<const double> x) const;

  /// {y ∈ ℝ^{n-1} : (x0, y) ∈ ω}; requires dim ≥ 2.
  ControlSet slice(double x0) const;

  /// 1-D only: ω ∩ [lo, hi] as sorted disjoint intervals (lo, hi finite).
  std::vector<Interval> intervals_within(double lo, double hi) const;

  /// Sorted axis-0 coordinates in (lo, hi) where the slice changes shape,
  /// with lo and hi prepended/appended.
  std::vector<double> breakpoints(double lo, double hi) const;

  /// True when the axis-0 slice is constant between consecutive breakpoints.
  bool piecewise_constant_slices() const;

  nlohmann::json describe() const;

 private:
  ControlSet(int dim, Shape shape) : dim_(dim), shape_(std::move(shape)) {}

  int dim_;
  Shape shape_;
};

/// Kept unit cells with a random sub-interval of relative length `fraction`
/// inside each [k, k+1), k ∈ [-cells, cells). 1-D; deterministic per seed.
ControlSet random_cell_set(double fraction, int cells, std::uint64_t seed);

}  // namespace hlab
