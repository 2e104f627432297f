#include "hlab/control_set.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include <nlohmann/json.hpp>

#include "hlab/error.hpp"

namespace hlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool periodic_kept(const ControlSet::Periodic& p, double x) {
  const double u = (x - p.offset) / p.period;
  const double frac = u - std::floor(u);
  return frac < p.fraction;
}

void check_dim(int dim) {
  require(dim >= 1 && dim <= 3, ErrorCode::kUnsupportedShape,
          "control sets are supported in dimensions 1 to 3, got " + std::to_string(dim));
}

}  // namespace

bool Box::contains(std::span<const double> x) const {
  for (std::size_t j = 0; j < sides.size(); ++j) {
    if (x[j] < sides[j].lo || x[j] > sides[j].hi) return false;
  }
  return true;
}

std::vector<Interval> merge_intervals(std::vector<Interval> intervals) {
  std::erase_if(intervals, [](const Interval& i) { return !(i.hi > i.lo); });
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const Interval& i : intervals) {
    if (!merged.empty() && i.lo <= merged.back().hi) {
      merged.back().hi = std::max(merged.back().hi, i.hi);
    } else {
      merged.push_back(i);
    }
  }
  return merged;
}

ControlSet ControlSet::full(int dim) {
  check_dim(dim);
  return ControlSet(dim, Full{});
}

ControlSet ControlSet::boxes(int dim, std::vector<Box> boxes) {
  check_dim(dim);
  for (const Box& b : boxes) {
    require(b.dim() == dim, ErrorCode::kDimensionMismatch, "box dimension does not match set");
  }
  return ControlSet(dim, BoxUnion{std::move(boxes)});
}

ControlSet ControlSet::intervals(std::vector<Interval> intervals) {
  std::vector<Box> boxes;
  boxes.reserve(intervals.size());
  for (const Interval& i : intervals) boxes.push_back(Box{{i}});
  return ControlSet::boxes(1, std::move(boxes));
}

ControlSet ControlSet::periodic(int dim, double period, double fraction, double offset) {
  check_dim(dim);
  require(period > 0.0, ErrorCode::kInvalidArgument, "period must be positive");
  require(fraction > 0.0 && fraction <= 1.0, ErrorCode::kInvalidArgument,
          "kept fraction must lie in (0, 1]");
  return ControlSet(dim, Periodic{period, fraction, offset});
}

ControlSet ControlSet::balls(int dim, std::vector<Ball> balls) {
  check_dim(dim);
  for (const Ball& b : balls) {
    require(b.dim() == dim, ErrorCode::kDimensionMismatch, "ball dimension does not match set");
    require(b.radius > 0.0, ErrorCode::kInvalidArgument, "ball radius must be positive");
  }
  return ControlSet(dim, BallUnion{std::move(balls)});
}

bool ControlSet::contains(std::span<const double> x) const {
  require(static_cast<int>(x.size()) == dim_, ErrorCode::kDimensionMismatch,
          "membership query has wrong dimension");
  return std::visit(
      overloaded{
          [](const Full&) { return true; },
          [&](const BoxUnion& u) {
            return std::any_of(u.boxes.begin(), u.boxes.end(),
                               [&](const Box& b) { return b.contains(x); });
          },
          [&](const Periodic& p) {
            return std::all_of(x.begin(), x.end(), [&](double v) { return periodic_kept(p, v); });
          },
          [&](const BallUnion& u) {
            return std::any_of(u.balls.begin(), u.balls.end(), [&](const Ball& b) {
              double d2 = 0.0;
              for (std::size_t j = 0; j < x.size(); ++j) {
                d2 += (x[j] - b.center[j]) * (x[j] - b.center[j]);
              }
              return d2 < b.radius * b.radius;
            });
          },
      },
      shape_);
}

ControlSet ControlSet::slice(double x0) const {
  require(dim_ >= 2, ErrorCode::kUnsupportedShape, "cannot slice a 1-D set");
  const int lower = dim_ - 1;
  return std::visit(
      overloaded{
          [&](const Full&) { return ControlSet::full(lower); },
          [&](const BoxUnion& u) {
            std::vector<Box> kept;
            for (const Box& b : u.boxes) {
              if (x0 >= b.sides[0].lo && x0 < b.sides[0].hi) {
                kept.push_back(Box{{b.sides.begin() + 1, b.sides.end()}});
              }
            }
            return ControlSet::boxes(lower, std::move(kept));
          },
          [&](const Periodic& p) {
            return periodic_kept(p, x0) ? ControlSet(lower, p) : ControlSet::empty(lower);
          },
          [&](const BallUnion& u) {
            std::vector<Ball> kept;
            for (const Ball& b : u.balls) {
              const double d = x0 - b.center[0];
              if (std::abs(d) < b.radius) {
                kept.push_back(Ball{{b.center.begin() + 1, b.center.end()},
                                    std::sqrt(b.radius * b.radius - d * d)});
              }
            }
            return ControlSet::balls(lower, std::move(kept));
          },
      },
      shape_);
}

std::vector<Interval> ControlSet::intervals_within(double lo, double hi) const {
  require(dim_ == 1, ErrorCode::kUnsupportedShape, "interval decomposition needs a 1-D set");
  require(std::isfinite(lo) && std::isfinite(hi), ErrorCode::kInvalidArgument,
          "interval window must be finite");
  if (!(hi > lo)) return {};
  auto clip = [&](Interval i) { return Interval{std::max(i.lo, lo), std::min(i.hi, hi)}; };
  return std::visit(
      overloaded{
          [&](const Full&) { return std::vector<Interval>{{lo, hi}}; },
          [&](const BoxUnion& u) {
            std::vector<Interval> parts;
            for (const Box& b : u.boxes) parts.push_back(clip(b.sides[0]));
            return merge_intervals(std::move(parts));
          },
          [&](const Periodic& p) {
            std::vector<Interval> parts;
            const auto first = static_cast<long long>(std::floor((lo - p.offset) / p.period));
            const auto last = static_cast<long long>(std::floor((hi - p.offset) / p.period));
            for (long long k = first; k <= last; ++k) {
              const double start = p.offset + static_cast<double>(k) * p.period;
              parts.push_back(clip({start, start + p.fraction * p.period}));
            }
            return merge_intervals(std::move(parts));
          },
          [&](const BallUnion& u) {
            std::vector<Interval> parts;
            for (const Ball& b : u.balls) {
              parts.push_back(clip({b.center[0] - b.radius, b.center[0] + b.radius}));
            }
            return merge_intervals(std::move(parts));
          },
      },
      shape_);
}

std::vector<double> ControlSet::breakpoints(double lo, double hi) const {
  std::vector<double> points;
  auto add = [&](double v) {
    if (v > lo && v < hi) points.push_back(v);
  };
  std::visit(overloaded{
                 [](const Full&) {},
                 [&](const BoxUnion& u) {
                   for (const Box& b : u.boxes) {
                     add(b.sides[0].lo);
                     add(b.sides[0].hi);
                   }
                 },
                 [&](const Periodic& p) {
                   const auto first = static_cast<long long>(std::floor((lo - p.offset) / p.period));
                   const auto last = static_cast<long long>(std::floor((hi - p.offset) / p.period));
                   for (long long k = first; k <= last; ++k) {
                     const double start = p.offset + static_cast<double>(k) * p.period;
                     add(start);
                     add(start + p.fraction * p.period);
                   }
                 },
                 [&](const BallUnion& u) {
                   for (const Ball& b : u.balls) {
                     add(b.center[0] - b.radius);
                     add(b.center[0] + b.radius);
                   }
                 },
             },
             shape_);
  points.push_back(lo);
  points.push_back(hi);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

bool ControlSet::piecewise_constant_slices() const {
  return !std::holds_alternative<BallUnion>(shape_);
}

nlohmann::json ControlSet::describe() const {
  nlohmann::json j;
  j["dim"] = dim_;
  std::visit(overloaded{
                 [&](const Full&) { j["type"] = "full"; },
                 [&](const BoxUnion& u) {
                   j["type"] = "boxes";
                   j["count"] = u.boxes.size();
                 },
                 [&](const Periodic& p) {
                   j["type"] = "periodic";
                   j["period"] = p.period;
                   j["fraction"] = p.fraction;
                   j["offset"] = p.offset;
                 },
                 [&](const BallUnion& u) {
                   j["type"] = "balls";
                   j["count"] = u.balls.size();
                 },
             },
             shape_);
  return j;
}

ControlSet random_cell_set(double fraction, int cells, std::uint64_t seed) {
  require(fraction > 0.0 && fraction <= 1.0, ErrorCode::kInvalidArgument,
          "kept fraction must lie in (0, 1]");
  require(cells >= 1, ErrorCode::kInvalidArgument, "need at least one cell");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::vector<Interval> kept;
  kept.reserve(static_cast<std::size_t>(2 * cells));
  for (int k = -cells; k < cells; ++k) {
    const double start = k + uniform(rng) * (1.0 - fraction);
    kept.push_back({start, start + fraction});
  }
  return ControlSet::intervals(std::move(kept));
}

}  // namespace hlab
