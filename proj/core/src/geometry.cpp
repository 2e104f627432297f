#include "hlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "hlab/error.hpp"
#include "hlab/quadrature.hpp"

namespace hlab {

namespace {

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(s);
}

void check_box(const Box& box) {
  require(box.dim() >= 1 && box.dim() <= 3, ErrorCode::kUnsupportedShape,
          "boxes must have dimension 1 to 3");
  for (const Interval& side : box.sides) {
    require(std::isfinite(side.lo) && std::isfinite(side.hi) && side.hi > side.lo,
            ErrorCode::kInvalidArgument, "box sides must be finite and non-empty");
  }
}

double radical_inverse(std::uint64_t index, std::uint64_t base) {
  double result = 0.0;
  double f = 1.0 / static_cast<double>(base);
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= static_cast<double>(base);
  }
  return result;
}

double measure_recursive(const ControlSet& omega, std::span<const double> c, double r,
                         const QuadratureSpec& quad) {
  if (r <= 0.0) return 0.0;
  if (omega.dim() == 1) {
    double total = 0.0;
    for (const Interval& i : omega.intervals_within(c[0] - r, c[0] + r)) total += i.length();
    return total;
  }
  const double c0 = c[0];
  const std::span<const double> rest = c.subspan(1);

  auto to_theta = [&](double x) { return std::asin(std::clamp((x - c0) / r, -1.0, 1.0)); };
  std::vector<double> thetas;
  const std::vector<double> xs = omega.breakpoints(c0 - r, c0 + r);
  for (double x : xs) thetas.push_back(to_theta(x));
  thetas.front() = -std::numbers::pi / 2;
  thetas.back() = std::numbers::pi / 2;

  // In 2-D a constant slice makes the integrand smooth apart from the angles
  // where the slice's own endpoints cross the ball boundary.
  if (omega.dim() == 2 && omega.piecewise_constant_slices()) {
    std::vector<double> extra;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const ControlSet s = omega.slice(0.5 * (xs[i] + xs[i + 1]));
      for (double e : s.breakpoints(rest[0] - r, rest[0] + r)) {
        const double d = std::abs(e - rest[0]);
        if (d >= r) continue;
        const double t = std::acos(d / r);
        for (double th : {t, -t}) {
          if (th > thetas[i] && th < thetas[i + 1]) extra.push_back(th);
        }
      }
    }
    thetas.insert(thetas.end(), extra.begin(), extra.end());
    std::sort(thetas.begin(), thetas.end());
    thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());
  }

  QuadratureSpec inner = quad;
  inner.rel_tol *= 0.1;
  const auto integrand = [&](double theta) {
    const double half = r * std::cos(theta);
    if (half <= 0.0) return 0.0;
    const ControlSet s = omega.slice(c0 + r * std::sin(theta));
    return half * measure_recursive(s, rest, half, inner);
  };
  AdaptiveOptions opts;
  opts.rel_tol = quad.rel_tol;
  opts.abs_tol = quad.abs_tol * ball_volume(omega.dim(), r);
  opts.points = 16;
  opts.max_depth = 30;
  return integrate_piecewise(integrand, thetas, opts);
}

}  // namespace

double ball_volume(int dim, double radius) {
  require(dim >= 1, ErrorCode::kInvalidArgument, "dimension must be positive");
  const double n = dim;
  return std::exp(0.5 * n * std::log(std::numbers::pi) - std::lgamma(0.5 * n + 1.0)) *
         std::pow(radius, n);
}

double intersection_measure(const ControlSet& omega, std::span<const double> center, double radius,
                            const QuadratureSpec& quad) {
  require(radius > 0.0 && std::isfinite(radius), ErrorCode::kInvalidArgument,
          "ball radius must be positive");
  require(static_cast<int>(center.size()) == omega.dim(), ErrorCode::kDimensionMismatch,
          "ball center has wrong dimension");
  require(quad.rel_tol > 0.0, ErrorCode::kInvalidArgument, "quadrature tolerance must be positive");
  const double full = ball_volume(omega.dim(), radius);
  return std::clamp(measure_recursive(omega, center, radius, quad), 0.0, full);
}

std::vector<Point> halton_points(const Box& box, int count) {
  check_box(box);
  require(count >= 0, ErrorCode::kInvalidArgument, "point count must be non-negative");
  static constexpr std::uint64_t kBases[] = {2, 3, 5};
  std::vector<Point> points(static_cast<std::size_t>(count), Point(box.sides.size()));
  for (int i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < box.sides.size(); ++j) {
      const double u = radical_inverse(static_cast<std::uint64_t>(i) + 1, kBases[j]);
      points[i][j] = box.sides[j].lo + u * (box.sides[j].hi - box.sides[j].lo);
    }
  }
  return points;
}

DensityReport density_validate(const DensityFn& rho, const Box& box, int samples) {
  require(samples >= 2, ErrorCode::kInvalidArgument, "density validation needs at least 2 samples");
  const std::vector<Point> pts = halton_points(box, samples);
  const DensityBounds& b = rho.bounds();
  DensityReport report;
  report.samples = samples;
  std::vector<double> values(pts.size());
  bool bounds_ok = true;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double v = rho(pts[i]);
    require(v > 0.0 && std::isfinite(v), ErrorCode::kInvalidDensity,
            "density is not positive at a sample point");
    values[i] = v;
    const double upper = b.R * std::pow(japanese_bracket(pts[i]), 1.0 - b.epsilon);
    report.worst_ratio = std::max({report.worst_ratio, v / upper, b.m / v});
    if (v < b.m * (1.0 - 1e-12) || v > upper * (1.0 + 1e-12)) bounds_ok = false;
  }
  report.bounds_ok = bounds_ok;

  auto visit = [&](std::size_t i, std::size_t j) {
    const double d = distance(pts[i], pts[j]);
    if (d <= 0.0) return;
    report.worst_lipschitz = std::max(report.worst_lipschitz, std::abs(values[i] - values[j]) / d);
    ++report.pairs;
  };
  if (pts.size() <= 2048) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
      for (std::size_t j = i + 1; j < pts.size(); ++j) visit(i, j);
    }
  } else {
    std::vector<std::size_t> order(pts.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t c) { return pts[a][0] < pts[c][0]; });
    constexpr std::size_t kWindow = 64;
    for (std::size_t i = 0; i < order.size(); ++i) {
      for (std::size_t j = i + 1; j < std::min(order.size(), i + kWindow); ++j) {
        visit(order[i], order[j]);
      }
    }
  }
  report.lipschitz_ok = report.worst_lipschitz <= 0.5 * (1.0 + 1e-12);
  return report;
}

std::vector<Point> thickness_centers(const ControlSet& omega, const Box& box, int halton_count) {
  std::vector<Point> centers = halton_points(box, halton_count);
  require(omega.dim() == box.dim(), ErrorCode::kDimensionMismatch,
          "control set and box dimensions differ");
  const Interval axis = box.sides[0];
  if (omega.dim() == 1) {
    double prev = axis.lo;
    for (const Interval& i : omega.intervals_within(axis.lo, axis.hi)) {
      if (i.lo > prev) centers.push_back({0.5 * (prev + i.lo)});
      prev = i.hi;
    }
    if (axis.hi > prev) centers.push_back({0.5 * (prev + axis.hi)});
    return centers;
  }
  const std::vector<double> xs = omega.breakpoints(axis.lo, axis.hi);
  Point mid(box.sides.size());
  for (std::size_t j = 1; j < box.sides.size(); ++j) {
    mid[j] = 0.5 * (box.sides[j].lo + box.sides[j].hi);
  }
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    mid[0] = 0.5 * (xs[i] + xs[i + 1]);
    centers.push_back(mid);
  }
  return centers;
}

ThicknessReport thickness_estimate(const ControlSet& omega, const DensityFn& rho,
                                   const std::vector<Point>& centers, const QuadratureSpec& quad) {
  require(!centers.empty(), ErrorCode::kInvalidArgument, "thickness needs at least one center");
  ThicknessReport report;
  report.ratios.reserve(centers.size());
  for (const Point& x : centers) {
    const double r = rho(x);
    const double ratio = intersection_measure(omega, x, r, quad) / ball_volume(omega.dim(), r);
    report.ratios.push_back(ratio);
    if (report.worst_center.empty() || ratio < report.gamma_hat) {
      report.gamma_hat = ratio;
      report.worst_center = x;
    }
  }
  return report;
}

Covering covering_generate(const DensityFn& rho, const Box& box, const CoveringOptions& options) {
  check_box(box);
  const int n = box.dim();
  const double m = rho.bounds().m;
  const double h = options.spacing > 0.0 ? options.spacing : 0.1 * m / std::sqrt(static_cast<double>(n));

  std::vector<std::size_t> counts(static_cast<std::size_t>(n));
  std::size_t total = 1;
  for (int j = 0; j < n; ++j) {
    const double len = box.sides[j].hi - box.sides[j].lo;
    counts[j] = static_cast<std::size_t>(std::ceil(len / h)) + 1;
    total *= counts[j];
  }
  require(total <= options.max_candidates, ErrorCode::kCoverageFailure,
          "candidate grid would need " + std::to_string(total) + " points");

  Covering cov;
  cov.dim = n;
  cov.overlap_bound = static_cast<long>(std::lround(std::pow(33.0, n)));
  Point x(static_cast<std::size_t>(n));
  double min_rho = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t rem = c;
    for (int j = n - 1; j >= 0; --j) {
      idx[j] = rem % counts[j];
      rem /= counts[j];
      const double step = (box.sides[j].hi - box.sides[j].lo) / static_cast<double>(counts[j] - 1);
      x[j] = box.sides[j].lo + static_cast<double>(idx[j]) * step;
    }
    const double r = rho(x);
    min_rho = std::min(min_rho, r);
    bool keep = true;
    bool covered = false;
    for (std::size_t k = 0; k < cov.centers.size(); ++k) {
      const double d = distance(x, cov.centers[k]);
      if (d < (r + cov.radii[k]) / 3.0) keep = false;
      if (d <= cov.radii[k]) covered = true;
      if (!keep && covered) break;
    }
    if (keep) {
      cov.centers.push_back(x);
      cov.radii.push_back(r);
    } else if (!covered) {
      fail(ErrorCode::kCoverageFailure,
           "candidate point is rejected but lies in no ball; density varies too fast");
    }
  }
  const double diag = h * std::sqrt(static_cast<double>(n));
  if (min_rho <= diag) {
    fail(ErrorCode::kCoverageFailure,
         "min density " + std::to_string(min_rho) + " is below the candidate grid resolution " +
             std::to_string(diag));
  }
  return cov;
}

CoveringCheck covering_verify(const Covering& cov, const Box& box, int points_per_axis) {
  check_box(box);
  require(box.dim() == cov.dim, ErrorCode::kDimensionMismatch, "covering and box dimensions differ");
  require(points_per_axis >= 2, ErrorCode::kInvalidArgument, "need at least 2 points per axis");
  const int n = cov.dim;
  CoveringCheck check;

  check.disjoint = true;
  for (std::size_t i = 0; i < cov.centers.size() && check.disjoint; ++i) {
    for (std::size_t k = i + 1; k < cov.centers.size(); ++k) {
      if (distance(cov.centers[i], cov.centers[k]) < (cov.radii[i] + cov.radii[k]) / 3.0) {
        check.disjoint = false;
        break;
      }
    }
  }

  // Centers sorted along axis 0 so each query only scans balls that can reach it.
  std::vector<std::size_t> order(cov.centers.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return cov.centers[a][0] < cov.centers[b][0]; });
  std::vector<double> keys(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) keys[i] = cov.centers[order[i]][0];
  const double max_r = cov.radii.empty() ? 0.0 : *std::max_element(cov.radii.begin(), cov.radii.end());

  std::size_t total = 1;
  for (int j = 0; j < n; ++j) total *= static_cast<std::size_t>(points_per_axis);
  check.points = total;
  Point y(static_cast<std::size_t>(n));
  for (std::size_t c = 0; c < total; ++c) {
    std::size_t rem = c;
    for (int j = n - 1; j >= 0; --j) {
      const auto i = rem % static_cast<std::size_t>(points_per_axis);
      rem /= static_cast<std::size_t>(points_per_axis);
      y[j] = box.sides[j].lo + (box.sides[j].hi - box.sides[j].lo) * static_cast<double>(i) /
                                   static_cast<double>(points_per_axis - 1);
    }
    const auto first = std::lower_bound(keys.begin(), keys.end(), y[0] - max_r) - keys.begin();
    const auto last = std::upper_bound(keys.begin(), keys.end(), y[0] + max_r) - keys.begin();
    int mult = 0;
    for (auto i = first; i < last; ++i) {
      const std::size_t k = order[static_cast<std::size_t>(i)];
      if (distance(y, cov.centers[k]) <= cov.radii[k]) ++mult;
    }
    if (mult == 0) ++check.uncovered;
    check.max_multiplicity = std::max(check.max_multiplicity, mult);
    if (check.histogram.size() <= static_cast<std::size_t>(mult)) check.histogram.resize(mult + 1, 0);
    ++check.histogram[static_cast<std::size_t>(mult)];
  }
  check.covered = check.uncovered == 0;
  return check;
}

void write_covering_csv(const Covering& cov, std::ostream& out) {
  for (int j = 0; j < cov.dim; ++j) out << 'x' << j << ',';
  out << "radius\n";
  char buf[64];
  for (std::size_t i = 0; i < cov.centers.size(); ++i) {
    for (double v : cov.centers[i]) {
      std::snprintf(buf, sizeof buf, "%.17g,", v);
      out << buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g\n", cov.radii[i]);
    out << buf;
  }
}

TransferReport thickness_transfer_check(const ControlSet& omega, const DensityFn& rho1,
                                        const DensityFn& rho2, double gamma,
                                        const std::vector<Point>& centers, double tol,
                                        const QuadratureSpec& quad) {
  const int n = omega.dim();
  TransferReport report;
  report.gamma = gamma;
  const double six_n = std::pow(6.0, n);
  report.predicted = 1.0 - (1.0 - gamma) * six_n;
  bool ordered = true;
  for (const Point& x : centers) ordered = ordered && rho1(x) <= rho2(x);
  report.hypothesis_ok = ordered && gamma > 1.0 - 1.0 / six_n;
  report.measured_rho1 = thickness_estimate(omega, rho1, centers, quad).gamma_hat;
  report.measured_rho2 = thickness_estimate(omega, rho2, centers, quad).gamma_hat;
  report.premise_ok = report.measured_rho1 >= gamma - tol;
  report.holds = report.measured_rho2 >= report.predicted - tol;
  return report;
}

ControlSet density_gapped_set(const DensityFn& rho, double extent, double kept_fraction) {
  require(extent > 0.0, ErrorCode::kInvalidArgument, "extent must be positive");
  require(kept_fraction > 0.0 && kept_fraction <= 1.0, ErrorCode::kInvalidArgument,
          "kept fraction must lie in (0, 1]");
  std::vector<Interval> kept;
  double a = 0.0;
  while (a < extent) {
    const double width = 2.0 * rho(a);
    const Interval piece{a, a + kept_fraction * width};
    kept.push_back(piece);
    kept.push_back({-piece.hi, -piece.lo});
    a += width;
  }
  return ControlSet::intervals(merge_intervals(std::move(kept)));
}

nlohmann::json to_json(const DensityReport& r) {
  return {{"lipschitz_ok", r.lipschitz_ok}, {"bounds_ok", r.bounds_ok},
          {"worst_lipschitz", r.worst_lipschitz}, {"worst_ratio", r.worst_ratio},
          {"samples", r.samples}, {"pairs", r.pairs}};
}

nlohmann::json to_json(const CoveringCheck& c) {
  return {{"covered", c.covered},   {"disjoint", c.disjoint},   {"max_multiplicity", c.max_multiplicity},
          {"points", c.points},     {"uncovered", c.uncovered}, {"histogram", c.histogram}};
}

nlohmann::json to_json(const TransferReport& r) {
  return {{"gamma", r.gamma},
          {"predicted", r.predicted},
          {"hypothesis_ok", r.hypothesis_ok},
          {"measured_rho1", r.measured_rho1},
          {"measured_rho2", r.measured_rho2},
          {"premise_ok", r.premise_ok},
          {"holds", r.holds}};
}

}  // namespace hlab
