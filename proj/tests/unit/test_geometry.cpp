#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "grid_measure.hpp"
#include "hlab/error.hpp"
#include "hlab/geometry.hpp"

using namespace hlab;

namespace {
Box box1(double lo, double hi) { return Box{{{lo, hi}}}; }
Box box2(double lo, double hi) { return Box{{{lo, hi}, {lo, hi}}}; }
}  // namespace

TEST(Density, ValidateExamples) {
  const auto a = density_validate(DensityFn::power(0.5, 0.5), box1(-10, 10), 400);
  EXPECT_TRUE(a.lipschitz_ok);
  EXPECT_TRUE(a.bounds_ok);
  const auto b = density_validate(DensityFn::constant(1.0), box1(-10, 10), 100);
  EXPECT_TRUE(b.lipschitz_ok);
  EXPECT_TRUE(b.bounds_ok);
  const auto c = density_validate(DensityFn::power(5.0, 0.1), box1(-10, 10), 400);
  EXPECT_FALSE(c.lipschitz_ok);
  // direct max of |rho'| = R(1-eps)|x|/<x>^{1+eps} on a fine grid
  double grad = 0.0;
  for (double x = -10; x <= 10; x += 1e-3) grad = std::max(grad, 4.5 * std::abs(x) / std::pow(1 + x * x, 0.55));
  EXPECT_GT(grad, 0.5);
  EXPECT_LE(c.worst_lipschitz, grad + 1e-9);
}

TEST(Density, TabulatedRejectsNonPositive) {
  EXPECT_THROW(DensityFn::tabulated({0, 1, 2}, {1.0, 0.0, 1.0}), Error);
  EXPECT_THROW(DensityFn::power(-1, 0.5), Error);
  EXPECT_THROW(DensityFn::power(1, 1.5), Error);
  const DensityFn t = DensityFn::tabulated({0, 1, 2}, {1.0, 1.2, 1.4});
  EXPECT_NEAR(t(0.5), 1.1, 1e-14);
  EXPECT_NEAR(t(-1.5), 1.3, 1e-14);
  EXPECT_NEAR(t(10.0), 1.4, 1e-14);
}

TEST(Measure, OneDimensionalExamples) {
  const double c[] = {0.3};
  EXPECT_DOUBLE_EQ(intersection_measure(ControlSet::full(1), c, 2.5), 5.0);
  const ControlSet per = ControlSet::periodic(1, 2.0, 0.5);
  const double c2[] = {0.5};
  // [-0.5, 1.5] meets only [0, 1] of the kept cells
  EXPECT_NEAR(intersection_measure(per, c2, 1.0), 1.0, 1e-14);
  const double grid = oracle::count_1d([&](double x) { return per.contains(std::span<const double>(&x, 1)); },
                                       -0.5, 1.5, 1e-4);
  EXPECT_NEAR(grid, 1.0, 1e-3);
  const double c3[] = {0.75};
  EXPECT_NEAR(intersection_measure(per, c3, 1.5), 1.25, 1e-14);
}

TEST(Measure, QuarterDisc) {
  const ControlSet sq = ControlSet::boxes(2, {box2(0, 1)});
  const double c[] = {0.0, 0.0};
  const double m = intersection_measure(sq, c, 1.0);
  EXPECT_NEAR(m, std::numbers::pi / 4, 1e-6 * std::numbers::pi / 4);
}

TEST(Measure, TwoDimensionalAgainstGridCounting) {
  const ControlSet per = ControlSet::periodic(2, 1.5, 0.6, 0.2);
  const double c[] = {0.37, -0.81};
  const double r = 1.3;
  const double m = intersection_measure(per, c, r);
  const double grid = oracle::count_2d(
      [&](double x, double y) {
        const double p[] = {x, y};
        return (x - c[0]) * (x - c[0]) + (y - c[1]) * (y - c[1]) <= r * r && per.contains(p);
      },
      c[0] - r, c[0] + r, c[1] - r, c[1] + r, 2e-3);
  EXPECT_NEAR(m, grid, 2e-3);

  const ControlSet balls = ControlSet::balls(2, {{{0.5, 0.0}, 0.7}, {{-0.4, 0.3}, 0.5}});
  const double mb = intersection_measure(balls, c, r);
  const double gb = oracle::count_2d(
      [&](double x, double y) {
        const double p[] = {x, y};
        return (x - c[0]) * (x - c[0]) + (y - c[1]) * (y - c[1]) <= r * r && balls.contains(p);
      },
      c[0] - r, c[0] + r, c[1] - r, c[1] + r, 2e-3);
  EXPECT_NEAR(mb, gb, 2e-3);
}

TEST(Measure, ThreeDimensionalFullBall) {
  const double c[] = {0.1, 0.2, 0.3};
  EXPECT_NEAR(intersection_measure(ControlSet::full(3), c, 1.5), ball_volume(3, 1.5), 1e-6 * ball_volume(3, 1.5));
  const ControlSet half = ControlSet::boxes(3, {Box{{{0.1, 10}, {-10, 10}, {-10, 10}}}});
  EXPECT_NEAR(intersection_measure(half, c, 1.5), ball_volume(3, 1.5) / 2, 1e-6 * ball_volume(3, 1.5));
}

TEST(Measure, BoundedByBallVolume) {
  const ControlSet per = ControlSet::periodic(2, 1.0, 0.3);
  for (const Point& p : halton_points(box2(-5, 5), 40)) {
    const double m = intersection_measure(per, p, 0.8);
    EXPECT_GE(m, 0.0);
    EXPECT_LE(m, ball_volume(2, 0.8) * (1 + 1e-9));
  }
}

TEST(Thickness, Examples) {
  const auto centers = halton_points(box1(-30, 30), 200);
  EXPECT_NEAR(thickness_estimate(ControlSet::full(1), DensityFn::constant(1.0), centers).gamma_hat, 1.0, 1e-14);
  const ControlSet per = ControlSet::periodic(1, 2.0, 0.5);
  const auto t = thickness_estimate(per, DensityFn::constant(2.0), thickness_centers(per, box1(-30, 30), 200));
  EXPECT_NEAR(t.gamma_hat, 0.5, 1e-12);
  EXPECT_TRUE(t.finite_sample);
}

TEST(Thickness, SqrtGappedSetHasPositiveLowerBound) {
  // kept unit intervals separated by gaps of width 2<x>^{1/2}
  std::vector<Interval> kept;
  for (int side : {1, -1}) {
    double x = 0.0;
    while (x < 60) {
      const double a = x, b = x + 1.0;
      if (side > 0) kept.push_back({a, b}); else kept.push_back({-b, -a});
      x = b + 2 * std::sqrt(std::sqrt(1 + b * b));
    }
  }
  const ControlSet omega = ControlSet::intervals(kept);
  const DensityFn rho = DensityFn::power(1.0, 0.5);
  const auto centers = thickness_centers(omega, box1(-50, 50), 400);
  const auto t = thickness_estimate(omega, rho, centers);
  EXPECT_GT(t.gamma_hat, 0.0);
  // interval-arithmetic oracle at the worst center
  const double c = t.worst_center[0];
  const double r = rho(c);
  double exact = 0.0;
  for (const Interval& i : kept) exact += std::max(0.0, std::min(i.hi, c + r) - std::max(i.lo, c - r));
  EXPECT_NEAR(t.gamma_hat, exact / (2 * r), 1e-12);
}

TEST(Thickness, MonotoneUnderInclusion) {
  const ControlSet small = ControlSet::intervals({{0, 1}, {3, 3.5}, {6, 8}});
  const ControlSet big = ControlSet::intervals({{-0.5, 1.5}, {3, 4}, {5.5, 8}});
  const auto centers = halton_points(box1(-2, 10), 100);
  const auto a = thickness_estimate(small, DensityFn::constant(1.5), centers);
  const auto b = thickness_estimate(big, DensityFn::constant(1.5), centers);
  for (std::size_t i = 0; i < centers.size(); ++i) EXPECT_LE(a.ratios[i], b.ratios[i] + 1e-15);
}

TEST(Covering, UniformOneDimensional) {
  const Covering cov = covering_generate(DensityFn::constant(1.0), box1(0, 10));
  const auto chk = covering_verify(cov, box1(0, 10), 5000);
  EXPECT_TRUE(chk.covered);
  EXPECT_TRUE(chk.disjoint);
  for (std::size_t i = 1; i < cov.centers.size(); ++i) {
    EXPECT_GE(std::abs(cov.centers[i][0] - cov.centers[i - 1][0]), 2.0 / 3.0 - 1e-12);
  }
}

TEST(Covering, PowerDensityMultiplicity) {
  const DensityFn rho = DensityFn::power(1.0, 0.5);
  const Covering cov = covering_generate(rho, box1(-20, 20));
  const auto chk = covering_verify(cov, box1(-20, 20), 10000);
  EXPECT_TRUE(chk.covered);
  EXPECT_TRUE(chk.disjoint);
  EXPECT_EQ(cov.overlap_bound, 33);
  EXPECT_LE(chk.max_multiplicity, 33);
  EXPECT_LE(chk.max_multiplicity, 10);
  for (std::size_t k = 0; k < cov.centers.size(); ++k) EXPECT_DOUBLE_EQ(cov.radii[k], rho(cov.centers[k][0]));
}

TEST(Covering, TwoDimensionalUniform) {
  const Covering cov = covering_generate(DensityFn::constant(1.0), box2(0, 4));
  const auto chk = covering_verify(cov, box2(0, 4), 400);
  EXPECT_TRUE(chk.covered);
  EXPECT_TRUE(chk.disjoint);
  EXPECT_EQ(cov.overlap_bound, 33 * 33);
  EXPECT_LE(chk.max_multiplicity, 25);
  std::size_t total = 0;
  for (std::size_t c : chk.histogram) total += c;
  EXPECT_EQ(total, chk.points);
}

TEST(Covering, CoarseGridFails) {
  CoveringOptions o;
  o.spacing = 2.0;
  try {
    covering_generate(DensityFn::constant(0.5), box1(0, 10), o);
    FAIL() << "expected coverage failure";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCoverageFailure);
  }
}

TEST(Covering, CsvExport) {
  const Covering cov = covering_generate(DensityFn::constant(1.0), box2(0, 2));
  std::ostringstream out;
  write_covering_csv(cov, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "x0,x1,radius");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, cov.centers.size());
}

TEST(Transfer, FullSetAndPaperConstant) {
  const auto centers = halton_points(box1(-20, 20), 50);
  const auto full = thickness_transfer_check(ControlSet::full(1), DensityFn::constant(1), DensityFn::constant(2),
                                             1.0, centers);
  EXPECT_NEAR(full.predicted, 1.0, 1e-15);
  EXPECT_TRUE(full.holds);

  const ControlSet omega = random_cell_set(0.95, 60, 4);
  const auto t = thickness_transfer_check(omega, DensityFn::constant(1), DensityFn::constant(3), 0.9,
                                          halton_points(box1(-40, 40), 100));
  EXPECT_NEAR(t.predicted, 0.4, 1e-15);
  EXPECT_TRUE(t.hypothesis_ok);
  EXPECT_TRUE(t.premise_ok);
  EXPECT_TRUE(t.holds);
  EXPECT_GE(t.measured_rho2, 0.4 - 1e-3);
}

TEST(Transfer, HypothesisViolationIsReported) {
  const auto centers = halton_points(box1(-5, 5), 20);
  const auto t = thickness_transfer_check(ControlSet::periodic(1, 1.0, 0.5), DensityFn::constant(1),
                                          DensityFn::constant(2), 0.5, centers);
  EXPECT_FALSE(t.hypothesis_ok);
}

TEST(Halton, DeterministicAndInsideBox) {
  const auto a = halton_points(box2(-1, 3), 64);
  const auto b = halton_points(box2(-1, 3), 64);
  EXPECT_EQ(a, b);
  for (const Point& p : a) EXPECT_TRUE(box2(-1, 3).contains(p));
}
