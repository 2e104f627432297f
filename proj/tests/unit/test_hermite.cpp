#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <nlohmann/json.hpp>

#include "grid_measure.hpp"
#include "hermite_oracle.hpp"
#include "hlab/error.hpp"
#include "hlab/expansion.hpp"
#include "hlab/hermite.hpp"
#include "hlab/quadrature.hpp"

using namespace hlab;

TEST(MultiIndex, OrderIsSumOfEntries) {
  const MultiIndex a{2, 0, 3};
  EXPECT_EQ(a.order(), 5);
  EXPECT_EQ(a.raised(1).order(), 6);
  EXPECT_EQ(a.lowered(0)[0], 1);
  EXPECT_EQ((a + MultiIndex{1, 1, 1}).order(), 8);
}

TEST(IndexSet, GradedPrefixesAndLookup) {
  const IndexSet big(2, 6);
  const IndexSet small(2, 3);
  EXPECT_EQ(big.size(), index_count(2, 6));
  EXPECT_EQ(big.size(), 28u);
  for (std::size_t p = 0; p < small.size(); ++p) {
    EXPECT_EQ(big[p], small[p]);
    EXPECT_EQ(*big.position(big[p]), p);
  }
  for (std::size_t p = 1; p < big.size(); ++p) EXPECT_LE(big.order(p - 1), big.order(p));
  EXPECT_EQ(big.level_begin(4), index_count(2, 3));
  EXPECT_FALSE(small.position(MultiIndex{4, 0}).has_value());
}

TEST(HermiteEval, GroundStateAndParity) {
  EXPECT_NEAR(hermite_function(0, 0.0), 0.7511255444649425, 1e-15);
  EXPECT_EQ(hermite_function(1, 0.0), 0.0);
  EXPECT_NEAR(hermite_function(0, 0.0), std::pow(std::numbers::pi, -0.25), 1e-15);
}

TEST(HermiteEval, DegreeFourExplicitPolynomial) {
  const double x = 1.3;
  // H_4 = 16x^4 - 48x^2 + 12
  const double h4 = 16 * std::pow(x, 4) - 48 * x * x + 12;
  const double expected = h4 * std::exp(-x * x / 2) / std::sqrt(16.0 * 24.0 * std::sqrt(std::numbers::pi));
  EXPECT_NEAR(hermite_function(4, x) / expected, 1.0, 1e-12);
  EXPECT_NEAR(hermite_function(4, x) / oracle::hermite_function(4, x), 1.0, 1e-12);
}

TEST(HermiteEval, MatchesExtendedPrecisionOracle) {
  double worst = 0.0;
  for (int k : {0, 1, 2, 5, 17, 40, 80, 123, 160, 200}) {
    for (double x : {-20.0, -13.7, -6.1, -1.05, 0.3, 2.5, 9.9, 14.2, 20.0}) {
      const double ref = oracle::hermite_function(k, x);
      const double got = hermite_function(k, x);
      if (std::abs(ref) < 1e-280) {
        EXPECT_LE(std::abs(got), 1e-270);
        continue;
      }
      worst = std::max(worst, std::abs(got - ref) / std::abs(ref));
    }
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(HermiteEval, FarTailUnderflowsToZero) {
  const double v = hermite_function(3, 60.0);
  EXPECT_FALSE(std::isnan(v));
  EXPECT_EQ(v, 0.0);
  EXPECT_FALSE(std::isnan(hermite_function(5000, 1e3)));
  EXPECT_THROW(hermite_function(kMaxHermiteOrder + 1, 0.0), Error);
}

TEST(HermiteEval, BatchMatchesScalar) {
  const auto all = hermite_functions(30, 2.7);
  for (int k = 0; k <= 30; ++k) EXPECT_DOUBLE_EQ(all[static_cast<std::size_t>(k)], hermite_function(k, 2.7));
}

TEST(PhiAlpha, TensorProducts) {
  const double x00[] = {0.0, 0.0};
  EXPECT_NEAR(hermite_product(MultiIndex{0, 0}, x00), std::sqrt(1 / std::numbers::pi), 1e-15);
  const double x05[] = {0.0, 5.0};
  EXPECT_EQ(hermite_product(MultiIndex{1, 0}, x05), 0.0);
  const double x[] = {0.4, -1.1};
  EXPECT_NEAR(hermite_product(MultiIndex{2, 3}, x),
              oracle::hermite_function(2, 0.4) * oracle::hermite_function(3, -1.1), 1e-14);
  EXPECT_THROW(hermite_product(MultiIndex{1, 2, 3}, x), Error);
}

TEST(Orthonormality, BoxQuadratureUpToDegreeEight) {
  // n = 1 on [-12, 12]; the 2-D products factor so this covers n <= 2.
  std::vector<double> nodes, weights;
  gauss_legendre_on(200, -12.0, 12.0, nodes, weights);
  for (int a = 0; a <= 8; ++a) {
    for (int b = 0; b <= 8; ++b) {
      double s = 0.0;
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        s += weights[i] * oracle::hermite_function(a, nodes[i]) * hermite_function(b, nodes[i]);
      }
      EXPECT_NEAR(s, a == b ? 1.0 : 0.0, 1e-10) << a << "," << b;
    }
  }
}

TEST(Expansion, ParsevalByQuadrature) {
  std::mt19937_64 rng(42);
  const HermiteExpansion f = random_expansion(1, 20, rng);
  const double l2 = integrate_adaptive([&](double x) {
    const double v = f.evaluate(std::span<const double>(&x, 1));
    return v * v;
  }, -15.0, 15.0);
  EXPECT_NEAR(l2, f.squared_norm(), 1e-8);
}

TEST(Expansion, JsonRoundTrip) {
  std::mt19937_64 rng(9);
  const HermiteExpansion f = random_expansion(2, 5, rng);
  const HermiteExpansion g = expansion_from_json(nlohmann::json::parse(to_json(f).dump()));
  EXPECT_EQ(g.degree(), 5);
  EXPECT_EQ(g.dim(), 2);
  for (Eigen::Index i = 0; i < f.coeffs().size(); ++i) EXPECT_EQ(f.coeffs()(i), g.coeffs()(i));
}

TEST(Ladder, RaiseAndLowerOnBasis) {
  const HermiteExpansion f0 = HermiteExpansion::basis(MultiIndex{0});
  const HermiteExpansion up = apply_ladder(f0, 0, Ladder::kRaise);
  EXPECT_EQ(up.degree(), 1);
  EXPECT_DOUBLE_EQ(up.coeff(MultiIndex{1}), 1.0);
  EXPECT_DOUBLE_EQ(up.coeff(MultiIndex{0}), 0.0);
  EXPECT_EQ(apply_ladder(f0, 0, Ladder::kLower).norm(), 0.0);

  const HermiteExpansion f3 = HermiteExpansion::basis(MultiIndex{3});
  const auto rl = apply_ladder(apply_ladder(f3, 0, Ladder::kRaise), 0, Ladder::kLower);
  const auto lr = apply_ladder(apply_ladder(f3, 0, Ladder::kLower), 0, Ladder::kRaise);
  EXPECT_NEAR(rl.coeff(MultiIndex{3}), 4.0, 1e-14);
  EXPECT_NEAR(lr.coeff(MultiIndex{3}), 3.0, 1e-14);
}

TEST(Ladder, CommutatorIsIdentity) {
  std::mt19937_64 rng(1);
  for (int dim : {1, 2}) {
    const HermiteExpansion f = random_expansion(dim, 12, rng);
    for (int axis = 0; axis < dim; ++axis) {
      const auto lr = apply_ladder(apply_ladder(f, axis, Ladder::kRaise), axis, Ladder::kLower);
      const auto rl = apply_ladder(apply_ladder(f, axis, Ladder::kLower), axis, Ladder::kRaise);
      EXPECT_LE(max_abs_difference(lr - rl, f), 1e-13);
    }
  }
}

TEST(Ladder, OscillatorFactorization) {
  std::mt19937_64 rng(2);
  const HermiteExpansion f = random_expansion(1, 15, rng);
  HermiteExpansion two_ap_am = apply_ladder(apply_ladder(f, 0, Ladder::kLower), 0, Ladder::kRaise);
  two_ap_am *= 2.0;
  EXPECT_LE(max_abs_difference(two_ap_am + f, harmonic_apply(f)), 1e-13);
}

TEST(PositionDerivative, SpecExamples) {
  const HermiteExpansion f0 = HermiteExpansion::basis(MultiIndex{0});
  const auto xf = apply_position_derivative(f0, MultiIndex{1}, MultiIndex{0});
  EXPECT_EQ(xf.degree(), 1);
  EXPECT_NEAR(xf.coeff(MultiIndex{1}), std::numbers::sqrt2 / 2, 1e-15);
  EXPECT_NEAR(xf.coeff(MultiIndex{0}), 0.0, 1e-15);
  // quadrature cross-check of <x phi_0, phi_1>
  const double q = integrate_adaptive([](double x) { return x * hermite_function(0, x) * hermite_function(1, x); },
                                      -12, 12);
  EXPECT_NEAR(q, xf.coeff(MultiIndex{1}), 1e-12);

  const auto id = apply_position_derivative(f0, MultiIndex{0}, MultiIndex{0});
  EXPECT_LE(max_abs_difference(id, f0), 0.0);

  const HermiteExpansion f1 = HermiteExpansion::basis(MultiIndex{1});
  const auto df = apply_position_derivative(f1, MultiIndex{0}, MultiIndex{1});
  EXPECT_EQ(df.degree(), 2);
  EXPECT_NEAR(df.coeff(MultiIndex{0}), std::numbers::sqrt2 / 2, 1e-15);
  EXPECT_NEAR(df.coeff(MultiIndex{2}), -1.0, 1e-15);
  for (double x : {-1.7, -0.2, 0.6, 2.3}) {
    const double fd = oracle::derivative([](double t) { return hermite_function(1, t); }, x);
    EXPECT_NEAR(df.evaluate(std::span<const double>(&x, 1)), fd, 1e-10);
  }
}

TEST(PositionDerivative, DerivativeAppliedBeforeMultiplication) {
  // x * d/dx f evaluated pointwise against finite differences.
  std::mt19937_64 rng(5);
  const HermiteExpansion f = random_expansion(1, 8, rng);
  const auto g = apply_position_derivative(f, MultiIndex{2}, MultiIndex{1});
  auto fx = [&](double t) { return f.evaluate(std::span<const double>(&t, 1)); };
  for (double x : {-2.1, -0.4, 0.9, 1.8}) {
    EXPECT_NEAR(g.evaluate(std::span<const double>(&x, 1)), x * x * oracle::derivative(fx, x), 1e-8);
  }
}

TEST(PositionDerivative, DegreeCapGuard) {
  const HermiteExpansion f = HermiteExpansion::basis(MultiIndex{10});
  EXPECT_THROW(apply_position_derivative(f, MultiIndex{5}, MultiIndex{0}, 12), Error);
}

TEST(Harmonic, DiagonalAction) {
  const auto g0 = harmonic_apply(HermiteExpansion::basis(MultiIndex{0}));
  EXPECT_DOUBLE_EQ(g0.coeff(MultiIndex{0}), 1.0);
  const auto g = harmonic_apply(HermiteExpansion::basis(MultiIndex{1, 2}));
  EXPECT_DOUBLE_EQ(g.coeff(MultiIndex{1, 2}), 8.0);
}

TEST(Harmonic, MatchesMinusLaplacianPlusPotential) {
  std::mt19937_64 rng(3);
  for (int dim : {1, 2}) {
    const HermiteExpansion f = random_expansion(dim, 10, rng);
    HermiteExpansion sum(dim, f.degree() + 2);
    for (int j = 0; j < dim; ++j) {
      MultiIndex two = MultiIndex::zero(dim).raised(j).raised(j);
      sum += apply_position_derivative(f, two, MultiIndex::zero(dim));
      sum -= apply_position_derivative(f, MultiIndex::zero(dim), two);
    }
    EXPECT_LE(max_abs_difference(sum, harmonic_apply(f)), 1e-12);
  }
}

TEST(Harmonic, PointwiseAgainstFiniteDifferences) {
  std::mt19937_64 rng(8);
  const HermiteExpansion f = random_expansion(1, 6, rng);
  const HermiteExpansion hf = harmonic_apply(f);
  auto fx = [&](double t) { return f.evaluate(std::span<const double>(&t, 1)); };
  for (double x : {-1.5, 0.1, 1.2}) {
    const double ref = -oracle::second_derivative(fx, x) + x * x * fx(x);
    EXPECT_NEAR(hf.evaluate(std::span<const double>(&x, 1)), ref, 1e-6);
  }
}
