#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hlab/error.hpp"
#include "hlab/semigroup.hpp"

using namespace hlab;

TEST(Evolution, SpecValidation) {
  EXPECT_THROW(EvolutionSpec(0.5, 1), Error);
  EXPECT_THROW(EvolutionSpec(1.01, 1), Error);
  EXPECT_NO_THROW(EvolutionSpec(0.51, 3));
  EXPECT_NEAR(EvolutionSpec(0.6, 2).eigenvalue(3), std::pow(8.0, 0.6), 1e-14);
  const Eigen::VectorXd ev = eigenvalues(EvolutionSpec(1.0, 2), 2);
  EXPECT_EQ(ev.size(), 6);
  EXPECT_DOUBLE_EQ(ev(0), 2.0);
  EXPECT_DOUBLE_EQ(ev(5), 6.0);
}

TEST(Evolution, Examples) {
  std::mt19937_64 rng(1);
  const HermiteExpansion f = random_expansion(1, 10, rng);
  EXPECT_EQ(max_abs_difference(evolve(f, 0.0, EvolutionSpec(1, 1)), f), 0.0);
  const auto g = evolve(HermiteExpansion::basis(MultiIndex{0}), 1.0, EvolutionSpec(1, 1));
  EXPECT_NEAR(g.coeff(MultiIndex{0}), std::exp(-1.0), 1e-16);
  const auto h = evolve(HermiteExpansion::basis(MultiIndex{3}), 0.5, EvolutionSpec(0.6, 1));
  EXPECT_NEAR(h.coeff(MultiIndex{3}), std::exp(-0.5 * std::exp(0.6 * std::log(7.0))), 1e-15);
}

TEST(Evolution, SemigroupLaw) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> time(0.0, 2.0), power(0.51, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const int dim = 1 + trial % 2;
    const EvolutionSpec spec(power(rng), dim);
    const HermiteExpansion f = random_expansion(dim, 12, rng);
    const double t1 = time(rng), t2 = time(rng);
    const auto a = evolve(evolve(f, t1, spec), t2, spec);
    const auto b = evolve(f, t1 + t2, spec);
    EXPECT_LE((a - b).norm(), 1e-12);
  }
}

TEST(Evolution, ContractionAndCommutation) {
  std::mt19937_64 rng(9);
  const EvolutionSpec spec(0.75, 2);
  const HermiteExpansion f = random_expansion(2, 10, rng);
  for (double t : {0.01, 0.3, 2.0}) {
    EXPECT_LT(evolve(f, t, spec).norm(), f.norm());
    EXPECT_EQ(max_abs_difference(evolve(project(f, 4), t, spec), project(evolve(f, t, spec), 4)), 0.0);
  }
}

TEST(Projection, Examples) {
  HermiteExpansion f(1, 1);
  f.set_coeff(MultiIndex{0}, 1.0);
  f.set_coeff(MultiIndex{1}, 1.0);
  const auto p = project(f, 0);
  EXPECT_EQ(p.coeff(MultiIndex{0}), 1.0);
  EXPECT_EQ(p.coeff(MultiIndex{1}), 0.0);
  std::mt19937_64 rng(3);
  const HermiteExpansion g = random_expansion(2, 9, rng);
  for (int k : {0, 3, 9}) {
    EXPECT_EQ(max_abs_difference(project(project(g, k), k), project(g, k)), 0.0);
    EXPECT_NEAR(project(g, k).squared_norm() + complement(g, k).squared_norm(), g.squared_norm(), 1e-15);
  }
}

TEST(Dissipation, SingleModeSharpness) {
  const HermiteExpansion f = HermiteExpansion::basis(MultiIndex{3});
  const auto r = dissipation_tail(f, 2, 0.3, EvolutionSpec(1, 1));
  EXPECT_NEAR(r.tail_norm, std::exp(-0.3 * 7), 1e-15);
  EXPECT_NEAR(r.bound, r.tail_norm, 1e-15);
  EXPECT_TRUE(r.holds);
  for (double s : {0.6, 1.0}) {
    for (int k : {0, 4, 9}) {
      const HermiteExpansion mode = HermiteExpansion::basis(MultiIndex{k + 1}, 12);
      for (double t : {0.01, 0.1, 1.0}) {
        const auto d = dissipation_tail(mode, k, t, EvolutionSpec(s, 1));
        EXPECT_NEAR(d.tail_norm, std::exp(-t * std::pow(2 * (k + 1) + 1, s)), 1e-12);
        EXPECT_LE(std::abs(d.tail_norm - d.bound), 1e-12);
      }
    }
  }
}

TEST(Dissipation, RandomInputsAndLowModes) {
  std::mt19937_64 rng(4);
  const EvolutionSpec spec(0.8, 1);
  const HermiteExpansion low = random_expansion(1, 5, rng);
  EXPECT_EQ(dissipation_tail(low, 5, 0.2, spec).tail_norm, 0.0);
  for (int trial = 0; trial < 30; ++trial) {
    const HermiteExpansion f = random_expansion(1, 25, rng);
    for (double t : {0.01, 0.05, 0.1, 0.5, 1.0}) {
      const auto r = dissipation_tail(f, 10, t, spec);
      EXPECT_LE(r.tail_norm, r.bound + 1e-12);
      EXPECT_LE(r.tail_norm, r.bound_level_k + 1e-12);
      EXPECT_LE(r.bound, r.bound_weak + 1e-15);
      EXPECT_TRUE(r.holds);
    }
  }
}

TEST(DecayNorm, GroundStateAndSmoothing) {
  const auto g0 = gs_decay_norm(HermiteExpansion::basis(MultiIndex{0}), 0.7, 1.0);
  EXPECT_TRUE(g0.finite);
  EXPECT_NEAR(g0.value, 1.0, 1e-15);

  std::mt19937_64 rng(10);
  const HermiteExpansion g = random_expansion(1, 40, rng);
  const EvolutionSpec spec(1.0, 1);
  const HermiteExpansion f = evolve(g, 0.1, spec);
  const auto d = gs_decay_norm(f, 0.05, 1.0);
  EXPECT_TRUE(d.finite);
  double direct = 0.0;
  for (std::size_t p = 0; p < f.size(); ++p) {
    const double c = f.coeffs()(static_cast<Eigen::Index>(p));
    direct += std::exp(2 * 0.05 * f.indices().order(p)) * c * c;
  }
  EXPECT_NEAR(d.value, std::sqrt(direct), 1e-12 * std::sqrt(direct));
  double prev = std::numeric_limits<double>::infinity();
  for (double t : {0.0, 0.05, 0.1, 0.2, 0.4, 0.8}) {
    const double v = gs_decay_norm(evolve(g, t, spec), 0.05, 1.0).value;
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(DecayNorm, LogSpaceAvoidsOverflow) {
  const HermiteExpansion f = HermiteExpansion::basis(MultiIndex{2000}, 2000);
  const auto d = gs_decay_norm(f, 1.0, 1.0);
  EXPECT_NEAR(d.log_value, 2000.0, 1e-9);
  EXPECT_FALSE(d.finite);
}

TEST(DecayTrace, CsvShape) {
  std::ostringstream out;
  const double times[] = {0.0, 0.5};
  write_decay_trace(HermiteExpansion::basis(MultiIndex{1, 1}), times, EvolutionSpec(1, 2), out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,level,abs_coefficient");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_GT(rows, 0);
}
