#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hlab/control_set.hpp"
#include "hlab/density.hpp"

namespace hlab {

using Point = std::vector<double>;

struct QuadratureSpec {
  double rel_tol = 1e-6;
  double abs_tol = 1e-13;
};

/// Volume of the Euclidean ball of the given radius in ℝ^dim.
double ball_volume(int dim, double radius);

/// |ω ∩ B(center, radius)|. Exact in 1-D; in 2-D and 3-D the ball is sliced
/// along axis 0 and the slice measures are integrated in the angle variable
/// x0 = c0 + r sin θ, with every slice change point as a breakpoint.
double intersection_measure(const ControlSet& omega, std::span<const double> center,
                            double radius, const QuadratureSpec& quad = {});

/// First `count` points of the Halton sequence (bases 2, 3, 5) mapped into box.
std::vector<Point> halton_points(const Box& box, int count);

struct DensityReport {
  bool lipschitz_ok = false;
  bool bounds_ok = false;
  double worst_lipschitz = 0.0;  ///< largest |ρ(x)-ρ(y)| / |x-y| seen
  double worst_ratio = 0.0;      ///< largest of ρ/(R⟨x⟩^{1-ε}) and m/ρ
  int samples = 0;
  std::size_t pairs = 0;
};

/// Checks m ≤ ρ ≤ R⟨x⟩^{1-ε} and the 1/2-Lipschitz condition on a Halton
/// sample of the box. Every pair is compared for up to 2048 samples; above
/// that only pairs within a sliding window along axis 0.
DensityReport density_validate(const DensityFn& rho, const Box& box, int samples);

/// Halton points plus the midpoints of the complement gaps of ω inside box
/// (1-D), or box points placed at axis-0 gap midpoints (n ≥ 2).
std::vector<Point> thickness_centers(const ControlSet& omega, const Box& box, int halton_count);

struct ThicknessReport {
  double gamma_hat = 1.0;
  Point worst_center;
  std::vector<double> ratios;  ///< one per center
  /// Always true: a finite sample cannot certify thickness on all of ℝⁿ.
  bool finite_sample = true;
};

ThicknessReport thickness_estimate(const ControlSet& omega, const DensityFn& rho,
                                   const std::vector<Point>& centers,
                                   const QuadratureSpec& quad = {});

struct Covering {
  int dim = 1;
  std::vector<Point> centers;
  std::vector<double> radii;
  long overlap_bound = 33;
};

struct CoveringOptions {
  double spacing = 0.0;  ///< candidate grid step; 0 picks 0.1·m/√n
  std::size_t max_candidates = 4'000'000;
};

/// Greedy selection on a candidate grid: a candidate x is kept iff
/// |x - x_k| ≥ (ρ(x) + ρ(x_k))/3 for every center kept so far, so the balls
/// B(x_k, ρ(x_k)/3) are pairwise disjoint. Throws kCoverageFailure when the
/// grid is too coarse for min ρ or the balls B(x_k, ρ(x_k)) miss a candidate.
Covering covering_generate(const DensityFn& rho, const Box& box, const CoveringOptions& options = {});

struct CoveringCheck {
  bool covered = false;
  bool disjoint = false;
  int max_multiplicity = 0;
  std::size_t points = 0;
  std::size_t uncovered = 0;
  std::vector<std::size_t> histogram;  ///< histogram[m] = #points of multiplicity m
};

/// Coverage and multiplicity on a uniform grid with points_per_axis^n points,
/// plus the exact pairwise disjointness test of the third-radius balls.
CoveringCheck covering_verify(const Covering& covering, const Box& box, int points_per_axis);

/// CSV with header x0[,x1[,x2]],radius.
void write_covering_csv(const Covering& covering, std::ostream& out);

struct TransferReport {
  double gamma = 0.0;
  double predicted = 0.0;  ///< 1 - (1-γ)6ⁿ
  bool hypothesis_ok = false;  ///< γ > 1 - 6^{-n} and ρ1 ≤ ρ2 on the centers
  double measured_rho1 = 0.0;
  double measured_rho2 = 0.0;
  bool premise_ok = false;  ///< measured thickness w.r.t. ρ1 is at least γ - tol
  bool holds = false;       ///< measured thickness w.r.t. ρ2 is at least predicted - tol
};

TransferReport thickness_transfer_check(const ControlSet& omega, const DensityFn& rho1,
                                        const DensityFn& rho2, double gamma,
                                        const std::vector<Point>& centers, double tol = 1e-3,
                                        const QuadratureSpec& quad = {});

/// 1-D set adapted to ρ: consecutive cells [a, a + 2ρ(a)) starting at 0, of
/// which the first `kept_fraction` is kept, continued up to |x| ≤ extent and
/// mirrored to the negative axis.
ControlSet density_gapped_set(const DensityFn& rho, double extent, double kept_fraction = 0.5);

nlohmann::json to_json(const DensityReport& report);
nlohmann::json to_json(const CoveringCheck& check);
nlohmann::json to_json(const TransferReport& report);

}  // namespace hlab
