#pragma once

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "hlab/semigroup.hpp"
#include "hlab/spectral.hpp"

namespace hlab {

/// f' = -Λ f + G p on E_N, where p(t) ∈ E_k is the control profile, the
/// physical control is u = 1_ω p and G is the Gram matrix of ω, so that the
/// forcing π_N(1_ω u) has coefficients G p and |u|²_{L²} = pᵀ G p.
struct TruncatedSystem {
  EvolutionSpec spec;
  int N = 0;
  Eigen::MatrixXd G;
  Eigen::VectorXd lambda;

  TruncatedSystem(const GramMatrix& gram, const EvolutionSpec& spec);

  /// dim E_k
  Eigen::Index size(int k) const;
};

struct GramianOptions {
  int min_nodes = 32;
  int max_nodes = 4096;
  double rel_tol = 1e-10;
};

struct GramianResult {
  Eigen::MatrixXd W;
  int nodes = 0;
  double rel_change = 0.0;
  double condition = 0.0;
};

/// W_τ = ∫₀^τ e^{-tΛ_k} G_kk e^{-tΛ_k} dt by Gauss-Legendre, doubling the node
/// count until the relative Frobenius change is at most rel_tol.
GramianResult gramian(const TruncatedSystem& sys, double tau, int k, const GramianOptions& options = {});

/// One controlled interval: p(t) = -e^{-(t1 - t)Λ_k} μ on [t0, t1].
struct ControlSegment {
  double t0 = 0.0;
  double t1 = 0.0;
  int level = 0;
  Eigen::VectorXd mu;
  double cost = 0.0;  ///< μᵀ W μ = ∫ pᵀ G_kk p
  double condition = 0.0;
};

struct ControlSignal {
  std::vector<ControlSegment> segments;
  double total_cost = 0.0;
};

/// p(t) on the segment containing t, or an empty vector outside every segment.
Eigen::VectorXd control_profile(const TruncatedSystem& sys, const ControlSignal& signal, double t);
/// Coefficients of π_N(1_ω u(t)) = G_{:,k} p(t) in E_N.
Eigen::VectorXd forcing(const TruncatedSystem& sys, const ControlSignal& signal, double t);

/// Minimal-energy control steering g ∈ E_k to 0 in time τ under the E_k
/// dynamics. Throws kSingularGramian when cond(W) exceeds condition_cap.
ControlSegment min_energy_control(const TruncatedSystem& sys, const Eigen::VectorXd& g, double tau,
                                  int k, double condition_cap = 1e12,
                                  const GramianOptions& options = {});

struct SimulationOptions {
  int nodes = 32;   ///< Gauss-Legendre nodes per panel of a controlled segment
  int panels = 4;   ///< panels per controlled segment
};

/// Exact propagator between segments, Duhamel quadrature on segments.
Eigen::VectorXd simulate(const TruncatedSystem& sys, const Eigen::VectorXd& f0,
                         const ControlSignal& signal, double T, const SimulationOptions& options = {});

/// ∫ pᵀ G_kk p over all segments by quadrature; equals total_cost for HUM controls.
double quadrature_cost(const TruncatedSystem& sys, const ControlSignal& signal,
                       const SimulationOptions& options = {});

struct ControlProblem {
  double T = 1.0;
  double delta = 0.0;
  Eigen::VectorXd f0;
};

struct LRStage {
  double start = 0.0;
  double control_end = 0.0;
  double end = 0.0;
  int level = 0;
  int planned_level = 0;
  double cost = 0.0;
  double low_residual = 0.0;  ///< |π_k f| after the controlled half
  double residual = 0.0;      ///< |f| at the end of the stage
  double condition = 0.0;
};

struct LRSchedule {
  /// stage j has length T·numerators[j] / 2^J
  std::vector<long long> numerators;
  int J = 0;
  std::vector<int> levels;
  double a = 0.5;
  double b = 1.0;
};

/// Dyadic intervals T/2, T/4, ..., T/2^J, T/2^J at levels min(2^j, N).
LRSchedule lebeau_robbiano_schedule(int N, double s, double delta);

struct LROptions {
  double tol = 1e-6;
  double condition_cap = 1e12;
  SimulationOptions simulation;
  GramianOptions gramian;
};

struct LRResult {
  LRSchedule schedule;
  ControlSignal signal;
  std::vector<LRStage> stages;
  double terminal_residual = 0.0;     ///< |f(T)| / |f0|
  double resimulated_residual = 0.0;  ///< same at doubled quadrature resolution
  bool success = false;
  std::string failure;  ///< set when a stage aborted; stages holds the partial trace
};

/// On the first half of each stage the minimal-energy control kills π_k of
/// the current state; the second half evolves freely.
LRResult lebeau_robbiano_synthesize(const TruncatedSystem& sys, const ControlProblem& problem,
                                    const LROptions& options = {});

struct HUMResult {
  ControlSignal signal;
  double terminal_residual = 0.0;
  double duality_cost = 0.0;  ///< f0ᵀ e^{-TΛ} W⁻¹ e^{-TΛ} f0
};

/// Minimal-energy control of the full E_N system over [0, T].
HUMResult one_shot_hum(const TruncatedSystem& sys, const ControlProblem& problem,
                       const LROptions& options = {});

struct ObservabilityReport {
  double T = 0.0;
  int N = 0;
  /// best C with |e^{-TΛ}g|² ≤ C ∫₀ᵀ |e^{-tΛ}g|²_G dt on E_N
  double C_T = 0.0;
  int nodes = 0;
};

/// C_T = λ_max(L⁻¹ e^{-2TΛ} L⁻ᵀ) with W_T = L Lᵀ.
ObservabilityReport observability_lower_bound(const TruncatedSystem& sys, double T,
                                              const GramianOptions& options = {});

struct BlowupFit {
  double A = 0.0;
  double C = 0.0;
  double kappa = 0.0;
  double r2 = 0.0;
  bool kappa_at_bound = false;
  /// same search for log C_T ≈ C/T^κ without the constant term
  double C_bare = 0.0;
  double kappa_bare = 0.0;
  double r2_bare = 0.0;
  bool kappa_bare_at_bound = false;
  /// (1+δ)(2 m1 s + 1)/(2s - 1 - δ) and (1+δ) m1/(2s - 1 - δ), reported only
  double exponent_full = 0.0;
  double exponent_simple = 0.0;
};

/// log C_T ≈ A + C/T^κ: linear least squares in (A, C) for each κ, 1-D search in κ over [1e-3, 10].
/// A minimiser on the search boundary is flagged. The fit without A is reported alongside.
BlowupFit blowup_fit(const std::vector<std::pair<double, double>>& T_and_C, double s, double delta,
                     double m1 = 1.0);

nlohmann::json to_json(const LRResult& result);
nlohmann::json to_json(const BlowupFit& fit);

}  // namespace hlab
