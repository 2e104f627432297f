#pragma once

#include <iosfwd>
#include <span>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "hlab/expansion.hpp"

namespace hlab {

/// The fractional harmonic oscillator H^s on ℝⁿ, eigenvalue (2|α| + n)^s on Φ_α.
struct EvolutionSpec {
  double s = 1.0;
  int dim = 1;

  EvolutionSpec() = default;
  /// Throws kInvalidArgument unless 1/2 < s ≤ 1.
  EvolutionSpec(double s, int dim);

  double eigenvalue(int level) const;
};

/// Λ = diag((2|α| + n)^s) over the E_N enumeration.
Eigen::VectorXd eigenvalues(const EvolutionSpec& spec, int N);

/// e^{-tH^s} f.
HermiteExpansion evolve(const HermiteExpansion& f, double t, const EvolutionSpec& spec);

/// π_k f: coefficients with |α| > k set to zero.
HermiteExpansion project(const HermiteExpansion& f, int k);
/// (1 - π_k) f
HermiteExpansion complement(const HermiteExpansion& f, int k);

struct DissipationReport {
  int k = 0;
  double t = 0.0;
  double tail_norm = 0.0;  ///< |(1-π_k) e^{-tH^s} f|
  double bound = 0.0;      ///< e^{-t(2k+2+n)^s} |f|
  /// e^{-t(2k+n)^s} |(1-π_k) f|, the first-excluded-level rate replaced by level k
  double bound_level_k = 0.0;
  /// e^{-t k^s} |f|
  double bound_weak = 0.0;
  bool holds = false;
};

DissipationReport dissipation_tail(const HermiteExpansion& f, int k, double t,
                                   const EvolutionSpec& spec);

struct DecayNorm {
  double value = 0.0;  ///< sqrt(Σ e^{2 t0 |α|^e} |c_α|²), or +inf
  double log_value = 0.0;
  bool finite = true;
};

/// (Σ_α e^{2 t0 |α|^exponent} |c_α|²)^{1/2}, accumulated in log space.
DecayNorm gs_decay_norm(const HermiteExpansion& f, double t0, double exponent);

/// Σ_α e^{2·rate·(2|α|+n)^s} |c_α|², in log space (returns the logarithm).
double log_decay_sum(const HermiteExpansion& f, double rate, const EvolutionSpec& spec);

/// CSV rows t,level,abs_coefficient for every level of f evolved to each time.
void write_decay_trace(const HermiteExpansion& f, std::span<const double> times,
                       const EvolutionSpec& spec, std::ostream& out);

nlohmann::json to_json(const DissipationReport& report);

}  // namespace hlab
