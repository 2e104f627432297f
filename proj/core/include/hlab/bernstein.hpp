#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hlab/expansion.hpp"

namespace hlab {

struct BernsteinCheck {
  int N = 0;
  MultiIndex alpha;
  MultiIndex beta;
  double lhs = 0.0;  ///< |x^α ∂^β f|
  double rhs = 0.0;  ///< 2^{m/2} sqrt((N+m)!/N!) |f|, m = |α|+|β|
  double ratio = 0.0;
};

/// log(2^{m/2} sqrt((N+m)!/N!)).
double log_crude_bound(int N, int m);

BernsteinCheck crude_bernstein_check(const HermiteExpansion& f, const MultiIndex& alpha,
                                     const MultiIndex& beta);

/// Every pair (α, β) with |α|+|β| ≤ max_order.
std::vector<BernsteinCheck> crude_bernstein_sweep(const HermiteExpansion& f, int max_order);

/// Every (α, β) in ℕⁿ × ℕⁿ with |α|+|β| ≤ max_order.
std::vector<std::pair<MultiIndex, MultiIndex>> derivative_pairs(int dim, int max_order);

struct BernsteinConstantFit {
  double epsilon = 1.0;
  double delta = 1.0;
  double K_tilde = 1.0;
  double K = 1.0;
  int max_order = 0;
  /// r_m: worst log excess at order m before the constants are applied
  std::vector<double> residuals;
  bool certified = false;
  std::size_t evaluations = 0;
};

/// Smallest constants K̃, K ≥ 1 for which
///   |x^α ∂^β f| ≤ K̃ (δK)^m Γ(m/(2-ε) + 2) exp(N^{1-ε/2} / δ^{2-ε}) |f|
/// holds on the sample for every m = |α|+|β| ≤ max_order, where "smallest"
/// minimizes Σ_m log(K̃ K^m). This is a two-variable linear program in
/// (log K̃, log K), solved by vertex enumeration.
BernsteinConstantFit bernstein_constant_fit(const std::vector<HermiteExpansion>& samples, double epsilon, double delta,
                     int max_order = 6);

struct GammaReport {
  std::size_t points = 0;
  bool power_bound_ok = false;  ///< x^y ≤ Γ(y+1) e^x
  double power_bound_margin = 0.0;  ///< smallest log(rhs) - log(lhs)
  double r = 1.0;
  bool beta_bound_ok = false;  ///< Γ(x)Γ(y) ≤ B(r,r)/(2r) Γ(x+y+1) for x, y ≥ r
  double beta_bound_margin = 0.0;
  /// C_p = sup_{x ≥ 1} Γ(x)^{1/p} / ((p e)^{x/p} Γ(x/p)) over the grid, p = 2, 3
  double C2 = 0.0;
  double C3 = 0.0;
};

GammaReport gamma_inequality_check(std::span<const double> xs, std::span<const double> ys,
                                   double r = 1.0);

/// C^k_{l1,l2} with (∂+x)(-∂+x)(∂+x)··· (k+1 factors) = Σ C^k x^{l1} ∂^{l2};
/// k = -1 gives the identity.
std::map<std::pair<int, int>, double> ladder_product_coefficients(int k);

/// Largest |C^k_{l1,l2}| / (3^k (k+1)^{(k+1-l1-l2)/2}) over all coefficients.
double ladder_product_bound_ratio(int k);

struct ExpansionTerm {
  MultiIndex alpha;
  MultiIndex beta;
  double c = 0.0;
};

/// (H + n)^k = Σ c^k_{αβ} x^α ∂^β.
struct OperatorExpansion {
  int k = 0;
  int dim = 1;
  std::vector<ExpansionTerm> terms;
};

inline constexpr int kMaxExpansionPower = 12;

/// Throws kDegreeOverflow above kMaxExpansionPower.
OperatorExpansion harmonic_power_expand(int k, int n);

/// Σ c x^α ∂^β f, each term computed exactly by ladder calculus.
HermiteExpansion apply_expansion(const OperatorExpansion& op, const HermiteExpansion& f);

/// 3^{2k-n} n^k (2k)^{(2k-|α+β|)/2}; stated for k ≥ 1.
double expansion_coefficient_bound(int k, int n, int order);

/// Largest |c| / bound over the stored terms (k ≥ 1).
double expansion_bound_ratio(const OperatorExpansion& op);

enum class SeminormMethod { kAuto, kExpansion, kQuadrature };

/// |⟨x⟩^r ∂^β f|. Integer r uses Σ_{γ ∈ ℕ^{n+1}, |γ|=r} r!/γ! |x^γ̃ ∂^β f|²;
/// otherwise (or when forced) tensor Gauss-Legendre quadrature, n ≤ 2.
double weighted_seminorm(const HermiteExpansion& f, double r, const MultiIndex& beta,
                         SeminormMethod method = SeminormMethod::kAuto);

nlohmann::json to_json(const BernsteinConstantFit& fit);
nlohmann::json to_json(const GammaReport& report);

}  // namespace hlab
