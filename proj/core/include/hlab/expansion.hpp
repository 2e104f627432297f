#pragma once

#include <memory>
#include <random>
#include <span>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "hlab/multi_index.hpp"

namespace hlab {

/// Cap on the total degree produced by composite operators such as x^α ∂^β.
inline constexpr int kDefaultDegreeCap = 2048;

/// An element of E_N = span{Φ_α : |α| ≤ N} stored as a dense coefficient vector
/// over the canonical IndexSet enumeration. Since (Φ_α) is orthonormal, the L²
/// norm is the Euclidean norm of the coefficients.
class HermiteExpansion {
 public:
  HermiteExpansion(int dim, int degree);
  HermiteExpansion(int dim, int degree, Eigen::VectorXd coeffs);

  /// Φ_α as an element of E_degree (degree defaults to |α|).
  static HermiteExpansion basis(const MultiIndex& alpha, int degree = -1);

  int dim() const { return indices_->dim(); }
  int degree() const { return indices_->degree(); }
  std::size_t size() const { return indices_->size(); }
  const IndexSet& indices() const { return *indices_; }

  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  Eigen::VectorXd& coeffs() { return coeffs_; }

  double coeff(const MultiIndex& alpha) const;
  void set_coeff(const MultiIndex& alpha, double value);
  void add_coeff(const MultiIndex& alpha, double value);

  double norm() const { return coeffs_.norm(); }
  double squared_norm() const { return coeffs_.squaredNorm(); }

  /// Same function embedded in E_degree; degree may only grow.
  HermiteExpansion embedded(int degree) const;

  /// Pointwise value f(x).
  double evaluate(std::span<const double> x) const;

  HermiteExpansion& operator+=(const HermiteExpansion& other);
  HermiteExpansion& operator-=(const HermiteExpansion& other);
  HermiteExpansion& operator*=(double scale);

 private:
  std::shared_ptr<const IndexSet> indices_;
  Eigen::VectorXd coeffs_;
};

HermiteExpansion operator+(HermiteExpansion a, const HermiteExpansion& b);
HermiteExpansion operator-(HermiteExpansion a, const HermiteExpansion& b);
HermiteExpansion operator*(double scale, HermiteExpansion f);

/// Unit-norm element of E_degree with independent standard normal coefficients.
HermiteExpansion random_expansion(int dim, int degree, std::mt19937_64& rng);

/// Largest coefficient difference after embedding both into a common degree.
double max_abs_difference(const HermiteExpansion& a, const HermiteExpansion& b);

enum class Ladder { kRaise, kLower };

/// a_{j,+} (raise) or a_{j,-} (lower) applied along `axis`:
///   a_+ Φ_α = sqrt(α_j + 1) Φ_{α+e_j},  a_- Φ_α = sqrt(α_j) Φ_{α-e_j}.
/// The result lives in E_{N+1} (raise) or E_{max(N-1,0)} (lower).
HermiteExpansion apply_ladder(const HermiteExpansion& f, int axis, Ladder which);

/// x^α ∂^β f computed exactly in coefficient space using
/// x_j = (a_{j,+} + a_{j,-}) / sqrt(2) and ∂_j = (a_{j,-} - a_{j,+}) / sqrt(2).
/// The derivative is applied first. Throws kDegreeOverflow when
/// N + |α| + |β| exceeds `degree_cap`.
HermiteExpansion apply_position_derivative(const HermiteExpansion& f, const MultiIndex& alpha,
                                           const MultiIndex& beta,
                                           int degree_cap = kDefaultDegreeCap);

/// H f = (-Δ + |x|²) f, diagonal with eigenvalue 2|α| + n on Φ_α.
HermiteExpansion harmonic_apply(const HermiteExpansion& f);

/// JSON form {dim, degree, coeffs: [[[α_1,...,α_n], value], ...]}; only
/// non-zero coefficients are written.
nlohmann::json to_json(const HermiteExpansion& f);
HermiteExpansion expansion_from_json(const nlohmann::json& j);

}  // namespace hlab
