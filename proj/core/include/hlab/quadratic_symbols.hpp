#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

namespace hlab {

/// q(X) = Xᵀ Q X with X = (x, ξ) ∈ ℝ²ⁿ and Q complex symmetric 2n×2n.
struct QuadraticForm {
  int dim = 1;
  Eigen::MatrixXcd Q;

  QuadraticForm() = default;
  explicit QuadraticForm(Eigen::MatrixXcd q);

  std::complex<double> operator()(const Eigen::VectorXd& X) const;
  /// Re q ≥ 0, checked as λ_min(Re Q) ≥ -tol.
  bool real_part_nonnegative(double tol = 1e-12) const;
};

/// [[0, I], [-I, 0]]; the symplectic form σ(X, Z) = ⟨ξ, y⟩ - ⟨x, η⟩ equals -Xᵀ J Z.
Eigen::MatrixXd standard_symplectic(int n);

struct HamiltonMap {
  Eigen::MatrixXcd F;
  /// max |Q + J F| reached by the returned map
  double consistency = 0.0;

  int dim() const { return static_cast<int>(F.rows() / 2); }
  Eigen::MatrixXd real_part() const { return F.real(); }
  Eigen::MatrixXd imag_part() const { return F.imag(); }
};

/// F = ½[[∇_ξ∇_x q, ∇_ξ² q], [-∇_x² q, -∇_x∇_ξ q]], with the Hessian blocks read
/// from Q. A second Hessian obtained by polarizing evaluations of q must give
/// the same map, and Q + J F must vanish, both to `tol`. Throws
/// kInconsistentHessian for non-symmetric input or a failed check.
HamiltonMap hamilton_map(const QuadraticForm& q, double tol = 1e-12);

struct SingularSpaceResult {
  Eigen::MatrixXd basis;          ///< 2n × dim S, orthonormal columns
  std::optional<int> k0;          ///< first truncation with trivial intersection
  std::vector<int> truncation_dims;  ///< dim of ∩_{j ≤ k} Ker at k = 0..2n-1
  bool ambiguous = false;         ///< a singular value fell inside the tolerance band
  double tol = 0.0;

  int dim() const { return static_cast<int>(basis.cols()); }
};

/// S = ∩_{j=0}^{2n-1} Ker[Re F (Im F)^j] ∩ ℝ²ⁿ. Each block is scaled to unit
/// Frobenius norm; ranks are decided by singular values above tol·σ_max.
SingularSpaceResult singular_space(const HamiltonMap& F, double tol = 1e-9);

/// |q(v)| > tol for every sampled unit vector v of span(basis), including the
/// basis vectors themselves. Vacuously true when the basis is empty.
bool partial_ellipticity_check(const QuadraticForm& q, const Eigen::MatrixXd& basis, int samples,
                               double tol = 1e-10, std::uint64_t seed = 1);

struct NamedForm {
  std::string name;
  QuadraticForm form;
};

QuadraticForm harmonic_form(int n);
/// e^{iθ}(|x|² + |ξ|²), |θ| < π/2.
QuadraticForm rotated_harmonic_form(int n, double theta);
/// |ξ|²
QuadraticForm free_laplacian_form(int n);
/// η² + v² + i(vξ - xη) on X = (x, v, ξ, η).
QuadraticForm kfp_form();
/// x² + iξ²
QuadraticForm x2_plus_i_xi2_form();

std::vector<NamedForm> form_catalog();
/// Throws kInvalidArgument for unknown names.
QuadraticForm catalog_form(const std::string& name);

/// Row-major matrix of [re, im] pairs.
QuadraticForm quadratic_form_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SingularSpaceResult& result);

}  // namespace hlab
