#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "hlab/control_set.hpp"
#include "hlab/expansion.hpp"

namespace hlab {

struct GramOptions {
  double radius = 0.0;  ///< truncation radius per axis; 0 means sqrt(4N + 20)
  double panel = 0.25;  ///< panel width for the composite Gauss-Legendre rule
  int nodes = 32;       ///< nodes per panel
  bool verify = false;  ///< repeat with halved panels and report the difference
  double tol = 1e-10;   ///< allowed difference when verifying
};

/// G_{αβ} = ∫_{ω ∩ [-R,R]ⁿ} Φ_α Φ_β over the E_N enumeration.
struct GramMatrix {
  int N = 0;
  int dim = 1;
  Eigen::MatrixXd G;
  nlohmann::json omega;
  double radius = 0.0;
  double quad_error = -1.0;  ///< max entry change under panel halving, -1 if not verified
  std::size_t points = 0;
};

double default_truncation_radius(int N);

/// Composite Gauss-Legendre on the pieces of ω between its breakpoints (nested
/// axis-0 slicing for n ≥ 2). Symmetrized on return. Throws kQuadratureFailure
/// when verification is requested and the halved-panel result differs by more
/// than options.tol.
GramMatrix gram_matrix(const ControlSet& omega, int N, const GramOptions& options = {});

enum class EigenMethod { kAuto, kInverseIteration, kFull };

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;  ///< |Gv - λv|
  bool used_fallback = false;
};

/// Smallest eigenpair of a symmetric matrix. kAuto runs inverse iteration on an
/// LDLᵀ factorization and falls back to a full decomposition when the
/// factorization or convergence fails. Throws kNonConvergence if the residual
/// exceeds tol·|G|.
EigenPair min_eigenvalue(const Eigen::MatrixXd& G, double tol = 1e-10,
                         EigenMethod method = EigenMethod::kAuto, int max_iterations = 200);

struct SpectralConstant {
  double lambda_min = 0.0;
  double C = 0.0;  ///< λ_min^{-1/2}
  double condition = 0.0;
  HermiteExpansion extremizer{1, 0};
};

/// Throws kDegenerateRestriction when λ_min ≤ 0.
SpectralConstant spectral_constant(const GramMatrix& gram, double tol = 1e-10);

struct GrowthFitReport {
  std::vector<std::pair<int, double>> pairs;
  double epsilon = 1.0;
  double A = 0.0;
  double B = 0.0;
  double r2 = 1.0;
};

/// Least squares fit log C_N ≈ A + B·N^{1-ε/2}. Needs ≥ 5 pairs with increasing N.
GrowthFitReport growth_fit(const std::vector<std::pair<int, double>>& pairs, double epsilon);

nlohmann::json to_json(const GrowthFitReport& report);

}  // namespace hlab
