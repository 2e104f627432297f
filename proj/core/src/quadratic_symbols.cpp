#include "hlab/quadratic_symbols.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <nlohmann/json.hpp>

#include "hlab/error.hpp"

namespace hlab {

namespace {

using cd = std::complex<double>;

double max_abs(const Eigen::MatrixXcd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace

QuadraticForm::QuadraticForm(Eigen::MatrixXcd q) : Q(std::move(q)) {
  require(Q.rows() == Q.cols() && Q.rows() >= 2 && Q.rows() % 2 == 0,
          ErrorCode::kDimensionMismatch, "quadratic form matrix must be 2n x 2n");
  dim = static_cast<int>(Q.rows() / 2);
}

std::complex<double> QuadraticForm::operator()(const Eigen::VectorXd& X) const {
  require(X.size() == Q.rows(), ErrorCode::kDimensionMismatch, "phase-space point has wrong size");
  const Eigen::VectorXcd Xc = X.cast<cd>();
  return Xc.transpose() * Q * Xc;
}

bool QuadraticForm::real_part_nonnegative(double tol) const {
  const Eigen::MatrixXd re = 0.5 * (Q.real() + Q.real().transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(re, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

Eigen::MatrixXd standard_symplectic(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n).setIdentity();
  J.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return J;
}

HamiltonMap hamilton_map(const QuadraticForm& q, double tol) {
  const Eigen::MatrixXcd& Q = q.Q;
  const int n = q.dim;
  const double scale = std::max(1.0, max_abs(Q));
  if (max_abs(Q - Q.transpose()) > tol * scale) {
    fail(ErrorCode::kInconsistentHessian, "quadratic form matrix is not symmetric");
  }

  // Hessian blocks of q are twice the blocks of Q.
  const Eigen::MatrixXcd hxx = 2.0 * Q.topLeftCorner(n, n);
  const Eigen::MatrixXcd hxxi = 2.0 * Q.topRightCorner(n, n);
  const Eigen::MatrixXcd hxix = 2.0 * Q.bottomLeftCorner(n, n);
  const Eigen::MatrixXcd hxixi = 2.0 * Q.bottomRightCorner(n, n);
  HamiltonMap map;
  map.F.resize(2 * n, 2 * n);
  map.F << 0.5 * hxix, 0.5 * hxixi, -0.5 * hxx, -0.5 * hxxi;

  // Independent route: Hessian by polarization of point evaluations, F = J·Hess/2.
  const int d = 2 * n;
  Eigen::MatrixXcd hess(d, d);
  std::vector<cd> diag(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) diag[i] = q(Eigen::VectorXd::Unit(d, i));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      const Eigen::VectorXd e = Eigen::VectorXd::Unit(d, i) + Eigen::VectorXd::Unit(d, j);
      hess(i, j) = i == j ? 2.0 * diag[i] : q(e) - diag[i] - diag[j];
    }
  }
  const Eigen::MatrixXcd J = standard_symplectic(n).cast<cd>();
  const Eigen::MatrixXcd F2 = 0.5 * J * hess;
  if (max_abs(map.F - F2) > tol * scale) {
    fail(ErrorCode::kInconsistentHessian, "block and polarized Hamilton maps disagree");
  }
  map.consistency = max_abs(Q + J * map.F);
  if (map.consistency > tol * scale) {
    fail(ErrorCode::kInconsistentHessian, "Hamilton map does not reproduce the polarized form");
  }
  return map;
}

SingularSpaceResult singular_space(const HamiltonMap& map, double tol) {
  require(tol > 0.0, ErrorCode::kInvalidArgument, "tolerance must be positive");
  const Eigen::MatrixXd A = map.real_part();
  const Eigen::MatrixXd B = map.imag_part();
  const int d = static_cast<int>(A.rows());
  SingularSpaceResult result;
  result.tol = tol;

  Eigen::MatrixXd stacked(0, d);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(d, d);
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Identity(d, d);
  for (int j = 0; j < d; ++j) {
    Eigen::MatrixXd block = A * power;
    const double norm = block.norm();
    if (norm > 0.0) block /= norm;
    Eigen::MatrixXd grown(stacked.rows() + d, d);
    grown << stacked, block;
    stacked = std::move(grown);
    power = power * B;
    const double pn = power.norm();
    if (pn > 0.0) power /= pn;

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(stacked, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i) {
      if (smax > 0.0) {
        const double rel = sv(i) / smax;
        if (rel > tol) ++rank;
        if (rel >= tol * 1e-2 && rel <= tol * 1e2) result.ambiguous = true;
      }
    }
    kernel = svd.matrixV().rightCols(d - rank);
    result.truncation_dims.push_back(d - rank);
    if (rank == d && !result.k0) result.k0 = j;
  }
  result.basis = kernel;
  return result;
}

bool partial_ellipticity_check(const QuadraticForm& q, const Eigen::MatrixXd& basis, int samples,
                               double tol, std::uint64_t seed) {
  if (basis.cols() == 0) return true;
  require(basis.rows() == q.Q.rows(), ErrorCode::kDimensionMismatch,
          "basis vectors have wrong length");
  for (int i = 0; i < basis.cols(); ++i) {
    if (std::abs(q(basis.col(i).normalized())) <= tol) return false;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int s = 0; s < samples; ++s) {
    Eigen::VectorXd c(basis.cols());
    for (int i = 0; i < c.size(); ++i) c(i) = normal(rng);
    const Eigen::VectorXd v = (basis * c).normalized();
    if (std::abs(q(v)) <= tol) return false;
  }
  return true;
}

QuadraticForm harmonic_form(int n) {
  return QuadraticForm(Eigen::MatrixXcd::Identity(2 * n, 2 * n));
}

QuadraticForm rotated_harmonic_form(int n, double theta) {
  require(std::abs(theta) < std::acos(0.0), ErrorCode::kInvalidArgument,
          "rotation angle must satisfy |theta| < pi/2");
  return QuadraticForm(std::polar(1.0, theta) * Eigen::MatrixXcd::Identity(2 * n, 2 * n));
}

QuadraticForm free_laplacian_form(int n) {
  Eigen::MatrixXcd Q = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  Q.bottomRightCorner(n, n).setIdentity();
  return QuadraticForm(Q);
}

QuadraticForm kfp_form() {
  // X = (x, v, ξ, η)
  const cd i(0.0, 1.0);
  Eigen::MatrixXcd Q = Eigen::MatrixXcd::Zero(4, 4);
  Q(1, 1) = 1.0;
  Q(3, 3) = 1.0;
  Q(1, 2) = Q(2, 1) = 0.5 * i;
  Q(0, 3) = Q(3, 0) = -0.5 * i;
  return QuadraticForm(Q);
}

QuadraticForm x2_plus_i_xi2_form() {
  Eigen::MatrixXcd Q = Eigen::MatrixXcd::Zero(2, 2);
  Q(0, 0) = 1.0;
  Q(1, 1) = cd(0.0, 1.0);
  return QuadraticForm(Q);
}

std::vector<NamedForm> form_catalog() {
  return {{"harmonic", harmonic_form(1)},
          {"rotated-harmonic", rotated_harmonic_form(1, 0.5)},
          {"free-laplacian", free_laplacian_form(1)},
          {"kfp", kfp_form()},
          {"x2-plus-i-xi2", x2_plus_i_xi2_form()}};
}

QuadraticForm catalog_form(const std::string& name) {
  for (NamedForm& f : form_catalog()) {
    if (f.name == name) return std::move(f.form);
  }
  fail(ErrorCode::kInvalidArgument, "unknown quadratic form '" + name + "'");
}

QuadraticForm quadratic_form_from_json(const nlohmann::json& j) {
  require(j.is_array() && !j.empty(), ErrorCode::kConfigError,
          "quadratic form must be a non-empty array of rows");
  const auto d = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXcd Q(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    require(row.is_array() && static_cast<Eigen::Index>(row.size()) == d, ErrorCode::kConfigError,
            "quadratic form row " + std::to_string(r) + " has wrong length");
    for (Eigen::Index c = 0; c < d; ++c) {
      const auto& e = row[static_cast<std::size_t>(c)];
      if (e.is_number()) {
        Q(r, c) = e.get<double>();
      } else {
        require(e.is_array() && e.size() == 2, ErrorCode::kConfigError,
                "quadratic form entries must be numbers or [re, im] pairs");
        Q(r, c) = cd(e[0].get<double>(), e[1].get<double>());
      }
    }
  }
  return QuadraticForm(Q);
}

nlohmann::json to_json(const SingularSpaceResult& r) {
  nlohmann::json basis = nlohmann::json::array();
  for (Eigen::Index c = 0; c < r.basis.cols(); ++c) {
    std::vector<double> v(r.basis.col(c).data(), r.basis.col(c).data() + r.basis.rows());
    basis.push_back(v);
  }
  nlohmann::json j = {{"dimS", r.dim()},
                      {"basis", basis},
                      {"truncation_dims", r.truncation_dims},
                      {"ambiguous", r.ambiguous},
                      {"tol", r.tol}};
  j["k0"] = r.k0 ? nlohmann::json(*r.k0) : nlohmann::json(nullptr);
  return j;
}

}  // namespace hlab
