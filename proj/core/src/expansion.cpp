#include "hlab/expansion.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <nlohmann/json.hpp>

#include "hlab/error.hpp"
#include "hlab/hermite.hpp"

namespace hlab {

namespace {

void require_same_dim(const HermiteExpansion& a, const HermiteExpansion& b) {
  require(a.dim() == b.dim(), ErrorCode::kDimensionMismatch,
          "expansion dimensions differ: " + std::to_string(a.dim()) + " vs " +
              std::to_string(b.dim()));
}

void check_axis(const HermiteExpansion& f, int axis) {
  require(axis >= 0 && axis < f.dim(), ErrorCode::kInvalidArgument,
          "axis " + std::to_string(axis) + " out of range for dimension " +
              std::to_string(f.dim()));
}

}  // namespace

HermiteExpansion::HermiteExpansion(int dim, int degree)
    : indices_(IndexSet::shared(dim, degree)),
      coeffs_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(indices_->size()))) {}

HermiteExpansion::HermiteExpansion(int dim, int degree, Eigen::VectorXd coeffs)
    : indices_(IndexSet::shared(dim, degree)), coeffs_(std::move(coeffs)) {
  require(static_cast<std::size_t>(coeffs_.size()) == indices_->size(),
          ErrorCode::kDimensionMismatch,
          "coefficient vector has " + std::to_string(coeffs_.size()) + " entries, expected " +
              std::to_string(indices_->size()));
}

HermiteExpansion HermiteExpansion::basis(const MultiIndex& alpha, int degree) {
  HermiteExpansion f(alpha.dim(), degree < 0 ? alpha.order() : degree);
  f.set_coeff(alpha, 1.0);
  return f;
}

double HermiteExpansion::coeff(const MultiIndex& alpha) const {
  auto p = indices_->position(alpha);
  return p ? coeffs_[static_cast<Eigen::Index>(*p)] : 0.0;
}

void HermiteExpansion::set_coeff(const MultiIndex& alpha, double value) {
  auto p = indices_->position(alpha);
  require(p.has_value(), ErrorCode::kDegreeOverflow,
          "multi-index " + alpha.to_string() + " outside E_" + std::to_string(degree()));
  coeffs_[static_cast<Eigen::Index>(*p)] = value;
}

void HermiteExpansion::add_coeff(const MultiIndex& alpha, double value) {
  auto p = indices_->position(alpha);
  require(p.has_value(), ErrorCode::kDegreeOverflow,
          "multi-index " + alpha.to_string() + " outside E_" + std::to_string(degree()));
  coeffs_[static_cast<Eigen::Index>(*p)] += value;
}

HermiteExpansion HermiteExpansion::embedded(int new_degree) const {
  require(new_degree >= degree(), ErrorCode::kInvalidArgument,
          "embedding cannot lower the degree");
  if (new_degree == degree()) return *this;
  // The enumeration is graded, so E_N is a prefix of E_{N'}.
  HermiteExpansion out(dim(), new_degree);
  out.coeffs_.head(coeffs_.size()) = coeffs_;
  return out;
}

double HermiteExpansion::evaluate(std::span<const double> x) const {
  require(static_cast<int>(x.size()) == dim(), ErrorCode::kDimensionMismatch,
          "evaluation point has wrong dimension");
  std::vector<std::vector<double>> tables(static_cast<std::size_t>(dim()));
  for (int j = 0; j < dim(); ++j) {
    tables[static_cast<std::size_t>(j)] = hermite_functions(degree(), x[static_cast<std::size_t>(j)]);
  }
  double sum = 0.0;
  for (std::size_t p = 0; p < size(); ++p) {
    const double c = coeffs_[static_cast<Eigen::Index>(p)];
    if (c == 0.0) continue;
    double term = c;
    auto alpha = indices_->entries(p);
    for (int j = 0; j < dim(); ++j) {
      term *= tables[static_cast<std::size_t>(j)][static_cast<std::size_t>(alpha[static_cast<std::size_t>(j)])];
    }
    sum += term;
  }
  return sum;
}

HermiteExpansion& HermiteExpansion::operator+=(const HermiteExpansion& other) {
  require_same_dim(*this, other);
  if (other.degree() > degree()) *this = embedded(other.degree());
  coeffs_.head(other.coeffs_.size()) += other.coeffs_;
  return *this;
}

HermiteExpansion& HermiteExpansion::operator-=(const HermiteExpansion& other) {
  require_same_dim(*this, other);
  if (other.degree() > degree()) *this = embedded(other.degree());
  coeffs_.head(other.coeffs_.size()) -= other.coeffs_;
  return *this;
}

HermiteExpansion& HermiteExpansion::operator*=(double scale) {
  coeffs_ *= scale;
  return *this;
}

HermiteExpansion operator+(HermiteExpansion a, const HermiteExpansion& b) { return a += b; }
HermiteExpansion operator-(HermiteExpansion a, const HermiteExpansion& b) { return a -= b; }
HermiteExpansion operator*(double scale, HermiteExpansion f) { return f *= scale; }

HermiteExpansion random_expansion(int dim, int degree, std::mt19937_64& rng) {
  HermiteExpansion f(dim, degree);
  std::normal_distribution<double> normal;
  for (Eigen::Index i = 0; i < f.coeffs().size(); ++i) f.coeffs()(i) = normal(rng);
  f.coeffs().normalize();
  return f;
}

double max_abs_difference(const HermiteExpansion& a, const HermiteExpansion& b) {
  const HermiteExpansion diff = a - b;
  return diff.coeffs().size() ? diff.coeffs().cwiseAbs().maxCoeff() : 0.0;
}

HermiteExpansion apply_ladder(const HermiteExpansion& f, int axis, Ladder which) {
  check_axis(f, axis);
  const IndexSet& in = f.indices();
  const int out_degree = which == Ladder::kRaise ? f.degree() + 1 : std::max(f.degree() - 1, 0);
  HermiteExpansion out(f.dim(), out_degree);
  const IndexSet& target = out.indices();
  std::vector<int> shifted(static_cast<std::size_t>(f.dim()));
  for (std::size_t p = 0; p < in.size(); ++p) {
    const double c = f.coeffs()[static_cast<Eigen::Index>(p)];
    if (c == 0.0) continue;
    auto alpha = in.entries(p);
    std::copy(alpha.begin(), alpha.end(), shifted.begin());
    const int a = alpha[static_cast<std::size_t>(axis)];
    double factor = 0.0;
    if (which == Ladder::kRaise) {
      shifted[static_cast<std::size_t>(axis)] = a + 1;
      factor = std::sqrt(static_cast<double>(a) + 1.0);
    } else {
      if (a == 0) continue;
      shifted[static_cast<std::size_t>(axis)] = a - 1;
      factor = std::sqrt(static_cast<double>(a));
    }
    auto q = target.position(shifted);
    out.coeffs()[static_cast<Eigen::Index>(*q)] += factor * c;
  }
  return out;
}

namespace {

HermiteExpansion apply_position(const HermiteExpansion& f, int axis) {
  HermiteExpansion up = apply_ladder(f, axis, Ladder::kRaise);
  up += apply_ladder(f, axis, Ladder::kLower);
  up *= (1.0 / std::numbers::sqrt2);
  return up;
}

HermiteExpansion apply_derivative(const HermiteExpansion& f, int axis) {
  HermiteExpansion out = apply_ladder(f, axis, Ladder::kLower).embedded(f.degree() + 1);
  out -= apply_ladder(f, axis, Ladder::kRaise);
  out *= (1.0 / std::numbers::sqrt2);
  return out;
}

}  // namespace

HermiteExpansion apply_position_derivative(const HermiteExpansion& f, const MultiIndex& alpha,
                                           const MultiIndex& beta, int degree_cap) {
  require(alpha.dim() == f.dim() && beta.dim() == f.dim(), ErrorCode::kDimensionMismatch,
          "multi-index dimension does not match expansion");
  const int target = f.degree() + alpha.order() + beta.order();
  require(target <= degree_cap, ErrorCode::kDegreeOverflow,
          "x^a d^b raises degree to " + std::to_string(target) + " above cap " +
              std::to_string(degree_cap));
  HermiteExpansion out = f;
  for (int j = 0; j < f.dim(); ++j) {
    for (int k = 0; k < beta[j]; ++k) out = apply_derivative(out, j);
  }
  for (int j = 0; j < f.dim(); ++j) {
    for (int k = 0; k < alpha[j]; ++k) out = apply_position(out, j);
  }
  return out;
}

HermiteExpansion harmonic_apply(const HermiteExpansion& f) {
  HermiteExpansion out = f;
  const IndexSet& set = f.indices();
  for (std::size_t p = 0; p < set.size(); ++p) {
    out.coeffs()[static_cast<Eigen::Index>(p)] *= 2.0 * set.order(p) + f.dim();
  }
  return out;
}

nlohmann::json to_json(const HermiteExpansion& f) {
  nlohmann::json coeffs = nlohmann::json::array();
  const IndexSet& set = f.indices();
  for (std::size_t p = 0; p < set.size(); ++p) {
    const double c = f.coeffs()[static_cast<Eigen::Index>(p)];
    if (c == 0.0) continue;
    auto alpha = set.entries(p);
    coeffs.push_back({std::vector<int>(alpha.begin(), alpha.end()), c});
  }
  return {{"dim", f.dim()}, {"degree", f.degree()}, {"coeffs", std::move(coeffs)}};
}

HermiteExpansion expansion_from_json(const nlohmann::json& j) {
  try {
    const int dim = j.at("dim").get<int>();
    const int degree = j.at("degree").get<int>();
    HermiteExpansion f(dim, degree);
    for (const auto& entry : j.at("coeffs")) {
      MultiIndex alpha(entry.at(0).get<std::vector<int>>());
      require(alpha.dim() == dim, ErrorCode::kDimensionMismatch,
              "coefficient index " + alpha.to_string() + " has wrong dimension");
      f.set_coeff(alpha, entry.at(1).get<double>());
    }
    return f;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kConfigError, std::string("malformed expansion JSON: ") + e.what());
  }
}

}  // namespace hlab
