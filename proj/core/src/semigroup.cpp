#include "hlab/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include <nlohmann/json.hpp>

#include "hlab/error.hpp"

namespace hlab {

namespace {

// log Σ exp(terms), skipping -inf.
double log_sum_exp(const std::vector<double>& terms) {
  double top = -std::numeric_limits<double>::infinity();
  for (double t : terms) top = std::max(top, t);
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - top);
  return top + std::log(acc);
}

}  // namespace

EvolutionSpec::EvolutionSpec(double s_, int dim_) : s(s_), dim(dim_) {
  require(s > 0.5 && s <= 1.0, ErrorCode::kInvalidArgument, "s must exceed 1/2 and be at most 1");
  require(dim >= 1, ErrorCode::kInvalidArgument, "dimension must be positive");
}

double EvolutionSpec::eigenvalue(int level) const {
  return std::pow(2.0 * level + dim, s);
}

Eigen::VectorXd eigenvalues(const EvolutionSpec& spec, int N) {
  const auto set = IndexSet::shared(spec.dim, N);
  Eigen::VectorXd lambda(static_cast<Eigen::Index>(set->size()));
  for (std::size_t p = 0; p < set->size(); ++p) {
    lambda(static_cast<Eigen::Index>(p)) = spec.eigenvalue(set->order(p));
  }
  return lambda;
}

HermiteExpansion evolve(const HermiteExpansion& f, double t, const EvolutionSpec& spec) {
  require(t >= 0.0 && std::isfinite(t), ErrorCode::kInvalidArgument, "time must be non-negative");
  require(f.dim() == spec.dim, ErrorCode::kDimensionMismatch, "expansion and spec dimensions differ");
  HermiteExpansion out = f;
  if (t == 0.0) return out;
  for (std::size_t p = 0; p < f.size(); ++p) {
    out.coeffs()(static_cast<Eigen::Index>(p)) *= std::exp(-t * spec.eigenvalue(f.indices().order(p)));
  }
  return out;
}

HermiteExpansion project(const HermiteExpansion& f, int k) {
  require(k >= 0, ErrorCode::kInvalidArgument, "projection level must be non-negative");
  HermiteExpansion out = f;
  if (k >= f.degree()) return out;
  const auto start = static_cast<Eigen::Index>(f.indices().level_begin(k + 1));
  out.coeffs().tail(out.coeffs().size() - start).setZero();
  return out;
}

HermiteExpansion complement(const HermiteExpansion& f, int k) {
  return f - project(f, k);
}

DissipationReport dissipation_tail(const HermiteExpansion& f, int k, double t,
                                   const EvolutionSpec& spec) {
  DissipationReport r;
  r.k = k;
  r.t = t;
  r.tail_norm = complement(evolve(f, t, spec), k).norm();
  const double n = spec.dim;
  r.bound = std::exp(-t * std::pow(2.0 * k + 2.0 + n, spec.s)) * f.norm();
  r.bound_level_k = std::exp(-t * std::pow(2.0 * k + n, spec.s)) * complement(f, k).norm();
  r.bound_weak = std::exp(-t * std::pow(static_cast<double>(k), spec.s)) * f.norm();
  r.holds = r.tail_norm <= r.bound + 1e-12;
  return r;
}

DecayNorm gs_decay_norm(const HermiteExpansion& f, double t0, double exponent) {
  require(t0 > 0.0, ErrorCode::kInvalidArgument, "t0 must be positive");
  require(exponent > 0.0, ErrorCode::kInvalidArgument, "exponent must be positive");
  std::vector<double> terms;
  terms.reserve(f.size());
  for (std::size_t p = 0; p < f.size(); ++p) {
    const double c = std::abs(f.coeffs()(static_cast<Eigen::Index>(p)));
    if (c == 0.0) continue;
    terms.push_back(2.0 * t0 * std::pow(static_cast<double>(f.indices().order(p)), exponent) +
                    2.0 * std::log(c));
  }
  DecayNorm d;
  const double log_sq = log_sum_exp(terms);
  if (!std::isfinite(log_sq) && log_sq < 0.0) {
    d.value = 0.0;
    d.log_value = log_sq;
    return d;
  }
  d.log_value = 0.5 * log_sq;
  d.finite = d.log_value < std::log(std::numeric_limits<double>::max());
  d.value = d.finite ? std::exp(d.log_value) : std::numeric_limits<double>::infinity();
  return d;
}

double log_decay_sum(const HermiteExpansion& f, double rate, const EvolutionSpec& spec) {
  std::vector<double> terms;
  for (std::size_t p = 0; p < f.size(); ++p) {
    const double c = std::abs(f.coeffs()(static_cast<Eigen::Index>(p)));
    if (c == 0.0) continue;
    terms.push_back(2.0 * rate * spec.eigenvalue(f.indices().order(p)) + 2.0 * std::log(c));
  }
  return log_sum_exp(terms);
}

void write_decay_trace(const HermiteExpansion& f, std::span<const double> times,
                       const EvolutionSpec& spec, std::ostream& out) {
  out << "t,level,abs_coefficient\n";
  char buf[96];
  for (double t : times) {
    const HermiteExpansion g = evolve(f, t, spec);
    for (int level = 0; level <= g.degree(); ++level) {
      const auto begin = static_cast<Eigen::Index>(g.indices().level_begin(level));
      const auto end = level == g.degree()
                           ? static_cast<Eigen::Index>(g.size())
                           : static_cast<Eigen::Index>(g.indices().level_begin(level + 1));
      const double mag = g.coeffs().segment(begin, end - begin).norm();
      std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g\n", t, level, mag);
      out << buf;
    }
  }
}

nlohmann::json to_json(const DissipationReport& r) {
  return {{"k", r.k},
          {"t", r.t},
          {"tail_norm", r.tail_norm},
          {"bound", r.bound},
          {"bound_level_k", r.bound_level_k},
          {"bound_weak", r.bound_weak},
          {"holds", r.holds}};
}

}  // namespace hlab
