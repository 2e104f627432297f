#include "hlab/bernstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "hlab/error.hpp"
#include "hlab/hermite.hpp"
#include "hlab/quadrature.hpp"

namespace hlab {

namespace {

double log_norm_ratio(const HermiteExpansion& g, const HermiteExpansion& f) {
  return std::log(g.norm()) - std::log(f.norm());
}

MultiIndex slice_index(std::span<const int> e, std::size_t from, std::size_t count) {
  return MultiIndex(std::vector<int>(e.begin() + static_cast<std::ptrdiff_t>(from),
                                     e.begin() + static_cast<std::ptrdiff_t>(from + count)));
}

}  // namespace

double log_crude_bound(int N, int m) {
  require(N >= 0 && m >= 0, ErrorCode::kInvalidArgument, "degree and order must be non-negative");
  return 0.5 * m * std::log(2.0) + 0.5 * (std::lgamma(N + m + 1.0) - std::lgamma(N + 1.0));
}

BernsteinCheck crude_bernstein_check(const HermiteExpansion& f, const MultiIndex& alpha,
                                     const MultiIndex& beta) {
  BernsteinCheck c;
  c.N = f.degree();
  c.alpha = alpha;
  c.beta = beta;
  const int m = alpha.order() + beta.order();
  c.lhs = apply_position_derivative(f, alpha, beta).norm();
  c.rhs = std::exp(log_crude_bound(c.N, m)) * f.norm();
  c.ratio = c.rhs > 0.0 ? c.lhs / c.rhs : 0.0;
  return c;
}

std::vector<std::pair<MultiIndex, MultiIndex>> derivative_pairs(int dim, int max_order) {
  const IndexSet set(2 * dim, max_order);
  std::vector<std::pair<MultiIndex, MultiIndex>> pairs;
  pairs.reserve(set.size());
  for (std::size_t p = 0; p < set.size(); ++p) {
    const auto e = set.entries(p);
    pairs.emplace_back(slice_index(e, 0, static_cast<std::size_t>(dim)),
                       slice_index(e, static_cast<std::size_t>(dim), static_cast<std::size_t>(dim)));
  }
  return pairs;
}

std::vector<BernsteinCheck> crude_bernstein_sweep(const HermiteExpansion& f, int max_order) {
  std::vector<BernsteinCheck> out;
  for (const auto& [a, b] : derivative_pairs(f.dim(), max_order)) {
    out.push_back(crude_bernstein_check(f, a, b));
  }
  return out;
}

BernsteinConstantFit bernstein_constant_fit(const std::vector<HermiteExpansion>& samples, double epsilon, double delta,
                     int max_order) {
  require(epsilon > 0.0 && epsilon <= 1.0, ErrorCode::kInvalidArgument, "epsilon must lie in (0, 1]");
  require(delta > 0.0 && delta <= 1.0, ErrorCode::kInvalidArgument, "delta must lie in (0, 1]");
  require(max_order >= 0, ErrorCode::kInvalidArgument, "max order must be non-negative");
  BernsteinConstantFit fit;
  fit.epsilon = epsilon;
  fit.delta = delta;
  fit.max_order = max_order;
  const double ninf = -std::numeric_limits<double>::infinity();
  fit.residuals.assign(static_cast<std::size_t>(max_order) + 1, ninf);

  auto shape = [&](int N, int m) {
    return std::lgamma(m / (2.0 - epsilon) + 2.0) +
           std::pow(static_cast<double>(N), 1.0 - 0.5 * epsilon) / std::pow(delta, 2.0 - epsilon) +
           m * std::log(delta);
  };
  struct Obs {
    int m;
    double excess;
  };
  std::vector<Obs> observed;
  for (const HermiteExpansion& f : samples) {
    if (f.norm() == 0.0) continue;
    for (const auto& [a, b] : derivative_pairs(f.dim(), max_order)) {
      const HermiteExpansion g = apply_position_derivative(f, a, b);
      if (g.norm() == 0.0) continue;
      const int m = a.order() + b.order();
      const double excess = log_norm_ratio(g, f) - shape(f.degree(), m);
      observed.push_back({m, excess});
      fit.residuals[static_cast<std::size_t>(m)] =
          std::max(fit.residuals[static_cast<std::size_t>(m)], excess);
      ++fit.evaluations;
    }
  }
  require(!observed.empty(), ErrorCode::kInsufficientData, "no non-zero sample to fit");

  // Constraints a + m b ≥ r_m, a ≥ 0, b ≥ 0 written as (ca, cb, rhs).
  struct Line {
    double ca, cb, rhs;
  };
  std::vector<Line> lines{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
  double weight_a = 0.0;
  double weight_b = 0.0;
  for (int m = 0; m <= max_order; ++m) {
    const double r = fit.residuals[static_cast<std::size_t>(m)];
    if (r == ninf) continue;
    lines.push_back({1.0, static_cast<double>(m), r});
    weight_a += 1.0;
    weight_b += m;
  }
  auto feasible = [&](double a, double b) {
    for (const Line& l : lines) {
      if (l.ca * a + l.cb * b < l.rhs - 1e-12 * (1.0 + std::abs(l.rhs))) return false;
    }
    return true;
  };
  double best = std::numeric_limits<double>::infinity();
  double best_a = 0.0;
  double best_b = 0.0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const Line& p = lines[i];
      const Line& q = lines[j];
      const double det = p.ca * q.cb - p.cb * q.ca;
      if (std::abs(det) < 1e-14) continue;
      const double a = (p.rhs * q.cb - p.cb * q.rhs) / det;
      const double b = (p.ca * q.rhs - p.rhs * q.ca) / det;
      if (!feasible(a, b)) continue;
      const double objective = weight_a * a + weight_b * b;
      if (objective < best) {
        best = objective;
        best_a = std::max(a, 0.0);
        best_b = std::max(b, 0.0);
      }
    }
  }
  require(std::isfinite(best), ErrorCode::kNonConvergence, "no feasible constant pair found");
  fit.K_tilde = std::exp(best_a);
  fit.K = std::exp(best_b);
  fit.certified = std::all_of(observed.begin(), observed.end(), [&](const Obs& o) {
    return o.excess <= best_a + o.m * best_b + 1e-10;
  });
  return fit;
}

GammaReport gamma_inequality_check(std::span<const double> xs, std::span<const double> ys, double r) {
  require(r > 0.0, ErrorCode::kInvalidArgument, "r must be positive");
  GammaReport rep;
  rep.r = r;
  rep.power_bound_margin = std::numeric_limits<double>::infinity();
  rep.beta_bound_margin = std::numeric_limits<double>::infinity();
  const double log_beta = 2.0 * std::lgamma(r) - std::lgamma(2.0 * r) - std::log(2.0 * r);
  for (double x : xs) {
    for (double y : ys) {
      require(x > 0.0 && y > 0.0, ErrorCode::kInvalidArgument, "grid values must be positive");
      ++rep.points;
      const double lhs = y * std::log(x);
      const double rhs = std::lgamma(y + 1.0) + x;
      rep.power_bound_margin = std::min(rep.power_bound_margin, rhs - lhs);
      if (x >= r && y >= r) {
        const double l2 = std::lgamma(x) + std::lgamma(y);
        const double r2 = log_beta + std::lgamma(x + y + 1.0);
        rep.beta_bound_margin = std::min(rep.beta_bound_margin, r2 - l2);
      }
    }
  }
  rep.power_bound_ok = rep.power_bound_margin >= 0.0;
  rep.beta_bound_ok = rep.beta_bound_margin >= 0.0;
  auto fit_cp = [&](double p) {
    double best = 0.0;
    for (double x : xs) {
      if (x < 1.0) continue;
      const double log_ratio =
          std::lgamma(x) / p - x * (std::log(p) + 1.0) / p - std::lgamma(x / p);
      best = std::max(best, std::exp(log_ratio));
    }
    return best;
  };
  rep.C2 = fit_cp(2.0);
  rep.C3 = fit_cp(3.0);
  return rep;
}

std::map<std::pair<int, int>, double> ladder_product_coefficients(int k) {
  require(k >= -1, ErrorCode::kInvalidArgument, "ladder product index must be >= -1");
  std::map<std::pair<int, int>, double> c{{{0, 0}, 1.0}};
  if (k == -1) return c;
  c = {{{1, 0}, 1.0}, {{0, 1}, 1.0}};
  for (int step = 0; step < k; ++step) {
    // Multiply on the right by ((-1)^{step+1} ∂ + x), using ∂^l x = x ∂^l + l ∂^{l-1}.
    const double sign = (step + 1) % 2 == 0 ? 1.0 : -1.0;
    std::map<std::pair<int, int>, double> next;
    for (const auto& [key, v] : c) {
      const auto [l1, l2] = key;
      next[{l1, l2 + 1}] += sign * v;
      next[{l1 + 1, l2}] += v;
      if (l2 >= 1) next[{l1, l2 - 1}] += l2 * v;
    }
    std::erase_if(next, [](const auto& kv) { return kv.second == 0.0; });
    c = std::move(next);
  }
  return c;
}

double ladder_product_bound_ratio(int k) {
  require(k >= 0, ErrorCode::kInvalidArgument, "bound is stated for k >= 0");
  double worst = 0.0;
  for (const auto& [key, v] : ladder_product_coefficients(k)) {
    const double bound = std::pow(3.0, k) * std::pow(k + 1.0, 0.5 * (k + 1 - key.first - key.second));
    worst = std::max(worst, std::abs(v) / bound);
  }
  return worst;
}

OperatorExpansion harmonic_power_expand(int k, int n) {
  require(k >= 0, ErrorCode::kInvalidArgument, "power must be non-negative");
  require(n >= 1, ErrorCode::kInvalidArgument, "dimension must be positive");
  if (k > kMaxExpansionPower) {
    fail(ErrorCode::kDegreeOverflow, "harmonic power " + std::to_string(k) + " exceeds cap " +
                                         std::to_string(kMaxExpansionPower));
  }
  std::vector<std::map<std::pair<int, int>, double>> one_d;
  for (int g = 0; g <= k; ++g) one_d.push_back(ladder_product_coefficients(2 * g - 1));

  std::map<std::vector<int>, double> acc;  // key: (α, β) concatenated
  const IndexSet gammas(n, k);
  for (std::size_t p = gammas.level_begin(k); p < gammas.size(); ++p) {
    const auto gamma = gammas.entries(p);
    double multinomial = std::lgamma(k + 1.0);
    for (int g : gamma) multinomial -= std::lgamma(g + 1.0);
    const double weight = std::round(std::exp(multinomial));
    // Tensor product of the per-axis expansions.
    std::vector<std::pair<std::vector<int>, double>> partial{{std::vector<int>(2 * n, 0), weight}};
    for (int j = 0; j < n; ++j) {
      std::vector<std::pair<std::vector<int>, double>> grown;
      for (const auto& [key, v] : partial) {
        for (const auto& [lk, c] : one_d[static_cast<std::size_t>(gamma[j])]) {
          auto next = key;
          next[j] = lk.first;
          next[n + j] = lk.second;
          grown.emplace_back(std::move(next), v * c);
        }
      }
      partial = std::move(grown);
    }
    for (const auto& [key, v] : partial) acc[key] += v;
  }
  OperatorExpansion op;
  op.k = k;
  op.dim = n;
  for (const auto& [key, v] : acc) {
    if (v == 0.0) continue;
    op.terms.push_back({slice_index(key, 0, static_cast<std::size_t>(n)),
                        slice_index(key, static_cast<std::size_t>(n), static_cast<std::size_t>(n)), v});
  }
  return op;
}

HermiteExpansion apply_expansion(const OperatorExpansion& op, const HermiteExpansion& f) {
  require(op.dim == f.dim(), ErrorCode::kDimensionMismatch, "operator and function dimensions differ");
  HermiteExpansion out(f.dim(), f.degree() + 2 * op.k);
  for (const ExpansionTerm& t : op.terms) {
    HermiteExpansion g = apply_position_derivative(f, t.alpha, t.beta);
    g *= t.c;
    out += g;
  }
  return out;
}

double expansion_coefficient_bound(int k, int n, int order) {
  return std::pow(3.0, 2 * k - n) * std::pow(static_cast<double>(n), k) *
         std::pow(2.0 * k, 0.5 * (2 * k - order));
}

double expansion_bound_ratio(const OperatorExpansion& op) {
  require(op.k >= 1, ErrorCode::kInvalidArgument, "coefficient bound is stated for k >= 1");
  double worst = 0.0;
  for (const ExpansionTerm& t : op.terms) {
    const int order = t.alpha.order() + t.beta.order();
    worst = std::max(worst, std::abs(t.c) / expansion_coefficient_bound(op.k, op.dim, order));
  }
  return worst;
}

double weighted_seminorm(const HermiteExpansion& f, double r, const MultiIndex& beta,
                         SeminormMethod method) {
  require(r >= 0.0 && std::isfinite(r), ErrorCode::kInvalidArgument, "weight exponent must be >= 0");
  const int n = f.dim();
  const bool integer = r == std::floor(r);
  if (method == SeminormMethod::kExpansion || (method == SeminormMethod::kAuto && integer)) {
    require(integer, ErrorCode::kInvalidArgument, "expansion path needs an integer exponent");
    const int k = static_cast<int>(r);
    const IndexSet gammas(n + 1, k);
    double total = 0.0;
    for (std::size_t p = gammas.level_begin(k); p < gammas.size(); ++p) {
      const auto gamma = gammas.entries(p);
      double log_w = std::lgamma(k + 1.0);
      for (int g : gamma) log_w -= std::lgamma(g + 1.0);
      const MultiIndex head = slice_index(gamma, 0, static_cast<std::size_t>(n));
      total += std::exp(log_w) * apply_position_derivative(f, head, beta).squared_norm();
    }
    return std::sqrt(total);
  }

  require(n <= 2, ErrorCode::kUnsupportedShape, "quadrature seminorm supports n <= 2");
  const HermiteExpansion g = apply_position_derivative(f, MultiIndex::zero(n), beta);
  const int D = g.degree();
  const double R = std::sqrt(4.0 * D + 20.0 + 4.0 * r);
  const double panel = n == 1 ? 0.25 : 0.5;
  const int nodes = n == 1 ? 32 : 24;
  std::vector<double> xs, ws, nx, nw;
  const auto pieces = static_cast<int>(std::ceil(2.0 * R / panel));
  const double h = 2.0 * R / pieces;
  for (int p = 0; p < pieces; ++p) {
    gauss_legendre_on(nodes, -R + p * h, -R + (p + 1) * h, nx, nw);
    xs.insert(xs.end(), nx.begin(), nx.end());
    ws.insert(ws.end(), nw.begin(), nw.end());
  }
  const auto Q = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd phi(Q, D + 1);
  std::vector<double> vals(static_cast<std::size_t>(D) + 1);
  for (Eigen::Index q = 0; q < Q; ++q) {
    hermite_functions(D, xs[static_cast<std::size_t>(q)], vals);
    for (int k = 0; k <= D; ++k) phi(q, k) = vals[static_cast<std::size_t>(k)];
  }
  double total = 0.0;
  if (n == 1) {
    const Eigen::VectorXd values = phi * g.coeffs();
    for (Eigen::Index q = 0; q < Q; ++q) {
      const double x = xs[static_cast<std::size_t>(q)];
      total += ws[static_cast<std::size_t>(q)] * std::pow(1.0 + x * x, r) * values(q) * values(q);
    }
  } else {
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(D + 1, D + 1);
    for (std::size_t p = 0; p < g.size(); ++p) {
      const auto a = g.indices().entries(p);
      C(a[0], a[1]) = g.coeffs()(static_cast<Eigen::Index>(p));
    }
    const Eigen::MatrixXd values = phi * C * phi.transpose();
    for (Eigen::Index i = 0; i < Q; ++i) {
      const double xi = xs[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < Q; ++j) {
        const double xj = xs[static_cast<std::size_t>(j)];
        total += ws[static_cast<std::size_t>(i)] * ws[static_cast<std::size_t>(j)] *
                 std::pow(1.0 + xi * xi + xj * xj, r) * values(i, j) * values(i, j);
      }
    }
  }
  return std::sqrt(total);
}

nlohmann::json to_json(const BernsteinConstantFit& f) {
  return {{"epsilon", f.epsilon},     {"delta", f.delta},         {"K_tilde", f.K_tilde},
          {"K", f.K},                 {"max_order", f.max_order}, {"residuals", f.residuals},
          {"certified", f.certified}, {"evaluations", f.evaluations}};
}

nlohmann::json to_json(const GammaReport& g) {
  return {{"points", g.points},
          {"power_bound_ok", g.power_bound_ok},
          {"power_bound_margin", g.power_bound_margin},
          {"r", g.r},
          {"beta_bound_ok", g.beta_bound_ok},
          {"beta_bound_margin", g.beta_bound_margin},
          {"C2", g.C2},
          {"C3", g.C3}};
}

}  // namespace hlab
