#include "hlab/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "hlab/error.hpp"
#include "hlab/hermite.hpp"
#include "hlab/quadrature.hpp"

namespace hlab {

namespace {

using PointSink = std::function<void(std::span<const double>, double)>;

void emit_axis(double lo, double hi, double panel, int nodes, std::vector<double>& xs,
               std::vector<double>& ws) {
  const auto pieces = std::max<long>(1, static_cast<long>(std::ceil((hi - lo) / panel - 1e-12)));
  const double h = (hi - lo) / static_cast<double>(pieces);
  std::vector<double> nx, nw;
  for (long p = 0; p < pieces; ++p) {
    gauss_legendre_on(nodes, lo + p * h, lo + (p + 1) * h, nx, nw);
    xs.insert(xs.end(), nx.begin(), nx.end());
    ws.insert(ws.end(), nw.begin(), nw.end());
  }
}

// Quadrature points of ω ∩ [-R, R]^dim, delivered with their weights.
void collect_points(const ControlSet& omega, double R, double panel, int nodes,
                    std::vector<double>& prefix, double weight, const PointSink& sink) {
  std::vector<double> xs, ws;
  if (omega.dim() == 1) {
    for (const Interval& i : omega.intervals_within(-R, R)) emit_axis(i.lo, i.hi, panel, nodes, xs, ws);
    for (std::size_t q = 0; q < xs.size(); ++q) {
      prefix.push_back(xs[q]);
      sink(prefix, weight * ws[q]);
      prefix.pop_back();
    }
    return;
  }
  const std::vector<double> bps = omega.breakpoints(-R, R);
  for (std::size_t i = 0; i + 1 < bps.size(); ++i) emit_axis(bps[i], bps[i + 1], panel, nodes, xs, ws);
  for (std::size_t q = 0; q < xs.size(); ++q) {
    prefix.push_back(xs[q]);
    collect_points(omega.slice(xs[q]), R, panel, nodes, prefix, weight * ws[q], sink);
    prefix.pop_back();
  }
}

Eigen::MatrixXd assemble(const ControlSet& omega, int N, double R, double panel, int nodes,
                         std::size_t& count) {
  const int n = omega.dim();
  const auto set = IndexSet::shared(n, N);
  const auto size = static_cast<Eigen::Index>(set->size());
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(size, size);
  constexpr Eigen::Index kChunk = 1024;
  Eigen::MatrixXd rows(kChunk, size);
  Eigen::Index filled = 0;
  std::vector<std::vector<double>> axis(static_cast<std::size_t>(n),
                                        std::vector<double>(static_cast<std::size_t>(N) + 1));
  count = 0;
  auto flush = [&] {
    if (filled == 0) return;
    G.selfadjointView<Eigen::Lower>().rankUpdate(rows.topRows(filled).transpose());
    filled = 0;
  };
  std::vector<double> prefix;
  collect_points(omega, R, panel, nodes, prefix, 1.0, [&](std::span<const double> x, double w) {
    for (int j = 0; j < n; ++j) hermite_functions(N, x[static_cast<std::size_t>(j)], axis[j]);
    const double sw = std::sqrt(w);
    for (Eigen::Index p = 0; p < size; ++p) {
      const auto alpha = set->entries(static_cast<std::size_t>(p));
      double v = sw;
      for (int j = 0; j < n; ++j) v *= axis[j][static_cast<std::size_t>(alpha[j])];
      rows(filled, p) = v;
    }
    ++count;
    if (++filled == kChunk) flush();
  });
  flush();
  G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
  return G;
}

}  // namespace

double default_truncation_radius(int N) { return std::sqrt(4.0 * N + 20.0); }

GramMatrix gram_matrix(const ControlSet& omega, int N, const GramOptions& options) {
  require(N >= 0, ErrorCode::kInvalidArgument, "degree must be non-negative");
  require(options.panel > 0.0 && options.nodes >= 1, ErrorCode::kInvalidArgument,
          "panel width and node count must be positive");
  GramMatrix gram;
  gram.N = N;
  gram.dim = omega.dim();
  gram.omega = omega.describe();
  gram.radius = options.radius > 0.0 ? options.radius : default_truncation_radius(N);
  gram.G = assemble(omega, N, gram.radius, options.panel, options.nodes, gram.points);
  if (options.verify) {
    std::size_t fine_points = 0;
    Eigen::MatrixXd fine =
        assemble(omega, N, gram.radius, 0.5 * options.panel, options.nodes, fine_points);
    gram.quad_error = (fine - gram.G).cwiseAbs().maxCoeff();
    gram.G = std::move(fine);
    gram.points = fine_points;
    if (gram.quad_error > options.tol) {
      fail(ErrorCode::kQuadratureFailure,
           "Gram entries changed by " + std::to_string(gram.quad_error) + " under panel halving");
    }
  }
  return gram;
}

EigenPair min_eigenvalue(const Eigen::MatrixXd& G, double tol, EigenMethod method,
                         int max_iterations) {
  require(G.rows() == G.cols() && G.rows() > 0, ErrorCode::kDimensionMismatch,
          "eigenvalue input must be square and non-empty");
  const double scale = std::max(G.norm(), std::numeric_limits<double>::min());
  const double asym = (G - G.transpose()).cwiseAbs().maxCoeff();
  require(asym <= 1e-12 * scale, ErrorCode::kInvalidArgument, "eigenvalue input is not symmetric");

  auto full = [&] {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    if (es.info() != Eigen::Success) fail(ErrorCode::kNonConvergence, "symmetric eigensolver failed");
    EigenPair pair;
    pair.value = es.eigenvalues()(0);
    pair.vector = es.eigenvectors().col(0);
    pair.residual = (G * pair.vector - pair.value * pair.vector).norm();
    return pair;
  };

  if (method != EigenMethod::kFull) {
    Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
    bool ok = ldlt.info() == Eigen::Success;
    EigenPair pair;
    if (ok) {
      Eigen::VectorXd v = Eigen::VectorXd::Ones(G.rows()).normalized();
      for (Eigen::Index i = 0; i < v.size(); ++i) v(i) += 1e-3 * static_cast<double>(i % 7);
      v.normalize();
      ok = false;
      for (int it = 0; it < max_iterations; ++it) {
        Eigen::VectorXd w = ldlt.solve(v);
        const double wn = w.norm();
        if (!std::isfinite(wn) || wn == 0.0) break;
        v = w / wn;
        pair.value = v.dot(G * v);
        pair.residual = (G * v - pair.value * v).norm();
        if (pair.residual <= tol * scale) {
          ok = true;
          break;
        }
      }
      pair.vector = v;
    }
    if (ok) {
      if (pair.vector.sum() < 0.0) pair.vector = -pair.vector;
      return pair;
    }
    if (method == EigenMethod::kInverseIteration) {
      fail(ErrorCode::kNonConvergence, "inverse iteration did not converge");
    }
  }
  EigenPair pair = full();
  pair.used_fallback = method != EigenMethod::kFull;
  if (pair.residual > tol * scale) {
    fail(ErrorCode::kNonConvergence, "eigenpair residual above tolerance");
  }
  if (pair.vector.sum() < 0.0) pair.vector = -pair.vector;
  return pair;
}

SpectralConstant spectral_constant(const GramMatrix& gram, double tol) {
  const EigenPair pair = min_eigenvalue(gram.G, tol);
  if (!(pair.value > 0.0)) {
    fail(ErrorCode::kDegenerateRestriction,
         "Gram matrix has lambda_min = " + std::to_string(pair.value) +
             "; omega annihilates an element of E_N at this resolution");
  }
  SpectralConstant sc;
  sc.lambda_min = pair.value;
  sc.C = 1.0 / std::sqrt(pair.value);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram.G, Eigen::EigenvaluesOnly);
  sc.condition = es.eigenvalues().maxCoeff() / pair.value;
  sc.extremizer = HermiteExpansion(gram.dim, gram.N, pair.vector);
  return sc;
}

GrowthFitReport growth_fit(const std::vector<std::pair<int, double>>& pairs, double epsilon) {
  require(pairs.size() >= 5, ErrorCode::kInsufficientData, "growth fit needs at least 5 points");
  require(epsilon > 0.0 && epsilon <= 1.0, ErrorCode::kInvalidArgument,
          "epsilon must lie in (0, 1]");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    require(pairs[i].second > 0.0, ErrorCode::kInvalidArgument, "spectral constants must be positive");
    if (i) {
      require(pairs[i].first > pairs[i - 1].first, ErrorCode::kInvalidArgument,
              "growth fit needs increasing N");
    }
  }
  const double p = 1.0 - 0.5 * epsilon;
  const auto m = static_cast<Eigen::Index>(pairs.size());
  Eigen::MatrixXd X(m, 2);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = std::pow(static_cast<double>(pairs[i].first), p);
    y(i) = std::log(pairs[i].second);
  }
  const Eigen::Vector2d coef = X.colPivHouseholderQr().solve(y);
  GrowthFitReport r;
  r.pairs = pairs;
  r.epsilon = epsilon;
  r.A = coef(0);
  r.B = coef(1);
  const double ss_res = (y - X * coef).squaredNorm();
  const double ss_tot = (y.array() - y.mean()).square().sum();
  r.r2 = ss_tot > 0.0 ? std::clamp(1.0 - ss_res / ss_tot, 0.0, 1.0) : 1.0;
  if (ss_tot == 0.0) r.B = 0.0;
  return r;
}

nlohmann::json to_json(const GrowthFitReport& r) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [N, C] : r.pairs) pairs.push_back({N, C});
  return {{"epsilon", r.epsilon}, {"A", r.A}, {"B", r.B}, {"r2", r.r2}, {"pairs", pairs}};
}

}  // namespace hlab
