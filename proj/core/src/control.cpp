#include "hlab/control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "hlab/error.hpp"
#include "hlab/quadrature.hpp"

namespace hlab {

namespace {

Eigen::VectorXd decay(const Eigen::VectorXd& lambda, double t) {
  return (-t * lambda.array()).exp().matrix();
}

double condition_number(const Eigen::MatrixXd& W) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

ControlSegment solve_segment(const Eigen::VectorXd& lambda_k, const GramianResult& gr,
                             const Eigen::VectorXd& g, double tau, int k, double cap) {
  ControlSegment seg;
  seg.t0 = 0.0;
  seg.t1 = tau;
  seg.level = k;
  seg.condition = gr.condition;
  if (!(gr.condition <= cap)) {
    fail(ErrorCode::kSingularGramian,
         "controllability Gramian at level " + std::to_string(k) + " has condition number " +
             std::to_string(gr.condition) + " above cap " + std::to_string(cap));
  }
  const Eigen::VectorXd b = decay(lambda_k, tau).cwiseProduct(g);
  seg.mu = gr.W.ldlt().solve(b);
  seg.cost = seg.mu.dot(gr.W * seg.mu);
  return seg;
}

// State at seg.t1 given the state at seg.t0.
Eigen::VectorXd advance_segment(const TruncatedSystem& sys, const Eigen::VectorXd& f,
                                const ControlSegment& seg, const SimulationOptions& options) {
  const Eigen::Index K = sys.size(seg.level);
  const Eigen::VectorXd lam_k = sys.lambda.head(K);
  Eigen::VectorXd out = decay(sys.lambda, seg.t1 - seg.t0).cwiseProduct(f);
  const double h = (seg.t1 - seg.t0) / options.panels;
  std::vector<double> nodes, weights;
  for (int p = 0; p < options.panels; ++p) {
    gauss_legendre_on(options.nodes, seg.t0 + p * h, seg.t0 + (p + 1) * h, nodes, weights);
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const double lag = seg.t1 - nodes[q];
      const Eigen::VectorXd prof = -decay(lam_k, lag).cwiseProduct(seg.mu);
      out.noalias() += weights[q] * decay(sys.lambda, lag).cwiseProduct(sys.G.leftCols(K) * prof);
    }
  }
  return out;
}

}  // namespace

TruncatedSystem::TruncatedSystem(const GramMatrix& gram, const EvolutionSpec& spec_)
    : spec(spec_), N(gram.N), G(gram.G), lambda(eigenvalues(spec_, gram.N)) {
  require(gram.dim == spec.dim, ErrorCode::kDimensionMismatch, "Gram matrix and spec dimensions differ");
}

Eigen::Index TruncatedSystem::size(int k) const {
  require(k >= 0 && k <= N, ErrorCode::kInvalidArgument, "level outside 0..N");
  return static_cast<Eigen::Index>(index_count(spec.dim, k));
}

GramianResult gramian(const TruncatedSystem& sys, double tau, int k, const GramianOptions& options) {
  require(tau > 0.0 && std::isfinite(tau), ErrorCode::kInvalidArgument, "duration must be positive");
  require(options.min_nodes >= 1 && options.max_nodes >= options.min_nodes, ErrorCode::kInvalidArgument,
          "bad Gramian node limits");
  const Eigen::Index K = sys.size(k);
  const Eigen::MatrixXd Gk = sys.G.topLeftCorner(K, K);
  const Eigen::VectorXd lam = sys.lambda.head(K);
  auto compute = [&](int points) {
    std::vector<double> nodes, weights;
    gauss_legendre_on(points, 0.0, tau, nodes, weights);
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(K, K);
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const Eigen::VectorXd d = decay(lam, nodes[q]);
      W.noalias() += weights[q] * (d.asDiagonal() * Gk * d.asDiagonal());
    }
    return Eigen::MatrixXd(0.5 * (W + W.transpose()));
  };
  GramianResult result;
  int points = options.min_nodes;
  Eigen::MatrixXd prev = compute(points);
  while (2 * points <= options.max_nodes) {
    points *= 2;
    Eigen::MatrixXd cur = compute(points);
    const double scale = cur.norm();
    result.rel_change = scale > 0.0 ? (cur - prev).norm() / scale : 0.0;
    prev = std::move(cur);
    if (result.rel_change <= options.rel_tol) {
      result.W = std::move(prev);
      result.nodes = points;
      result.condition = condition_number(result.W);
      return result;
    }
  }
  fail(ErrorCode::kQuadratureFailure, "Gramian quadrature did not settle below " +
                                          std::to_string(options.rel_tol) + " with " +
                                          std::to_string(points) + " nodes");
}

Eigen::VectorXd control_profile(const TruncatedSystem& sys, const ControlSignal& signal, double t) {
  for (const ControlSegment& seg : signal.segments) {
    if (t >= seg.t0 && t <= seg.t1) {
      return -decay(sys.lambda.head(sys.size(seg.level)), seg.t1 - t).cwiseProduct(seg.mu);
    }
  }
  return {};
}

Eigen::VectorXd forcing(const TruncatedSystem& sys, const ControlSignal& signal, double t) {
  const Eigen::VectorXd p = control_profile(sys, signal, t);
  if (p.size() == 0) return Eigen::VectorXd::Zero(sys.lambda.size());
  return sys.G.leftCols(p.size()) * p;
}

ControlSegment min_energy_control(const TruncatedSystem& sys, const Eigen::VectorXd& g, double tau,
                                  int k, double condition_cap, const GramianOptions& options) {
  require(g.size() == sys.size(k), ErrorCode::kDimensionMismatch, "state does not live in E_k");
  const GramianResult gr = gramian(sys, tau, k, options);
  return solve_segment(sys.lambda.head(sys.size(k)), gr, g, tau, k, condition_cap);
}

Eigen::VectorXd simulate(const TruncatedSystem& sys, const Eigen::VectorXd& f0,
                         const ControlSignal& signal, double T, const SimulationOptions& options) {
  require(f0.size() == sys.lambda.size(), ErrorCode::kDimensionMismatch, "initial state not in E_N");
  require(options.nodes >= 1 && options.panels >= 1, ErrorCode::kInvalidArgument,
          "simulation resolution must be positive");
  std::vector<const ControlSegment*> order;
  for (const ControlSegment& s : signal.segments) order.push_back(&s);
  std::sort(order.begin(), order.end(),
            [](const ControlSegment* a, const ControlSegment* b) { return a->t0 < b->t0; });
  Eigen::VectorXd f = f0;
  double t = 0.0;
  for (const ControlSegment* seg : order) {
    require(seg->t0 >= t - 1e-15 && seg->t1 <= T + 1e-15, ErrorCode::kInvalidArgument,
            "control segments overlap or leave [0, T]");
    f = decay(sys.lambda, seg->t0 - t).cwiseProduct(f);
    f = advance_segment(sys, f, *seg, options);
    t = seg->t1;
  }
  return decay(sys.lambda, std::max(0.0, T - t)).cwiseProduct(f);
}

double quadrature_cost(const TruncatedSystem& sys, const ControlSignal& signal,
                       const SimulationOptions& options) {
  double total = 0.0;
  std::vector<double> nodes, weights;
  for (const ControlSegment& seg : signal.segments) {
    const Eigen::Index K = sys.size(seg.level);
    const Eigen::MatrixXd Gk = sys.G.topLeftCorner(K, K);
    const double h = (seg.t1 - seg.t0) / options.panels;
    for (int p = 0; p < options.panels; ++p) {
      gauss_legendre_on(options.nodes, seg.t0 + p * h, seg.t0 + (p + 1) * h, nodes, weights);
      for (std::size_t q = 0; q < nodes.size(); ++q) {
        const Eigen::VectorXd prof = decay(sys.lambda.head(K), seg.t1 - nodes[q]).cwiseProduct(seg.mu);
        total += weights[q] * prof.dot(Gk * prof);
      }
    }
  }
  return total;
}

LRSchedule lebeau_robbiano_schedule(int N, double s, double delta) {
  require(N >= 0, ErrorCode::kInvalidArgument, "degree must be non-negative");
  LRSchedule sched;
  sched.a = 0.5 * (1.0 + delta);
  sched.b = s;
  require(delta >= 0.0 && sched.a < sched.b, ErrorCode::kInvalidArgument,
          "schedule needs a = (1+delta)/2 < b = s");
  while ((1LL << sched.J) < N) ++sched.J;
  for (int j = 0; j < sched.J; ++j) {
    sched.numerators.push_back(1LL << (sched.J - j - 1));
    sched.levels.push_back(std::min(1 << j, N));
  }
  sched.numerators.push_back(1);
  sched.levels.push_back(std::min(1 << sched.J, N));
  return sched;
}

LRResult lebeau_robbiano_synthesize(const TruncatedSystem& sys, const ControlProblem& problem,
                                    const LROptions& options) {
  require(problem.T > 0.0, ErrorCode::kInvalidArgument, "horizon must be positive");
  require(problem.f0.size() == sys.lambda.size(), ErrorCode::kDimensionMismatch,
          "initial state not in E_N");
  LRResult res;
  res.schedule = lebeau_robbiano_schedule(sys.N, sys.spec.s, problem.delta);
  const double norm0 = problem.f0.norm();
  const double denom = std::ldexp(1.0, res.schedule.J);
  Eigen::VectorXd f = problem.f0;
  long long elapsed = 0;
  for (std::size_t j = 0; j < res.schedule.numerators.size(); ++j) {
    LRStage stage;
    stage.start = problem.T * static_cast<double>(elapsed) / denom;
    elapsed += res.schedule.numerators[j];
    stage.end = problem.T * static_cast<double>(elapsed) / denom;
    stage.control_end = 0.5 * (stage.start + stage.end);
    stage.planned_level = res.schedule.levels[j];
    const double tau = stage.control_end - stage.start;
    try {
      int k = stage.planned_level;
      GramianResult gr = gramian(sys, tau, k, options.gramian);
      while (!(gr.condition <= options.condition_cap) && k > 0) {
        k /= 2;
        gr = gramian(sys, tau, k, options.gramian);
      }
      stage.level = k;
      stage.condition = gr.condition;
      const Eigen::Index K = sys.size(k);
      const Eigen::VectorXd g = f.head(K);
      if (g.norm() > 0.0) {
        ControlSegment seg = solve_segment(sys.lambda.head(K), gr, g, tau, k, options.condition_cap);
        seg.t0 = stage.start;
        seg.t1 = stage.control_end;
        f = advance_segment(sys, f, seg, options.simulation);
        stage.cost = seg.cost;
        res.signal.total_cost += seg.cost;
        res.signal.segments.push_back(std::move(seg));
      } else {
        f = decay(sys.lambda, tau).cwiseProduct(f);
      }
      stage.low_residual = f.head(K).norm();
      f = decay(sys.lambda, stage.end - stage.control_end).cwiseProduct(f);
      stage.residual = f.norm();
      res.stages.push_back(stage);
    } catch (const Error& e) {
      res.stages.push_back(stage);
      res.failure = e.what();
      res.terminal_residual = std::numeric_limits<double>::infinity();
      res.resimulated_residual = std::numeric_limits<double>::infinity();
      return res;
    }
  }
  const double scale = norm0 > 0.0 ? norm0 : 1.0;
  res.terminal_residual = f.norm() / scale;
  SimulationOptions fine = options.simulation;
  fine.nodes *= 2;
  res.resimulated_residual = simulate(sys, problem.f0, res.signal, problem.T, fine).norm() / scale;
  res.success = res.terminal_residual <= options.tol && res.resimulated_residual <= options.tol;
  return res;
}

HUMResult one_shot_hum(const TruncatedSystem& sys, const ControlProblem& problem,
                       const LROptions& options) {
  require(problem.T > 0.0, ErrorCode::kInvalidArgument, "horizon must be positive");
  HUMResult res;
  const GramianResult gr = gramian(sys, problem.T, sys.N, options.gramian);
  ControlSegment seg =
      solve_segment(sys.lambda, gr, problem.f0, problem.T, sys.N, options.condition_cap);
  res.duality_cost = decay(sys.lambda, problem.T).cwiseProduct(problem.f0).dot(seg.mu);
  res.signal.total_cost = seg.cost;
  res.signal.segments.push_back(std::move(seg));
  const double norm0 = problem.f0.norm();
  res.terminal_residual = simulate(sys, problem.f0, res.signal, problem.T, options.simulation).norm() /
                          (norm0 > 0.0 ? norm0 : 1.0);
  return res;
}

ObservabilityReport observability_lower_bound(const TruncatedSystem& sys, double T,
                                              const GramianOptions& options) {
  const GramianResult gr = gramian(sys, T, sys.N, options);
  Eigen::LLT<Eigen::MatrixXd> llt(gr.W);
  if (llt.info() != Eigen::Success) {
    fail(ErrorCode::kSingularGramian, "observation form is not positive definite at T = " +
                                          std::to_string(T));
  }
  const Eigen::MatrixXd M =
      llt.matrixL().solve(Eigen::MatrixXd(decay(sys.lambda, T).asDiagonal()));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  ObservabilityReport rep;
  rep.T = T;
  rep.N = sys.N;
  rep.C_T = svd.singularValues()(0) * svd.singularValues()(0);
  rep.nodes = gr.nodes;
  return rep;
}

namespace {

struct KappaSearch {
  double kappa = 0.0;
  double A = 0.0;
  double C = 0.0;
  double ssr = 0.0;
  bool at_bound = false;
};

KappaSearch search_kappa(const std::vector<std::pair<double, double>>& data, const Eigen::VectorXd& y,
                         bool intercept) {
  const auto m = y.size();
  const int cols = intercept ? 2 : 1;
  Eigen::VectorXd coef;
  auto solve = [&](double kappa) {
    Eigen::MatrixXd X(m, cols);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (intercept) X(i, 0) = 1.0;
      X(i, cols - 1) = std::pow(data[i].first, -kappa);
    }
    coef = X.colPivHouseholderQr().solve(y);
    return (y - X * coef).squaredNorm();
  };
  constexpr int kGrid = 400;
  const double lo = std::log(1e-3);
  const double hi = std::log(10.0);
  int best = 0;
  double best_ssr = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kGrid; ++i) {
    const double ssr = solve(std::exp(lo + (hi - lo) * i / kGrid));
    if (ssr < best_ssr) {
      best_ssr = ssr;
      best = i;
    }
  }
  double a = lo + (hi - lo) * std::max(0, best - 1) / kGrid;
  double b = lo + (hi - lo) * std::min(kGrid, best + 1) / kGrid;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 100; ++it) {
    const double c = b - phi * (b - a);
    const double d = a + phi * (b - a);
    if (solve(std::exp(c)) < solve(std::exp(d))) {
      b = d;
    } else {
      a = c;
    }
  }
  KappaSearch out;
  out.kappa = std::exp(0.5 * (a + b));
  out.ssr = solve(out.kappa);
  out.A = intercept ? coef(0) : 0.0;
  out.C = coef(cols - 1);
  // minimiser pinned to the ends of the search interval: no interior optimum
  out.at_bound = best == 0 || best == kGrid;
  return out;
}

}  // namespace

BlowupFit blowup_fit(const std::vector<std::pair<double, double>>& data, double s, double delta,
                     double m1) {
  require(data.size() >= 3, ErrorCode::kInsufficientData, "blow-up fit needs at least 3 points");
  const auto m = static_cast<Eigen::Index>(data.size());
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    require(data[i].first > 0.0 && data[i].second > 0.0, ErrorCode::kInvalidArgument,
            "times and constants must be positive");
    y(i) = std::log(data[i].second);
  }
  const double ss_tot = (y.array() - y.mean()).square().sum();
  auto r2 = [&](double ssr) { return ss_tot > 0.0 ? 1.0 - ssr / ss_tot : 1.0; };

  const KappaSearch full = search_kappa(data, y, true);
  const KappaSearch bare = search_kappa(data, y, false);
  BlowupFit fit;
  fit.kappa = full.kappa;
  fit.A = full.A;
  fit.C = full.C;
  fit.r2 = r2(full.ssr);
  fit.kappa_at_bound = full.at_bound;
  fit.kappa_bare = bare.kappa;
  fit.C_bare = bare.C;
  fit.r2_bare = r2(bare.ssr);
  fit.kappa_bare_at_bound = bare.at_bound;
  const double gap = 2.0 * s - 1.0 - delta;
  fit.exponent_full = gap > 0.0 ? (1.0 + delta) * (2.0 * m1 * s + 1.0) / gap
                                : std::numeric_limits<double>::infinity();
  fit.exponent_simple = gap > 0.0 ? (1.0 + delta) * m1 / gap : std::numeric_limits<double>::infinity();
  return fit;
}

nlohmann::json to_json(const LRResult& r) {
  nlohmann::json stages = nlohmann::json::array();
  for (const LRStage& s : r.stages) {
    stages.push_back({{"interval", {s.start, s.end}},
                      {"control_end", s.control_end},
                      {"level", s.level},
                      {"planned_level", s.planned_level},
                      {"cost", s.cost},
                      {"low_residual", s.low_residual},
                      {"residual", s.residual},
                      {"condition", s.condition}});
  }
  nlohmann::json j = {{"stages", stages},
                      {"total_cost", r.signal.total_cost},
                      {"terminal_residual", r.terminal_residual},
                      {"resimulated_residual", r.resimulated_residual},
                      {"success", r.success},
                      {"a", r.schedule.a},
                      {"b", r.schedule.b}};
  if (!r.failure.empty()) j["failure"] = r.failure;
  return j;
}

nlohmann::json to_json(const BlowupFit& f) {
  return {{"A", f.A},
          {"C", f.C},
          {"kappa", f.kappa},
          {"r2", f.r2},
          {"kappa_at_bound", f.kappa_at_bound},
          {"no_intercept", {{"C", f.C_bare},
                            {"kappa", f.kappa_bare},
                            {"r2", f.r2_bare},
                            {"kappa_at_bound", f.kappa_bare_at_bound}}},
          {"predicted_exponent_full", f.exponent_full},
          {"predicted_exponent_simple", f.exponent_simple}};
}

}  // namespace hlab
