#include "hlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include "hlab/bernstein.hpp"
#include "hlab/control.hpp"
#include "hlab/error.hpp"
#include "hlab/geometry.hpp"
#include "hlab/quadratic_symbols.hpp"
#include "hlab/semigroup.hpp"
#include "hlab/spectral.hpp"

#ifndef HLAB_VERSION
#define HLAB_VERSION "unknown"
#endif

namespace hlab {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

template <class T>
T param(const json& p, const char* key, T fallback) {
  return p.contains(key) ? p.at(key).get<T>() : fallback;
}

std::vector<int> degree_list(const json& j) {
  std::vector<int> out;
  if (j.is_array()) {
    for (const auto& v : j) out.push_back(v.get<int>());
  } else if (j.is_object()) {
    const int from = j.at("from").get<int>();
    const int to = j.at("to").get<int>();
    const int step = j.value("step", 1);
    require(step > 0, ErrorCode::kConfigError, "degree range step must be positive");
    for (int n = from; n <= to; n += step) out.push_back(n);
  } else {
    out.push_back(j.get<int>());
  }
  return out;
}

std::vector<double> number_list(const json& j) {
  std::vector<double> out;
  if (j.is_array()) {
    for (const auto& v : j) out.push_back(v.get<double>());
  } else {
    out.push_back(j.get<double>());
  }
  return out;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// Files produced by one run, removed again if the run fails.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) {}

  void write(const std::string& name, const std::string& content) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::kIoError, "cannot write " + path.string());
    written_.push_back(name);
    out << content;
    if (!out) fail(ErrorCode::kIoError, "write failed for " + path.string());
  }

  void cleanup() noexcept {
    std::error_code ec;
    for (const std::string& name : written_) fs::remove(dir_ / name, ec);
    fs::remove(dir_ / "manifest.json.tmp", ec);
  }

  const std::vector<std::string>& files() const { return written_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> written_;
};

class Csv {
 public:
  explicit Csv(std::initializer_list<const char*> header) {
    bool first = true;
    for (const char* h : header) {
      if (!first) out_ << ',';
      out_ << h;
      first = false;
    }
    out_ << '\n';
  }
  template <class... Ts>
  void row(const Ts&... values) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(values), first = false), ...);
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  std::ostringstream out_;
};

struct Acceptance {
  std::vector<AcceptanceCheck> checks;

  void at_most(const std::string& name, double value, double threshold) {
    checks.push_back({name, value, threshold, value <= threshold});
  }
  void at_least(const std::string& name, double value, double threshold) {
    checks.push_back({name, value, threshold, value >= threshold});
  }
  void is_true(const std::string& name, bool value) {
    checks.push_back({name, value ? 1.0 : 0.0, 1.0, value});
  }
};

struct Context {
  const json& params;
  const json& acceptance;
  std::uint64_t seed;
  int threads;
  Outputs& out;
  Acceptance& accept;
};

GramOptions gram_options_from(const json& p) {
  GramOptions o;
  if (!p.contains("quad")) return o;
  const json& q = p["quad"];
  o.panel = q.value("panel", o.panel);
  o.nodes = q.value("nodes", o.nodes);
  o.radius = q.value("radius", o.radius);
  o.verify = q.value("verify", o.verify);
  o.tol = q.value("tol", o.tol);
  return o;
}

void run_spectral_scan(Context& ctx) {
  const json& p = ctx.params;
  const int dim = param(p, "dim", 1);
  const std::vector<int> Ns = degree_list(p.at("N"));
  const ControlSet omega = control_set_from_json(p.at("omega"), dim, ctx.seed);
  const GramOptions gopts = gram_options_from(p);

  struct Row {
    double lambda = 0.0, C = 0.0, quad = 0.0;
  };
  std::vector<Row> rows(Ns.size());
  parallel_for(Ns.size(), ctx.threads, [&](std::size_t i) {
    const GramMatrix gram = gram_matrix(omega, Ns[i], gopts);
    const SpectralConstant sc = spectral_constant(gram);
    rows[i] = {sc.lambda_min, sc.C, gram.quad_error >= 0.0 ? gram.quad_error : gopts.tol};
  });

  Csv csv({"N", "lambda_min", "C_N", "quad_tol"});
  std::vector<std::pair<int, double>> pairs;
  bool nondecreasing = true;
  double max_dev = 0.0;
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    csv.row(Ns[i], rows[i].lambda, rows[i].C, rows[i].quad);
    pairs.emplace_back(Ns[i], rows[i].C);
    max_dev = std::max(max_dev, std::abs(rows[i].C - 1.0));
    if (i && rows[i].C < rows[i - 1].C * (1.0 - 1e-6)) nondecreasing = false;
  }
  ctx.out.write("spectral.csv", csv.str());

  json report = {{"omega", omega.describe()}, {"nondecreasing", nondecreasing},
                 {"max_abs_C_minus_one", max_dev}};
  const double epsilon = param(p, "epsilon", 1.0);
  const bool fit = pairs.size() >= 5;
  if (fit) report["fit"] = to_json(growth_fit(pairs, epsilon));
  ctx.out.write("fit.json", report.dump(2) + "\n");

  std::ostringstream gp;
  gp << "set datafile separator ','\n"
     << "set key autotitle columnhead\n"
     << "set xlabel 'N^(1-eps/2)'\nset ylabel 'log C_N'\n"
     << "set terminal svg size 800,500\nset output 'spectral.svg'\n"
     << "eps = " << format_double(epsilon) << "\n"
     << "plot 'spectral.csv' using ($1**(1-eps/2)):(log($3)) with linespoints title 'log C_N'\n";
  ctx.out.write("spectral.gp", gp.str());

  const json& a = ctx.acceptance;
  if (a.contains("min_r2")) {
    ctx.accept.at_least("r2", fit ? report["fit"]["r2"].get<double>() : 0.0, a["min_r2"].get<double>());
  }
  if (a.contains("max_abs_C_minus_one")) {
    ctx.accept.at_most("max_abs_C_minus_one", max_dev, a["max_abs_C_minus_one"].get<double>());
  }
  if (a.value("nondecreasing", false)) ctx.accept.is_true("nondecreasing", nondecreasing);
}

void run_bernstein_check(Context& ctx) {
  const json& p = ctx.params;
  const int dim = param(p, "dim", 1);
  const std::vector<int> degrees = degree_list(p.at("degrees"));
  const int samples = param(p, "samples", 50);
  const int max_order = param(p, "max_order", 6);
  const double epsilon = param(p, "epsilon", 0.5);
  const double delta = param(p, "delta", 0.5);
  std::mt19937_64 rng(ctx.seed);

  Csv csv({"N", "abs_alpha", "abs_beta", "lhs", "rhs", "ratio"});
  std::vector<HermiteExpansion> pool;
  std::size_t violations = 0;
  double max_ratio = 0.0;
  for (int N : degrees) {
    for (int s = 0; s < samples; ++s) {
      HermiteExpansion f = random_expansion(dim, N, rng);
      for (const BernsteinCheck& c : crude_bernstein_sweep(f, max_order)) {
        csv.row(N, c.alpha.order(), c.beta.order(), c.lhs, c.rhs, c.ratio);
        max_ratio = std::max(max_ratio, c.ratio);
        if (c.ratio > 1.0 + 1e-10) ++violations;
      }
      pool.push_back(std::move(f));
    }
  }
  ctx.out.write("bernstein.csv", csv.str());

  const double gmax = p.contains("gamma_grid") ? p["gamma_grid"].value("max", 50.0) : 50.0;
  const double gstep = p.contains("gamma_grid") ? p["gamma_grid"].value("step", 0.5) : 0.5;
  std::vector<double> grid;
  for (double x = gstep; x <= gmax + 1e-12; x += gstep) grid.push_back(x);
  const GammaReport gamma = gamma_inequality_check(grid, grid, 1.0);
  const BernsteinConstantFit fit = bernstein_constant_fit(pool, epsilon, delta, max_order);
  const json report = {{"violations", violations},
                       {"max_ratio", max_ratio},
                       {"constants", to_json(fit)},
                       {"gamma", to_json(gamma)}};
  ctx.out.write("constants.json", report.dump(2) + "\n");

  ctx.out.write("bernstein.gp",
                "set datafile separator ','\nset key autotitle columnhead\n"
                "set terminal svg size 800,500\nset output 'bernstein.svg'\n"
                "set xlabel '|alpha|+|beta|'\nset ylabel 'lhs/rhs'\n"
                "plot 'bernstein.csv' using ($2+$3):6 with points pt 7 ps 0.3 title 'ratio'\n");

  const json& a = ctx.acceptance;
  ctx.accept.at_most("violations", static_cast<double>(violations), a.value("max_violations", 0.0));
  if (a.contains("max_ratio")) ctx.accept.at_most("max_ratio", max_ratio, a["max_ratio"].get<double>());
  if (a.value("gamma_inequalities", false)) {
    ctx.accept.is_true("gamma_inequalities", gamma.power_bound_ok && gamma.beta_bound_ok);
  }
}

void run_covering(Context& ctx) {
  const json& p = ctx.params;
  const Box box = box_from_json(p.at("box"));
  const DensityFn rho = density_from_json(p.at("density"));
  CoveringOptions copts;
  copts.spacing = param(p, "spacing", 0.0);
  const int pts = param(p, "test_points_per_axis", box.dim() == 1 ? 10000 : 400);

  const DensityReport dens = density_validate(rho, box, param(p, "density_samples", 512));
  const Covering cov = covering_generate(rho, box, copts);
  const CoveringCheck check = covering_verify(cov, box, pts);

  std::ostringstream csv;
  write_covering_csv(cov, csv);
  ctx.out.write("covering.csv", csv.str());
  const json report = {{"centers", cov.centers.size()},
                       {"overlap_bound", cov.overlap_bound},
                       {"check", to_json(check)},
                       {"density", to_json(dens)}};
  ctx.out.write("covering_check.json", report.dump(2) + "\n");
  if (box.dim() == 1) {
    ctx.out.write("covering.gp",
                  "set datafile separator ','\nset terminal svg size 800,400\n"
                  "set output 'covering.svg'\nset xlabel 'x'\nset ylabel 'radius'\n"
                  "plot 'covering.csv' skip 1 using 1:2:($1-$2):($1+$2) with xerrorbars title 'B(x_k, rho(x_k))'\n");
  } else {
    ctx.out.write("covering.gp",
                  "set datafile separator ','\nset terminal svg size 700,700\n"
                  "set output 'covering.svg'\nset size ratio -1\n"
                  "plot 'covering.csv' skip 1 using 1:2:3 with circles title 'B(x_k, rho(x_k))'\n");
  }

  const json& a = ctx.acceptance;
  ctx.accept.at_most("max_multiplicity", check.max_multiplicity,
                     a.value("max_multiplicity", static_cast<double>(cov.overlap_bound)));
  if (a.value("require_covered", true)) ctx.accept.is_true("covered", check.covered);
  if (a.value("require_disjoint", true)) ctx.accept.is_true("disjoint", check.disjoint);
  if (a.value("require_lipschitz", false)) ctx.accept.is_true("lipschitz", dens.lipschitz_ok);
}

void run_dissipation(Context& ctx) {
  const json& p = ctx.params;
  const int dim = param(p, "dim", 1);
  const int N = p.at("N").get<int>();
  const EvolutionSpec spec(p.at("s").get<double>(), dim);
  const int k = param(p, "k", N / 2);
  require(k < N, ErrorCode::kConfigError, "params.k must be below params.N");
  const std::vector<double> times = p.contains("times") ? number_list(p["times"])
                                                         : std::vector<double>{0.01, 0.1, 1.0};
  const int samples = param(p, "samples", 20);
  std::mt19937_64 rng(ctx.seed);

  Csv csv({"sample", "t", "k", "tail_norm", "bound", "bound_level_k", "bound_weak"});
  std::size_t violations = 0;
  HermiteExpansion first(dim, N);
  for (int s = 0; s < samples; ++s) {
    const HermiteExpansion f = random_expansion(dim, N, rng);
    if (s == 0) first = f;
    for (double t : times) {
      const DissipationReport r = dissipation_tail(f, k, t, spec);
      if (!r.holds) ++violations;
      csv.row(s, t, k, r.tail_norm, r.bound, r.bound_level_k, r.bound_weak);
    }
  }
  double sharp = 0.0;
  MultiIndex top = MultiIndex::zero(dim);
  for (int i = 0; i <= k; ++i) top = top.raised(0);
  const HermiteExpansion single = HermiteExpansion::basis(top, N);
  for (double t : times) {
    const DissipationReport r = dissipation_tail(single, k, t, spec);
    sharp = std::max(sharp, std::abs(r.tail_norm - r.bound));
    csv.row(-1, t, k, r.tail_norm, r.bound, r.bound_level_k, r.bound_weak);
  }
  ctx.out.write("dissipation.csv", csv.str());
  std::ostringstream trace;
  write_decay_trace(first, times, spec, trace);
  ctx.out.write("decay_trace.csv", trace.str());
  ctx.out.write("dissipation.gp",
                "set datafile separator ','\nset key autotitle columnhead\n"
                "set terminal svg size 800,500\nset output 'decay.svg'\nset logscale y\n"
                "set xlabel 'level'\nset ylabel '|coefficients|'\n"
                "plot 'decay_trace.csv' using 2:3 with points pt 7 ps 0.4 title 'level norm'\n");

  const json& a = ctx.acceptance;
  ctx.accept.at_most("violations", static_cast<double>(violations), a.value("max_violations", 0.0));
  ctx.accept.at_most("sharpness_error", sharp, a.value("max_sharpness_error", 1e-12));
}

void run_control(Context& ctx) {
  const json& p = ctx.params;
  const int dim = param(p, "dim", 1);
  const int N = p.at("N").get<int>();
  const EvolutionSpec spec(p.at("s").get<double>(), dim);
  const double delta = param(p, "delta", 0.0);
  const double T = p.at("T").get<double>();
  const ControlSet omega = control_set_from_json(p.at("omega"), dim, ctx.seed);
  const GramMatrix gram = gram_matrix(omega, N, gram_options_from(p));
  const TruncatedSystem sys(gram, spec);

  std::mt19937_64 rng(ctx.seed);
  double tail = 0.0;
  Eigen::VectorXd f0;
  if (p.contains("f0") && p["f0"].is_object()) {
    HermiteExpansion g = expansion_from_json(p["f0"]);
    if (g.degree() > N) {
      tail = complement(g, N).norm();
      g = HermiteExpansion(dim, N, project(g, N).coeffs().head(sys.size(N)));
    }
    f0 = g.embedded(N).coeffs();
  } else {
    f0 = random_expansion(dim, N, rng).coeffs();
  }

  LROptions opts;
  opts.tol = param(p, "tol", opts.tol);
  const LRResult lr = lebeau_robbiano_synthesize(sys, {T, delta, f0}, opts);
  const HUMResult hum = one_shot_hum(sys, {T, delta, f0}, opts);

  std::vector<double> sweep = p.contains("T_sweep") ? number_list(p["T_sweep"]) : std::vector<double>{};
  std::sort(sweep.begin(), sweep.end());
  struct SweepRow {
    double C_T = 0.0, cost_lr = 0.0, cost_hum = 0.0, residual = 0.0;
  };
  std::vector<SweepRow> rows(sweep.size());
  parallel_for(sweep.size(), ctx.threads, [&](std::size_t i) {
    const LRResult r = lebeau_robbiano_synthesize(sys, {sweep[i], delta, f0}, opts);
    const HUMResult h = one_shot_hum(sys, {sweep[i], delta, f0}, opts);
    rows[i] = {observability_lower_bound(sys, sweep[i]).C_T, r.signal.total_cost, h.signal.total_cost,
               r.terminal_residual};
  });
  Csv csv({"T", "C_T", "cost_lr", "cost_hum", "residual_lr"});
  std::vector<std::pair<double, double>> blow;
  bool cost_monotone = true;
  bool ct_monotone = true;
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    csv.row(sweep[i], rows[i].C_T, rows[i].cost_lr, rows[i].cost_hum, rows[i].residual);
    blow.emplace_back(sweep[i], rows[i].C_T);
    if (i && rows[i].cost_lr > rows[i - 1].cost_lr * (1.0 + 1e-9)) cost_monotone = false;
    if (i && rows[i].C_T > rows[i - 1].C_T * (1.0 + 1e-9)) ct_monotone = false;
  }
  ctx.out.write("cost.csv", csv.str());

  json trace = to_json(lr);
  trace["hum"] = {{"total_cost", hum.signal.total_cost},
                  {"duality_cost", hum.duality_cost},
                  {"terminal_residual", hum.terminal_residual}};
  trace["truncation_tail"] = tail;
  trace["omega"] = omega.describe();
  trace["cost_nonincreasing"] = cost_monotone;
  trace["C_T_nonincreasing"] = ct_monotone;
  if (blow.size() >= 3) trace["blowup_fit"] = to_json(blowup_fit(blow, spec.s, delta));
  ctx.out.write("trace.json", trace.dump(2) + "\n");
  ctx.out.write("control.gp",
                "set datafile separator ','\nset key autotitle columnhead\n"
                "set terminal svg size 800,500\nset output 'control.svg'\nset logscale y\n"
                "set xlabel 'T'\n"
                "plot 'cost.csv' using 1:2 with linespoints title 'C_T', "
                "'' using 1:3 with linespoints title 'cost (dyadic schedule)', "
                "'' using 1:4 with linespoints title 'cost (one shot)'\n");

  const json& a = ctx.acceptance;
  ctx.accept.at_most("terminal_residual", lr.terminal_residual, a.value("max_residual", opts.tol));
  ctx.accept.at_most("resimulated_residual", lr.resimulated_residual, a.value("max_residual", opts.tol));
  if (a.value("cost_nonincreasing", false)) ctx.accept.is_true("cost_nonincreasing", cost_monotone);
  if (a.value("C_T_nonincreasing", false)) ctx.accept.is_true("C_T_nonincreasing", ct_monotone);
  if (a.contains("min_kappa") && trace.contains("blowup_fit")) {
    const json& nb = trace["blowup_fit"]["no_intercept"];
    ctx.accept.at_least("kappa", nb["kappa"].get<double>(), a["min_kappa"].get<double>());
    ctx.accept.is_true("kappa_interior", !nb["kappa_at_bound"].get<bool>());
  }
}

void run_singular_space(Context& ctx) {
  const json& p = ctx.params;
  const json& form = p.at("form");
  const QuadraticForm q = form.is_string() ? catalog_form(form.get<std::string>())
                                           : quadratic_form_from_json(form);
  const double tol = param(p, "tol", 1e-9);
  const HamiltonMap F = hamilton_map(q);
  const SingularSpaceResult S = singular_space(F, tol);
  json out = to_json(S);
  out["hamilton_consistency"] = F.consistency;
  out["real_part_nonnegative"] = q.real_part_nonnegative();
  out["partially_elliptic"] = partial_ellipticity_check(q, S.basis, param(p, "samples", 64), 1e-10, ctx.seed);
  ctx.out.write("singular_space.json", out.dump(2) + "\n");

  const json& a = ctx.acceptance;
  if (a.contains("dimS")) {
    ctx.accept.checks.push_back({"dimS", static_cast<double>(S.dim()), a["dimS"].get<double>(),
                                 S.dim() == a["dimS"].get<int>()});
  }
  if (a.contains("k0")) {
    const bool want_none = a["k0"].is_null();
    const bool ok = want_none ? !S.k0.has_value() : (S.k0 && *S.k0 == a["k0"].get<int>());
    ctx.accept.checks.push_back({"k0", S.k0 ? *S.k0 : -1.0, want_none ? -1.0 : a["k0"].get<double>(), ok});
  }
  if (a.value("unambiguous", false)) ctx.accept.is_true("unambiguous", !S.ambiguous);
}

void check_number(std::vector<Diagnostic>& d, const json& p, const std::string& path, const char* key,
                  const std::function<bool(double)>& ok, const std::string& message) {
  if (!p.contains(key)) return;
  if (!p[key].is_number()) {
    d.push_back({path + key, "must be a number"});
    return;
  }
  if (!ok(p[key].get<double>())) d.push_back({path + key, message});
}

// ε and tolerance rules apply wherever the keys appear.
void walk(std::vector<Diagnostic>& d, const json& j, const std::string& path) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string here = path + it.key();
      if (it.key() == "epsilon" && it->is_number()) {
        const double e = it->get<double>();
        if (!(e > 0.0 && e <= 1.0)) d.push_back({here, "ε must lie in (0,1]"});
      }
      const bool tol_key = it.key() == "tol" || it.key() == "rel_tol" ||
                           (it.key().size() > 4 && it.key().substr(it.key().size() - 4) == "_tol");
      if (tol_key && it->is_number() && !(it->get<double>() > 0.0)) {
        d.push_back({here, "tolerances must be positive"});
      }
      walk(d, *it, here + ".");
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) walk(d, j[i], path.substr(0, path.size() - 1) + "[" + std::to_string(i) + "].");
  }
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

const char* version_string() { return HLAB_VERSION; }

json parse_config(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    fail(ErrorCode::kConfigError, "config syntax error at line " + std::to_string(line) + ", column " +
                                      std::to_string(col) + ": " + e.what());
  }
}

json load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIoError, "cannot read config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

Box box_from_json(const json& j) {
  require(j.is_array() && !j.empty(), ErrorCode::kConfigError, "box must be a list of [lo, hi] pairs");
  Box box;
  if (j[0].is_number()) {
    require(j.size() == 2, ErrorCode::kConfigError, "1-D box must be [lo, hi]");
    box.sides.push_back({j[0].get<double>(), j[1].get<double>()});
  } else {
    for (const auto& s : j) {
      require(s.is_array() && s.size() == 2, ErrorCode::kConfigError, "box side must be [lo, hi]");
      box.sides.push_back({s[0].get<double>(), s[1].get<double>()});
    }
  }
  for (const Interval& i : box.sides) {
    require(i.hi > i.lo, ErrorCode::kConfigError, "box sides need lo < hi");
  }
  return box;
}

DensityFn density_from_json(const json& j) {
  require(j.is_object() && j.contains("type"), ErrorCode::kConfigError, "density needs a type");
  const std::string type = j["type"].get<std::string>();
  if (type == "constant") return DensityFn::constant(j.at("m").get<double>());
  if (type == "power") return DensityFn::power(j.at("R").get<double>(), j.at("epsilon").get<double>());
  if (type == "tabulated") {
    std::optional<DensityBounds> bounds;
    if (j.contains("bounds")) {
      const json& b = j["bounds"];
      bounds = DensityBounds{b.at("m").get<double>(), b.at("R").get<double>(), b.at("epsilon").get<double>()};
    }
    return DensityFn::tabulated(j.at("radii").get<std::vector<double>>(),
                                j.at("values").get<std::vector<double>>(), bounds);
  }
  fail(ErrorCode::kConfigError, "unknown density type '" + type + "'");
}

ControlSet control_set_from_json(const json& j, int dim, std::uint64_t seed) {
  require(j.is_object() && j.contains("type"), ErrorCode::kConfigError, "omega needs a type");
  const std::string type = j["type"].get<std::string>();
  if (type == "full") return ControlSet::full(dim);
  if (type == "intervals") {
    require(dim == 1, ErrorCode::kConfigError, "interval sets are 1-D");
    std::vector<Interval> parts;
    for (const auto& i : j.at("intervals")) parts.push_back({i.at(0).get<double>(), i.at(1).get<double>()});
    return ControlSet::intervals(std::move(parts));
  }
  if (type == "half-line") {
    require(dim == 1, ErrorCode::kConfigError, "half-line is 1-D");
    return ControlSet::intervals({{j.value("start", 0.0), std::numeric_limits<double>::infinity()}});
  }
  if (type == "boxes") {
    std::vector<Box> boxes;
    for (const auto& b : j.at("boxes")) boxes.push_back(box_from_json(b));
    return ControlSet::boxes(dim, std::move(boxes));
  }
  if (type == "periodic") {
    return ControlSet::periodic(dim, j.at("period").get<double>(), j.at("fraction").get<double>(),
                                j.value("offset", 0.0));
  }
  if (type == "balls") {
    std::vector<Ball> balls;
    for (const auto& b : j.at("balls")) {
      balls.push_back({b.at("center").get<std::vector<double>>(), b.at("radius").get<double>()});
    }
    return ControlSet::balls(dim, std::move(balls));
  }
  if (type == "density-gapped") {
    require(dim == 1, ErrorCode::kConfigError, "density-gapped sets are 1-D");
    return density_gapped_set(density_from_json(j.at("density")), j.value("extent", 25.0),
                              j.value("kept_fraction", 0.5));
  }
  if (type == "random-cells") {
    require(dim == 1, ErrorCode::kConfigError, "random-cell sets are 1-D");
    return random_cell_set(j.at("fraction").get<double>(), j.value("cells", 50), seed);
  }
  fail(ErrorCode::kConfigError, "unknown omega type '" + type + "'");
}

std::vector<Diagnostic> validate_config(const json& config) {
  std::vector<Diagnostic> d;
  if (!config.is_object()) return {{"", "config must be a JSON object"}};
  if (!config.contains("kind") || !config["kind"].is_string()) {
    d.push_back({"kind", "missing experiment kind"});
    return d;
  }
  const std::string kind = config["kind"].get<std::string>();
  if (std::find(std::begin(kExperimentKinds), std::end(kExperimentKinds), kind) == std::end(kExperimentKinds)) {
    d.push_back({"kind", "unknown experiment kind '" + kind + "'"});
    return d;
  }
  if (config.contains("seed") && !(config["seed"].is_number_integer() && config["seed"].get<long long>() >= 0)) {
    d.push_back({"seed", "seed must be a non-negative integer"});
  }
  if (config.contains("acceptance") && !config["acceptance"].is_object()) {
    d.push_back({"acceptance", "acceptance must be an object"});
  }
  const json empty = json::object();
  const json& p = config.contains("params") ? config["params"] : empty;
  if (!p.is_object()) {
    d.push_back({"params", "params must be an object"});
    return d;
  }
  walk(d, p, "params.");

  check_number(d, p, "params.", "s", [](double s) { return s > 0.5; }, "s must exceed 1/2");
  check_number(d, p, "params.", "s", [](double s) { return s <= 1.0; }, "s must not exceed 1");
  if (kind == "control-run" && p.contains("delta") && p["delta"].is_number()) {
    const double delta = p["delta"].get<double>();
    if (delta < 0.0) d.push_back({"params.delta", "δ must be non-negative"});
    if (p.contains("s") && p["s"].is_number() && delta >= 2.0 * p["s"].get<double>() - 1.0) {
      d.push_back({"params.delta", "δ < 2s−1 required"});
    }
  }
  if (kind == "bernstein-check") {
    check_number(d, p, "params.", "delta", [](double x) { return x > 0.0 && x <= 1.0; },
                 "δ must lie in (0,1]");
  }
  check_number(d, p, "params.", "dim", [](double n) { return n >= 1 && n <= 3 && n == std::floor(n); },
               "dim must be 1, 2 or 3");
  check_number(d, p, "params.", "T", [](double t) { return t > 0.0; }, "T must be positive");
  if (p.contains("N") && p["N"].is_number()) check_number(d, p, "params.", "N", [](double n) { return n >= 0 && n == std::floor(n); },
               "N must be a non-negative integer");

  auto need = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys) {
      if (!p.contains(k)) d.push_back({std::string("params.") + k, "required field is missing"});
    }
  };
  if (kind == "spectral-scan") need({"N", "omega"});
  if (kind == "bernstein-check") need({"degrees"});
  if (kind == "covering") need({"box", "density"});
  if (kind == "dissipation") need({"N", "s"});
  if (kind == "control-run") need({"N", "s", "T", "omega"});
  if (kind == "singular-space") need({"form"});
  if (!d.empty()) return d;

  // Structural checks by construction; errors become diagnostics.
  auto attempt = [&](const char* field, const std::function<void()>& fn) {
    try {
      fn();
    } catch (const Error& e) {
      d.push_back({std::string("params.") + field, e.what()});
    } catch (const json::exception& e) {
      d.push_back({std::string("params.") + field, e.what()});
    }
  };
  const int dim = p.value("dim", 1);
  if (p.contains("omega")) attempt("omega", [&] { control_set_from_json(p["omega"], dim, 1); });
  if (p.contains("density")) attempt("density", [&] { density_from_json(p["density"]); });
  if (p.contains("box")) attempt("box", [&] { box_from_json(p["box"]); });
  if (p.contains("N")) attempt("N", [&] {
      for (int n : degree_list(p["N"])) require(n >= 0, ErrorCode::kConfigError, "N must be non-negative");
    });
  if (p.contains("degrees")) attempt("degrees", [&] {
      for (int n : degree_list(p["degrees"])) require(n >= 0, ErrorCode::kConfigError, "degrees must be non-negative");
    });
  if (kind == "singular-space") attempt("form", [&] {
      if (p["form"].is_string()) {
        catalog_form(p["form"].get<std::string>());
      } else {
        quadratic_form_from_json(p["form"]);
      }
    });
  if (kind == "spectral-scan" && dim > 2) d.push_back({"params.dim", "spectral scans support n <= 2"});
  return d;
}

json to_json(const RunManifest& m) {
  json checks = json::array();
  for (const AcceptanceCheck& c : m.checks) {
    checks.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"passed", c.passed}});
  }
  return {{"kind", m.kind},         {"config_hash", m.config_hash}, {"tool_version", m.tool_version},
          {"started", m.started},   {"finished", m.finished},       {"seed", m.seed},
          {"files", m.files},       {"acceptance", {{"passed", m.passed}, {"checks", checks}}}};
}

RunManifest run_experiment(const json& config, const RunOptions& options) {
  const std::vector<Diagnostic> diags = validate_config(config);
  if (!diags.empty()) {
    std::string msg = "invalid config:";
    for (const Diagnostic& dg : diags) msg += "\n  " + dg.field + ": " + dg.message;
    fail(ErrorCode::kConfigError, msg);
  }
  RunManifest m;
  m.kind = config["kind"].get<std::string>();
  if (options.expected_kind && *options.expected_kind != m.kind) {
    fail(ErrorCode::kConfigError, "config kind '" + m.kind + "' does not match subcommand '" +
                                      *options.expected_kind + "'");
  }
  m.seed = options.seed ? *options.seed : config.value("seed", std::uint64_t{1});
  m.tool_version = version_string();
  m.config_hash = fnv1a_hex(config.dump() + "#seed=" + std::to_string(m.seed));
  m.started = utc_now();

  fs::path dir = options.out_dir;
  if (dir.empty()) dir = config.value("output_dir", std::string("."));
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIoError, "cannot create output directory " + dir.string());
  fs::remove(dir / "manifest.json", ec);

  const json empty = json::object();
  const json& params = config.contains("params") ? config["params"] : empty;
  const json& acceptance = config.contains("acceptance") ? config["acceptance"] : empty;
  Outputs out(dir);
  Acceptance accept;
  Context ctx{params, acceptance, m.seed, std::max(1, options.threads), out, accept};
  try {
    if (m.kind == "spectral-scan") run_spectral_scan(ctx);
    else if (m.kind == "bernstein-check") run_bernstein_check(ctx);
    else if (m.kind == "covering") run_covering(ctx);
    else if (m.kind == "dissipation") run_dissipation(ctx);
    else if (m.kind == "control-run") run_control(ctx);
    else run_singular_space(ctx);

    m.files = out.files();
    m.checks = accept.checks;
    m.passed = std::all_of(m.checks.begin(), m.checks.end(), [](const AcceptanceCheck& c) { return c.passed; });
    m.finished = utc_now();
    const fs::path tmp = dir / "manifest.json.tmp";
    {
      std::ofstream mf(tmp, std::ios::binary | std::ios::trunc);
      if (!mf) fail(ErrorCode::kIoError, "cannot write manifest");
      mf << to_json(m).dump(2) << '\n';
      if (!mf) fail(ErrorCode::kIoError, "manifest write failed");
    }
    fs::rename(tmp, dir / "manifest.json");
  } catch (const json::exception& e) {
    out.cleanup();
    fail(ErrorCode::kConfigError, std::string("config field error: ") + e.what());
  } catch (...) {
    out.cleanup();
    throw;
  }
  return m;
}

}  // namespace hlab
