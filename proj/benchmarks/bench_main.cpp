#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "hlab/control.hpp"
#include "hlab/control_set.hpp"
#include "hlab/expansion.hpp"
#include "hlab/hermite.hpp"
#include "hlab/spectral.hpp"

namespace {

void BM_HermiteFunctions(benchmark::State& state) {
  const int order = static_cast<int>(state.range(0));
  std::vector<double> out(order + 1);
  double x = -3.0;
  for (auto _ : state) {
    hlab::hermite_functions(order, x, out);
    benchmark::DoNotOptimize(out.data());
    x = x > 3.0 ? -3.0 : x + 1e-3;
  }
}
BENCHMARK(BM_HermiteFunctions)->Arg(10)->Arg(100)->Arg(1000);

void BM_GramPeriodic(benchmark::State& state) {
  const auto omega = hlab::ControlSet::periodic(1, 2.0, 0.5);
  const int N = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(hlab::gram_matrix(omega, N));
}
BENCHMARK(BM_GramPeriodic)->Arg(25)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_Observability(benchmark::State& state) {
  const hlab::TruncatedSystem sys(hlab::gram_matrix(hlab::ControlSet::periodic(1, 2.0, 0.5), 25),
                                  hlab::EvolutionSpec(1.0, 1));
  for (auto _ : state) benchmark::DoNotOptimize(hlab::observability_lower_bound(sys, 0.4).C_T);
}
BENCHMARK(BM_Observability)->Unit(benchmark::kMillisecond);

void BM_DyadicControl(benchmark::State& state) {
  const hlab::TruncatedSystem sys(hlab::gram_matrix(hlab::ControlSet::periodic(1, 2.0, 0.5), 25),
                                  hlab::EvolutionSpec(1.0, 1));
  std::mt19937_64 rng(17);
  const Eigen::VectorXd f0 = hlab::random_expansion(1, 25, rng).coeffs();
  for (auto _ : state) benchmark::DoNotOptimize(hlab::lebeau_robbiano_synthesize(sys, {1.0, 0.0, f0}).terminal_residual);
}
BENCHMARK(BM_DyadicControl)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
