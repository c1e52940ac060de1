#include <benchmark/benchmark.h>

#include "bjcc/erlang.hpp"
#include "bjcc/mcmc.hpp"
#include "bjcc/special_math.hpp"
#include "bjcc/staffing_solver.hpp"
#include "bjcc/vb_engine.hpp"

namespace {

using namespace bjcc;

void BM_LogGamma(benchmark::State& state) {
  double x = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(special::log_gamma(x));
    x = x < 500.0 ? x * 1.01 : 0.5;
  }
}
BENCHMARK(BM_LogGamma);

void BM_IncompleteBeta(benchmark::State& state) {
  const double a = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(special::reg_incomplete_beta(a, a, 0.51));
}
BENCHMARK(BM_IncompleteBeta)->Arg(5)->Arg(200)->Arg(2000);

void BM_ErlangC(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(erlang_c_delay(0.9 * c, c));
}
BENCHMARK(BM_ErlangC)->Arg(20)->Arg(500);

void BM_MaxLoad(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(max_load_for_target(20, 0.5));
}
BENCHMARK(BM_MaxLoad);

void BM_FitVb(benchmark::State& state) {
  const auto stats = suff_stats(simulate_dataset(TrueParams{}, static_cast<std::size_t>(state.range(0)), Seed{1}));
  for (auto _ : state) benchmark::DoNotOptimize(fit_vb(stats, PriorSpec{}));
}
BENCHMARK(BM_FitVb)->Arg(125)->Arg(2000);

void BM_RunChain(benchmark::State& state) {
  const auto stats = suff_stats(simulate_dataset(TrueParams{}, 2000, Seed{1}));
  const McmcConfig cfg{1000, 200, 0.05, Seed{2}};
  for (auto _ : state) benchmark::DoNotOptimize(run_chain(stats, PriorSpec{}, cfg));
}
BENCHMARK(BM_RunChain);

void BM_SolveStaffingVb(benchmark::State& state) {
  const auto q = fit_vb(suff_stats(simulate_dataset(TrueParams{}, 2000, Seed{1})), PriorSpec{}).posterior;
  const StaffingSpec spec{0.5, 0.7, 200};
  for (auto _ : state)
    benchmark::DoNotOptimize(
        solve_staffing([&](int c) { return constraint_probability_gamma(q, c, 0.5); }, spec, start_hint(q)));
}
BENCHMARK(BM_SolveStaffingVb);

} // namespace
BENCHMARK_MAIN();
