#include <benchmark/benchmark.h>

#include "bnet/fluctuations.hpp"
#include "bnet/limit_ode.hpp"
#include "bnet/manifold.hpp"
#include "bnet/quadrature.hpp"
#include "bnet/random.hpp"
#include "bnet/simulator.hpp"

namespace {

void BM_GaussExpect(benchmark::State& state) {
  const bnet::FiringRate f = bnet::TanhAffine{0.5, 2.0, 1.0};
  double K = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bnet::gauss_expect(f, 0.3, K));
    K = K < 4.0 ? K + 1e-3 : 0.5;
  }
}
BENCHMARK(BM_GaussExpect);

void BM_SolveBalance(benchmark::State& state) {
  const bnet::NetworkParams p = bnet::reference_params();
  for (auto _ : state) benchmark::DoNotOptimize(bnet::solve_balance(1.0, 1.0, p));
}
BENCHMARK(BM_SolveBalance)->Unit(benchmark::kMillisecond);

void BM_LimitUnitHorizon(benchmark::State& state) {
  const bnet::NetworkParams p = bnet::reference_params();
  const bnet::BalancePoint b = bnet::solve_balance(1.0, 1.0, p);
  const bnet::MacroState start{b.m_e, b.m_i, 1.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(bnet::integrate(start, p, 1.0, 1e-3));
}
BENCHMARK(BM_LimitUnitHorizon)->Unit(benchmark::kMillisecond);

void BM_FixedStep(benchmark::State& state) {
  bnet::NetworkParams p = bnet::reference_params();
  p.n = static_cast<std::size_t>(state.range(0));
  const bnet::BalancePoint b = bnet::solve_balance(1.0, 1.0, p);
  const bnet::MicroState init = bnet::init_micro(b.m_e, b.m_i, 1.0, 1.0, p, 1);
  bnet::SimConfig cfg;
  cfg.T = 0.1;
  cfg.record_stride = 0.1;
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(bnet::simulate_fixed(init, p, cfg));
  state.SetItemsProcessed(state.iterations() * 100 * state.range(0));
}
BENCHMARK(BM_FixedStep)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_Philox(benchmark::State& state) {
  bnet::CounterRng g(42, 7, 0);
  for (auto _ : state) benchmark::DoNotOptimize(g());
}
BENCHMARK(BM_Philox);

void BM_Poisson(benchmark::State& state) {
  const bnet::PoissonSampler draw(static_cast<double>(state.range(0)));
  bnet::CounterRng g(42, 9, 0);
  for (auto _ : state) benchmark::DoNotOptimize(draw(g));
}
BENCHMARK(BM_Poisson)->Arg(2)->Arg(40);

void BM_CompensatedSup(benchmark::State& state) {
  std::uint64_t k = 0;
  for (auto _ : state) {
    bnet::CompensatedOptions o;
    o.stream = k++;
    benchmark::DoNotOptimize(bnet::simulate_compensated(1000, 1.0, 3, o));
  }
}
BENCHMARK(BM_CompensatedSup);

}  // namespace

BENCHMARK_MAIN();
