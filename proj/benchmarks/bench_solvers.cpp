#include <benchmark/benchmark.h>

#include <random>

#include "fdiscc/beamforming.hpp"
#include "fdiscc/cacheopt.hpp"
#include "fdiscc/conic.hpp"
#include "fdiscc/orchestrator.hpp"
#include "fdiscc/phaseadmm.hpp"

using namespace fdiscc;

namespace {

CVec random_vec(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  CVec v(n);
  for (auto& x : v) x = cd(nd(rng), nd(rng));
  return v;
}

Scenario make_scenario(int m_passive) {
  SystemConfig cfg = default_config();
  cfg.m_passive = m_passive;
  cfg.seed = 1;
  cfg.finalize();
  return Scenario{cfg, draw_channels(cfg), Duplex::full};
}

void BM_Qcqp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  conic::QcqpProblem p;
  CMat a(n, n);
  for (int j = 0; j < n; ++j) a.col(j) = random_vec(n, rng);
  p.a = a * a.adjoint() / n;
  p.b = random_vec(n, rng);
  p.prox_weight = 0.1;
  p.prox_center = random_vec(n, rng);
  for (int i = 0; i < 3; ++i) {
    p.d.push_back(random_vec(n, rng));
    p.e.push_back(1.0);
  }
  for (auto _ : state) benchmark::DoNotOptimize(conic::solve_qcqp(p));
}
BENCHMARK(BM_Qcqp)->Arg(8)->Arg(16)->Arg(32)->Arg(50);

void BM_TxSdr(benchmark::State& state) {
  const Scenario sc = make_scenario(16);
  std::mt19937_64 rng(1);
  const Solution sol = initialize(sc, rng).solution;
  const TxCoeffs c = assemble_tx_coeffs(sc, sol, update_aux(sc, sol));
  for (auto _ : state) benchmark::DoNotOptimize(solve_tx_sdr(c, sc.cfg.p_bs_watt));
}
BENCHMARK(BM_TxSdr)->Unit(benchmark::kMillisecond);

void BM_PhaseAdmm(benchmark::State& state) {
  const Scenario sc = make_scenario(static_cast<int>(state.range(0)));
  std::mt19937_64 rng(1);
  const Solution sol = initialize(sc, rng, fixed_phase(sc.ch)).solution;
  const AuxVars aux = update_aux(sc, sol);
  for (auto _ : state) benchmark::DoNotOptimize(optimize_phase(sc, sol, aux));
}
BENCHMARK(BM_PhaseAdmm)->Arg(16)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_Caching(benchmark::State& state) {
  const CacheConfig c = default_config().cache;
  for (auto _ : state) benchmark::DoNotOptimize(solve_caching(c));
}
BENCHMARK(BM_Caching);

void BM_FullRun(benchmark::State& state) {
  const Scenario sc = make_scenario(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run(sc));
}
BENCHMARK(BM_FullRun)->Arg(16)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
