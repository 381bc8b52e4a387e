#include <benchmark/benchmark.h>

#include "relaydual/downlink.hpp"
#include "relaydual/network.hpp"
#include "relaydual/rates.hpp"
#include "relaydual/uplink.hpp"

using namespace relaydual;

static void BM_FixedPointCaseI(benchmark::State& state) {
  const auto instance = generate_rayleigh(3, 3, 7);
  const auto targets = RateTargets::symmetric(3, 1.0);
  const auto config = StrategyConfig::natural(StrategyCase::I, 3, 3);
  for (auto _ : state) {
    auto sol = fixed_point_solve(instance, targets, config);
    benchmark::DoNotOptimize(sol.sum_power);
  }
}
BENCHMARK(BM_FixedPointCaseI);

static void BM_FixedPointCaseIII(benchmark::State& state) {
  const auto instance = generate_rayleigh(3, 3, 7);
  const auto targets = RateTargets::symmetric(3, 1.0);
  const auto config = StrategyConfig::natural(StrategyCase::III, 3, 3);
  for (auto _ : state) {
    auto sol = fixed_point_solve(instance, targets, config);
    benchmark::DoNotOptimize(sol.sum_power);
  }
}
BENCHMARK(BM_FixedPointCaseIII);

static void BM_DualityPipelineCaseIII(benchmark::State& state) {
  const auto instance = generate_rayleigh(3, 3, 7);
  const auto targets = RateTargets::symmetric(3, 1.0);
  const auto config = StrategyConfig::natural(StrategyCase::III, 3, 3);
  for (auto _ : state) {
    auto [ul, dl] = solve_downlink_via_duality(instance, targets, config);
    benchmark::DoNotOptimize(dl.sum_power);
  }
}
BENCHMARK(BM_DualityPipelineCaseIII);

static void BM_WynerZivRates(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const auto instance = generate_rayleigh(m, 3, 11);
  UplinkPoint point;
  point.user_powers = {1.0, 2.0, 0.5};
  point.quant_noise.assign(m, 0.3);
  point.rx_beams = CMatrix(m, 3);
  for (int k = 0; k < 3; ++k) point.rx_beams(k % m, k) = 1.0;
  std::vector<int> rho(m);
  for (int i = 0; i < m; ++i) rho[i] = i;
  for (auto _ : state) {
    auto rates = uplink_fronthaul_rates(instance, point, UplinkCompression::WynerZiv, rho);
    benchmark::DoNotOptimize(rates);
  }
}
BENCHMARK(BM_WynerZivRates)->Arg(3)->Arg(6)->Arg(12);

BENCHMARK_MAIN();
