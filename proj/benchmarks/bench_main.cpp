#include <benchmark/benchmark.h>

#include <cmath>

#include "ineqforge/certificates.hpp"
#include "ineqforge/conversions.hpp"
#include "ineqforge/verify.hpp"

using namespace ineqforge;

static void BM_SpectralGap(benchmark::State& state) {
  const auto model = build_model(PotentialSpec::gaussian(0.5), 8.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(spectral_gap(model).gap);
}
BENCHMARK(BM_SpectralGap)->Arg(501)->Arg(2001)->Unit(benchmark::kMillisecond);

static void BM_FitWitness(benchmark::State& state) {
  const auto spec = PotentialSpec::double_well(1.0, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(fit_witness(spec, WitnessParams::exp_aV(0.5)).b_const);
}
BENCHMARK(BM_FitWitness)->Unit(benchmark::kMillisecond);

static void BM_RouteTwoCertificate(benchmark::State& state) {
  const auto spec = PotentialSpec::gaussian(0.5);
  const auto witness = fit_witness(spec, WitnessParams::exp_aV(0.5));
  for (auto _ : state) {
    benchmark::DoNotOptimize(certify_route(spec, witness, Route::main2).table.log_beta.size());
  }
}
BENCHMARK(BM_RouteTwoCertificate)->Unit(benchmark::kMillisecond);

static void BM_EmpiricalBeta(benchmark::State& state) {
  const auto model = build_model(PotentialSpec::gaussian(0.5), 8.0, 2001);
  const auto battery = make_battery(model);
  for (auto _ : state) benchmark::DoNotOptimize(empirical_beta(model, battery, 0.1).value);
}
BENCHMARK(BM_EmpiricalBeta)->Unit(benchmark::kMillisecond);

static void BM_Xi(benchmark::State& state) {
  const RateFunction rate([](double log_s) { return -0.5 * (std::log(4.0 * std::acos(-1.0)) + log_s); },
                          ClassTag::polynomial(0.5), {}, Validity{});
  for (auto _ : state) benchmark::DoNotOptimize(xi_from_beta(rate, 3.0));
}
BENCHMARK(BM_Xi)->Unit(benchmark::kMicrosecond);

static void BM_FSobolev(benchmark::State& state) {
  const RateFunction rate([](double log_s) { return std::exp(-log_s); }, ClassTag::exponential(1.0), {},
                          Validity{});
  for (auto _ : state) benchmark::DoNotOptimize(fsob_from_beta(rate, 1.0, 1.0, 100.0));
}
BENCHMARK(BM_FSobolev)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
