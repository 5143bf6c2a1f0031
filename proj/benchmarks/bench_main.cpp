#include <benchmark/benchmark.h>

#include "oamsim/analysis.hpp"
#include "oamsim/config.hpp"
#include "oamsim/scenario.hpp"

using namespace oamsim;

namespace {

// one calibrated-profile block: thinned click generation + pairing
void BM_EngineBlock(benchmark::State& state) {
  const ExperimentConfig cfg;
  EngineSettings es;
  es.n_pulses = static_cast<std::uint64_t>(state.range(0));
  es.mu = cfg.source.mu;
  es.survival_s = arm_survival(ArmPath::idler_through_bus, 0, cfg.loss, cfg.emitter,
                               cfg.spad_signal);
  es.survival_i = arm_survival(ArmPath::idler_through_bus, 0, cfg.loss, cfg.emitter,
                               cfg.spad_idler);
  es.spad_s = cfg.spad_signal;
  es.spad_i = cfg.spad_idler;
  es.seed = 1;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    es.seed = seed++;
    benchmark::DoNotOptimize(run_engine(es));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}

void BM_PairSampling(benchmark::State& state) {
  PairEventSampler sampler(0.0237, PairNumberLaw::poisson, 3);
  const auto n = static_cast<std::uint64_t>(state.range(0));
  std::uint64_t block = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sampler.block(0, n, block++));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}

void BM_HistogramPairing(benchmark::State& state) {
  // synthetic dense streams: one click per period on each arm
  std::vector<ClickRecord> sig, idl;
  const auto n = static_cast<std::size_t>(state.range(0));
  sig.reserve(n);
  idl.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    sig.push_back({i * 25000.0 + 12490.0, ClickRecord::Arm::signal, ClickRecord::Origin::pair});
    idl.push_back({i * 25000.0 + 12510.0, ClickRecord::Arm::idler, ClickRecord::Origin::pair});
  }
  for (auto _ : state)
    benchmark::DoNotOptimize(build_histogram(sig, idl, 64.0, 180000.0));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}

void BM_Transmission(benchmark::State& state) {
  const ResonatorParams params{};
  const DriveSetting drive = drive_for_power(21.0, params);
  double lambda = 1548.0;
  for (auto _ : state) {
    lambda += 0.0001;
    if (lambda > 1560.0) lambda = 1548.0;
    benchmark::DoNotOptimize(transmission(lambda, drive, params));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()));
}

}  // namespace

BENCHMARK(BM_EngineBlock)->Arg(1 << 20)->Arg(1 << 22)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PairSampling)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HistogramPairing)->Arg(1 << 14)->Arg(1 << 16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Transmission);

BENCHMARK_MAIN();
