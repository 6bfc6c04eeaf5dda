#include <benchmark/benchmark.h>

#include "dlgain/block.hpp"
#include "dlgain/downlink.hpp"
#include "dlgain/estimators.hpp"
#include "dlgain/mlp.hpp"
#include "dlgain/uplink.hpp"

namespace {

using namespace dlgain;

struct Setup {
  Scenario scenario;
  UplinkStatistics stats;
  PrecodingPlan plan;
};

Setup make_setup(int antennas, FadingMode mode, Scheme scheme) {
  NetworkConfig cfg;
  cfg.num_antennas = antennas;
  cfg.users_per_cell = 3;
  cfg.fading_mode = mode;
  Rng rng = make_stream(11, 0, 0, stream::kSetup);
  Scenario s = build_scenario(cfg, rng);
  UplinkStatistics st = precompute_statistics(s);
  PrecoderOptions opt;
  opt.scheme = scheme;
  opt.zf_norm = mode == FadingMode::kUncorrelated ? ZfNormMode::kAnalyticIid : ZfNormMode::kMonteCarlo;
  opt.zf_norm_draws = 2000;
  PrecodingPlan plan = make_precoding_plan(s, st, opt, rng);
  return {std::move(s), std::move(st), std::move(plan)};
}

void BM_ChannelBlock(benchmark::State& state) {
  const auto mode = state.range(1) != 0 ? FadingMode::kCorrelated : FadingMode::kUncorrelated;
  const Setup su = make_setup(static_cast<int>(state.range(0)), mode, Scheme::kMr);
  Rng rng = make_stream(12, 0, 1, stream::kBlock);
  ChannelBlock block;
  for (auto _ : state) {
    generate_block(su.scenario, su.stats, su.plan, rng, block);
    benchmark::DoNotOptimize(block.gains.alpha(0, 0));
  }
}
BENCHMARK(BM_ChannelBlock)->ArgsProduct({{32, 64, 128}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_SimulateBlock(benchmark::State& state) {
  const Setup su = make_setup(64, FadingMode::kUncorrelated, Scheme::kMr);
  Rng rng = make_stream(13, 0, 1, stream::kBlock);
  const ChannelBlock block = generate_block(su.scenario, su.stats, su.plan, rng);
  const int tau = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto obs = simulate_block(block.gains, su.scenario.eta(), su.scenario.config().noise_power_dl, tau, rng);
    benchmark::DoNotOptimize(obs.xi.data());
  }
}
BENCHMARK(BM_SimulateBlock)->Arg(10)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);

void BM_TMrCorrelated(benchmark::State& state) {
  const Setup su = make_setup(static_cast<int>(state.range(0)), FadingMode::kCorrelated, Scheme::kMr);
  for (auto _ : state) {
    auto t = t_mr_correlated(su.scenario, su.stats, su.plan);
    benchmark::DoNotOptimize(t.t.data());
  }
}
BENCHMARK(BM_TMrCorrelated)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_TIid(benchmark::State& state) {
  const auto scheme = state.range(0) != 0 ? Scheme::kZf : Scheme::kMr;
  const Setup su = make_setup(64, FadingMode::kUncorrelated, scheme);
  for (auto _ : state) {
    auto t = scheme == Scheme::kZf ? t_zf_iid(su.scenario, su.stats, su.plan)
                                   : t_mr_iid(su.scenario, su.stats, su.plan);
    benchmark::DoNotOptimize(t.t.data());
  }
}
BENCHMARK(BM_TIid)->Arg(0)->Arg(1);

void BM_MlpForward(benchmark::State& state) {
  Rng rng(14);
  const MlpModel model = make_default_mlp(rng);
  RowMatrix x = RowMatrix::Random(state.range(0), 3).cwiseAbs();
  for (auto _ : state) {
    auto y = forward(model, x);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MlpForward)->Arg(1)->Arg(256)->Arg(4096);

}  // namespace
BENCHMARK_MAIN();
