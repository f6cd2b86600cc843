#include <random>

#include <benchmark/benchmark.h>

#include "oamplex/duplexer.hpp"
#include "oamplex/field_render.hpp"
#include "oamplex/tomography.hpp"
#include "test_support.hpp"

namespace {

using namespace oamplex;

const BasisSpec kBasis({-4, -2, 1, 3});

void BM_LgMode(benchmark::State& state) {
  const GridSpec grid{static_cast<int>(state.range(0)), 8.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(lg_mode(3, grid));
}
BENCHMARK(BM_LgMode)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_RenderMixedState(benchmark::State& state) {
  const GridSpec grid{static_cast<int>(state.range(0)), 8.0, 1.0};
  const DensityMatrix rho(kBasis, testing::multiplexed_reference());
  for (auto _ : state) benchmark::DoNotOptimize(render_state(rho, grid));
}
BENCHMARK(BM_RenderMixedState)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_LobeCount(benchmark::State& state) {
  const auto image = render_state(make_superposition({{-2, 1.0}, {2, 1.0}}), GridSpec{});
  for (auto _ : state) benchmark::DoNotOptimize(angular_lobe_count(image, {0.5, 2.0}));
}
BENCHMARK(BM_LobeCount)->Unit(benchmark::kMicrosecond);

void BM_Duplex(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const BasisSpec basis(testing::range_basis(-6, 6));
  const auto a = testing::random_density(rng, basis);
  const auto b = testing::random_density(rng, basis);
  for (auto _ : state) benchmark::DoNotOptimize(duplex(a, b, {0.5, 0.5}, ImperfectionModel{0.3, 0.01, 0.05}));
}
BENCHMARK(BM_Duplex)->Unit(benchmark::kMicrosecond);

void BM_RunTomography(benchmark::State& state) {
  const DensityMatrix rho(kBasis, testing::multiplexed_reference());
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_tomography(rho, rho, {1e5, seed++}));
}
BENCHMARK(BM_RunTomography)->Unit(benchmark::kMicrosecond);

void BM_Fidelity(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto a = testing::random_density(rng, kBasis);
  const auto b = testing::random_density(rng, kBasis);
  for (auto _ : state) benchmark::DoNotOptimize(fidelity(a, b));
}
BENCHMARK(BM_Fidelity)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
