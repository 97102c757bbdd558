#include <benchmark/benchmark.h>

#include "sdbp/detectors.hpp"
#include "sdbp/modem.hpp"

namespace {

sdbp::SymbolCloud test_cloud(const sdbp::Constellation& c, std::size_t k,
                             std::size_t np) {
  sdbp::rng::Stream s(3);
  sdbp::SymbolSequence center(k);
  for (auto& sym : center) sym = c.points[s.index(c.cardinality())];
  sdbp::SymbolCloud cloud;
  cloud.particles.assign(np, sdbp::SymbolSequence(k));
  for (auto& p : cloud.particles)
    for (std::size_t i = 0; i < k; ++i)
      for (int j = 0; j < 4; ++j) p[i][j] = center[i][j] + 0.2 * s.gaussian();
  return cloud;
}

void BM_MomentEstimation(benchmark::State& state) {
  const auto c = sdbp::Constellation::make("qpsk");
  const auto cloud = test_cloud(c, 256, state.range(0));
  for (auto _ : state) {
    for (std::size_t k = 1; k < 256; ++k) {
      auto st = sdbp::estimate_moments(cloud, k, 1);
      benchmark::DoNotOptimize(st);
    }
  }
  state.SetItemsProcessed(state.iterations() * 255);
}
BENCHMARK(BM_MomentEstimation)->Arg(200)->Arg(500);

void BM_SbsDetect(benchmark::State& state) {
  const auto c = sdbp::Constellation::make("qpsk");
  const auto cloud = test_cloud(c, 256, 200);
  for (auto _ : state) {
    auto r = sdbp::sbs_detect(cloud, c);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_SbsDetect);

void BM_ViterbiDetect(benchmark::State& state) {
  const auto c = sdbp::Constellation::make(state.range(1) == 16 ? "qpsk" : "16qam");
  const auto cloud = test_cloud(c, 256, 200);
  const int memory = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto r = sdbp::va_detect(cloud, memory, c);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_ViterbiDetect)->Args({1, 16})->Args({2, 16})->Args({1, 256});

void BM_DdDetect(benchmark::State& state) {
  const auto c = sdbp::Constellation::make("qpsk");
  const auto cloud = test_cloud(c, 256, 200);
  for (auto _ : state) {
    auto r = sdbp::dd_detect(cloud, 1, c);
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_DdDetect);

}  // namespace

BENCHMARK_MAIN();
