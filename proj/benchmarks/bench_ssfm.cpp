#include <benchmark/benchmark.h>

#include "sdbp/channel.hpp"
#include "sdbp/rng.hpp"
#include "sdbp/units.hpp"

namespace {

sdbp::DualPolWaveform test_wave(std::size_t n) {
  sdbp::rng::Stream s(1);
  sdbp::DualPolWaveform w;
  w.sample_rate_hz = 4 * 14e9;
  w.x.resize(n);
  w.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    w.x[i] = 0.02 * s.cgaussian();
    w.y[i] = 0.02 * s.cgaussian();
  }
  return w;
}

void BM_SsfmForward(benchmark::State& state) {
  const auto w = test_wave(state.range(0));
  sdbp::FiberParams smf;
  sdbp::StepPlan plan;
  plan.segment_lengths_km.assign(10, smf.length_km / 10);
  for (auto _ : state) {
    auto out = sdbp::ssfm(w, smf, plan, sdbp::Direction::forward, 8.0 / 9.0);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() * 10);  // segments
}
BENCHMARK(BM_SsfmForward)->Arg(2176)->Arg(4224)->Arg(16512);

void BM_EdfaInverseParticle(benchmark::State& state) {
  const auto w = test_wave(state.range(0));
  sdbp::AmplifierParams amp{sdbp::db_to_linear(12.0), 5.0, 14e9, 1550.0};
  sdbp::rng::Stream noise(7);
  for (auto _ : state) {
    auto out = sdbp::edfa_inverse_particle(w, amp, &noise);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_EdfaInverseParticle)->Arg(2176)->Arg(16512);

void BM_MatchedFilter(benchmark::State& state) {
  const auto pulse = sdbp::make_rrc_pulse(0.25, 16, 4);
  const auto w = test_wave((512 + 16) * 4 + 64);
  for (auto _ : state) {
    auto s = sdbp::matched_filter_sample(w, pulse, sdbp::shaped_timing_offset(pulse),
                                         512, 1.0);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * 512);
}
BENCHMARK(BM_MatchedFilter);

}  // namespace

BENCHMARK_MAIN();
