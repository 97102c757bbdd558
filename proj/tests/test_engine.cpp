#include <doctest.h>

#include <cmath>

#include "sdbp/engine.hpp"
#include "sdbp/modem.hpp"

using namespace sdbp;

namespace {

struct Scenario {
  Constellation c = Constellation::make("qpsk");
  PulseShape pulse = make_rrc_pulse(0.25, 16, 4);
  LinkConfig cfg;
  SymbolSequence tx;
  LinkRun run;

  Scenario(int spans, double power_dbm, bool ase, std::size_t k,
           std::uint64_t seed) {
    cfg.spans = spans;
    cfg.dcm = DcmParams{3.0};
    cfg.launch_power_dbm = power_dbm;
    cfg.symbol_rate_baud = 14e9;
    cfg.ase_enabled = ase;
    tx = random_symbols(c, k, seed);
    rng::Stream noise(rng::mix(seed));
    run = simulate_link(tx, cfg, pulse, ase ? &noise : nullptr);
  }
};

double rel_err(const DualPolWaveform& a, const DualPolWaveform& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a.x[i] - b.x[i]) + std::norm(a.y[i] - b.y[i]);
    den += std::norm(b.x[i]) + std::norm(b.y[i]);
  }
  return std::sqrt(num / den);
}

bool identical(const DualPolWaveform& a, const DualPolWaveform& b) {
  return a.x == b.x && a.y == b.y;
}

}  // namespace

TEST_CASE("noise-free single-particle backpropagation inverts the channel") {
  Scenario sc(3, 0.0, /*ase=*/false, 128, 21);
  const WaveCloud cloud =
      backpropagate(sc.run.link_output, sc.cfg, 1, 0, /*inject_noise=*/false);
  const DualPolWaveform tx_wave =
      shape(sc.tx, sc.pulse, sc.cfg.symbol_rate_baud, sc.cfg.launch_power_w());
  CHECK(rel_err(cloud.particles.front(), tx_wave) < 1e-6);
}

TEST_CASE("particle count and dimensions are preserved through the engine") {
  Scenario sc(2, 0.0, true, 64, 22);
  const WaveCloud waves = backpropagate(sc.run.r, sc.cfg, 7, 5, true);
  REQUIRE(waves.num_particles() == 7);
  for (const auto& p : waves.particles) CHECK(p.size() == sc.run.r.size());

  const SymbolCloud cloud = to_symbol_cloud(waves, sc.pulse, sc.run.timing_offset,
                                            64, sc.run.amplitude_scale);
  CHECK(cloud.num_particles() == 7);
  CHECK(cloud.num_symbols() == 64);
}

TEST_CASE("identical waveform particles give identical symbol particles") {
  Scenario sc(1, 0.0, false, 32, 23);
  WaveCloud waves;
  waves.particles.assign(3, sc.run.r);
  const SymbolCloud cloud = to_symbol_cloud(waves, sc.pulse, sc.run.timing_offset,
                                            32, sc.run.amplitude_scale);
  CHECK(cloud.particles[0] == cloud.particles[1]);
  CHECK(cloud.particles[0] == cloud.particles[2]);
}

TEST_CASE("backpropagation is seed-deterministic for any worker count") {
  Scenario sc(2, 1.0, true, 64, 24);
  const WaveCloud a = backpropagate(sc.run.r, sc.cfg, 6, 99, true, 1);
  const WaveCloud b = backpropagate(sc.run.r, sc.cfg, 6, 99, true, 4);
  REQUIRE(a.num_particles() == b.num_particles());
  for (std::size_t n = 0; n < a.num_particles(); ++n)
    CHECK(identical(a.particles[n], b.particles[n]));

  const WaveCloud c = backpropagate(sc.run.r, sc.cfg, 6, 100, true, 1);
  bool differ = false;
  for (std::size_t n = 0; n < a.num_particles() && !differ; ++n)
    differ = !identical(a.particles[n], c.particles[n]);
  CHECK(differ);
}

TEST_CASE("particles are distinct and their mean tracks the noise-free path") {
  Scenario sc(2, 0.0, true, 64, 25);
  const std::size_t np = 400;
  const WaveCloud cloud = backpropagate(sc.run.r, sc.cfg, np, 7, true, 2);
  CHECK(!identical(cloud.particles[0], cloud.particles[1]));

  const WaveCloud det = backpropagate(sc.run.r, sc.cfg, 1, 0, false);
  DualPolWaveform mean = det.particles.front();
  for (auto& s : mean.x) s = 0.0;
  for (auto& s : mean.y) s = 0.0;
  for (const auto& p : cloud.particles)
    for (std::size_t i = 0; i < mean.size(); ++i) {
      mean.x[i] += p.x[i] / double(np);
      mean.y[i] += p.y[i] / double(np);
    }
  // Backpropagation is near-linear at this power, so the particle mean stays
  // within a few x sigma/sqrt(np) of the zero-noise path.
  CHECK(rel_err(mean, det.particles.front()) < 0.05);
}

TEST_CASE("fingerprint separates clouds and is order-sensitive") {
  Scenario sc(1, 0.0, true, 32, 26);
  const WaveCloud w1 = backpropagate(sc.run.r, sc.cfg, 3, 1, true);
  const WaveCloud w2 = backpropagate(sc.run.r, sc.cfg, 3, 2, true);
  const auto c1 = to_symbol_cloud(w1, sc.pulse, sc.run.timing_offset, 32,
                                  sc.run.amplitude_scale);
  const auto c2 = to_symbol_cloud(w2, sc.pulse, sc.run.timing_offset, 32,
                                  sc.run.amplitude_scale);
  CHECK(fingerprint(c1) != fingerprint(c2));
  CHECK(fingerprint(c1) == fingerprint(c1));

  SymbolCloud swapped = c1;
  std::swap(swapped.particles[0], swapped.particles[1]);
  CHECK(fingerprint(swapped) != fingerprint(c1));
}

TEST_CASE("permuting particles leaves moment estimates invariant") {
  Scenario sc(1, 0.0, true, 16, 27);
  const WaveCloud w = backpropagate(sc.run.r, sc.cfg, 8, 3, true);
  auto cloud = to_symbol_cloud(w, sc.pulse, sc.run.timing_offset, 16,
                               sc.run.amplitude_scale);
  SymbolCloud perm = cloud;
  std::rotate(perm.particles.begin(), perm.particles.begin() + 3,
              perm.particles.end());

  // Mean and covariance are symmetric in the particles; only summation
  // order (rounding) differs.
  double m0 = 0.0, m1 = 0.0;
  for (std::size_t n = 0; n < cloud.num_particles(); ++n) {
    m0 += cloud.particles[n][5][0];
    m1 += perm.particles[n][5][0];
  }
  CHECK(m0 == doctest::Approx(m1).epsilon(1e-12));
}
