#include "sdbp/engine.hpp"

#include <cstring>
#include <stdexcept>

#include "sdbp/parallel.hpp"

namespace sdbp {

WaveCloud backpropagate(const DualPolWaveform& r, const LinkConfig& cfg,
                        std::size_t n_particles, std::uint64_t seed,
                        bool inject_noise, int workers) {
  if (n_particles < 1)
    throw std::invalid_argument("backpropagate: need at least one particle");
  cfg.validate();

  const StepPlan plan = make_step_plan(cfg.smf, cfg.launch_power_w(),
                                       cfg.step_epsilon, 1.0 / cfg.symbol_rate_baud);
  const AmplifierParams amp1 = cfg.edfa1_params();
  const AmplifierParams amp2 = cfg.edfa2_params();

  WaveCloud cloud;
  cloud.particles.resize(n_particles);
  parallel_for(n_particles, workers, [&](std::size_t n) {
    rng::Stream stream(rng::derive({seed, n}));
    rng::Stream* noise = inject_noise ? &stream : nullptr;
    DualPolWaveform w = r;
    for (int span = cfg.spans; span >= 1; --span) {
      if (cfg.dcm) {
        w = edfa_inverse_particle(w, amp2, noise);
        w = fbg_dcm(w, cfg.smf, cfg.dcm->insertion_loss_db, Direction::inverse);
      }
      w = edfa_inverse_particle(w, amp1, noise);
      w = ssfm(w, cfg.smf, plan, Direction::inverse, cfg.manakov_factor);
    }
    cloud.particles[n] = std::move(w);
  });
  return cloud;
}

SymbolCloud to_symbol_cloud(const WaveCloud& cloud, const PulseShape& pulse,
                            std::size_t timing_offset, std::size_t num_symbols,
                            double amplitude_scale, int workers) {
  SymbolCloud out;
  out.particles.resize(cloud.num_particles());
  parallel_for(cloud.num_particles(), workers, [&](std::size_t n) {
    out.particles[n] = matched_filter_sample(cloud.particles[n], pulse,
                                             timing_offset, num_symbols,
                                             amplitude_scale);
  });
  return out;
}

std::uint64_t fingerprint(const SymbolCloud& cloud) {
  std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a
  auto fold = [&h](double v) {
    std::uint64_t u;
    std::memcpy(&u, &v, sizeof(u));
    for (int i = 0; i < 8; ++i) {
      h ^= (u >> (8 * i)) & 0xFF;
      h *= 0x100000001B3ull;
    }
  };
  for (const auto& seq : cloud.particles)
    for (const auto& sym : seq)
      for (double v : sym) fold(v);
  return h;
}

}  // namespace sdbp
