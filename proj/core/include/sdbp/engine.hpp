#pragma once

#include <cstdint>
#include <vector>

#include "sdbp/channel.hpp"
#include "sdbp/signal.hpp"
#include "sdbp/symbols.hpp"

namespace sdbp {

// Equally weighted particle representation of a waveform-stage message.
struct WaveCloud {
  std::vector<DualPolWaveform> particles;

  std::size_t num_particles() const { return particles.size(); }
};

// Particle message after matched filtering: n_particles symbol sequences.
struct SymbolCloud {
  std::vector<SymbolSequence> particles;

  std::size_t num_particles() const { return particles.size(); }
  std::size_t num_symbols() const {
    return particles.empty() ? 0 : particles.front().size();
  }
};

// Particle backpropagation: replicate the observation, then per span (last
// to first) apply the inverse EDFA2, inverse DCM, inverse EDFA1 and inverse
// SMF split-step, each particle with an independent noise stream derived
// from (seed, particle). With n_particles = 1 and inject_noise = false this
// is plain digital backpropagation. Deterministic for any worker count.
WaveCloud backpropagate(const DualPolWaveform& r, const LinkConfig& cfg,
                        std::size_t n_particles, std::uint64_t seed,
                        bool inject_noise, int workers = 1);

// Matched filter + symbol-rate sampling applied independently per particle.
SymbolCloud to_symbol_cloud(const WaveCloud& cloud, const PulseShape& pulse,
                            std::size_t timing_offset, std::size_t num_symbols,
                            double amplitude_scale, int workers = 1);

// Order-sensitive 64-bit digest of a symbol cloud (bit patterns of all
// components); used to assert cloud reuse across detectors.
std::uint64_t fingerprint(const SymbolCloud& cloud);

}  // namespace sdbp
