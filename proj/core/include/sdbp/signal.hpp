#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "sdbp/symbols.hpp"

namespace sdbp {

// Oversampled complex baseband signal on two polarizations. Amplitudes are
// in sqrt(W), so |sample|^2 sums to instantaneous power in watts.
struct DualPolWaveform {
  std::vector<std::complex<double>> x;
  std::vector<std::complex<double>> y;
  double sample_rate_hz = 0.0;

  std::size_t size() const { return x.size(); }
  bool is_finite() const;
};

// Frequency-domain counterpart (unnormalized DFT bins).
struct DualPolSpectrum {
  std::vector<std::complex<double>> x;
  std::vector<std::complex<double>> y;
  double sample_rate_hz = 0.0;
};

// Real symmetric FIR pulse, unit tap energy, odd length
// span_symbols * samples_per_symbol + 1.
struct PulseShape {
  std::vector<double> taps;
  int samples_per_symbol = 0;
  double rolloff = 0.0;
  int span_symbols = 0;
};

// Truncated root-raised-cosine pulse; removable singularities at t = 0 and
// |t| = 1/(4 rolloff) evaluated by their limits.
// Throws std::invalid_argument on out-of-range parameters.
PulseShape make_rrc_pulse(double rolloff, int span_symbols, int samples_per_symbol);

// Amplitude applied at the shaper so a unit-average-energy dual-pol symbol
// stream launches at total power launch_power_w.
double shape_amplitude(double launch_power_w, int samples_per_symbol);

// Upsample-by-insertion + pulse convolution, per polarization. The block is
// padded with span_symbols/2 zero symbols on each side so every data symbol
// sees a complete pulse; output sample rate is symbol_rate * sps.
DualPolWaveform shape(const SymbolSequence& symbols, const PulseShape& pulse,
                      double symbol_rate_hz, double launch_power_w);

// Post-matched-filter sample index of data symbol 0 for a shape() output
// that traversed only group-delay-free blocks.
std::size_t shaped_timing_offset(const PulseShape& pulse);

// Correlate with the pulse and sample at symbol spacing starting at
// timing_offset (an index on the matched-filter output grid, i.e. the full
// convolution of wave with the time-reversed pulse). Samples are divided by
// amplitude_scale to map back to constellation units.
// Throws std::out_of_range if the last symbol instant exceeds the waveform.
SymbolSequence matched_filter_sample(const DualPolWaveform& wave,
                                     const PulseShape& pulse,
                                     std::size_t timing_offset,
                                     std::size_t num_symbols,
                                     double amplitude_scale = 1.0);

// Exact round trip: inverse_spectrum(spectrum(w)) == w up to rounding.
DualPolSpectrum spectrum(const DualPolWaveform& wave);
DualPolWaveform inverse_spectrum(const DualPolSpectrum& spec);

// Brick-wall filter: bins with |f| <= one_sided_bandwidth_hz pass, others
// are zeroed. Throws std::invalid_argument if the band exceeds Nyquist.
DualPolWaveform ideal_lowpass(const DualPolWaveform& wave,
                              double one_sided_bandwidth_hz);

// Mean total power (both polarizations) over [first, last) samples.
double mean_power(const DualPolWaveform& wave);
double mean_power(const DualPolWaveform& wave, std::size_t first, std::size_t last);
double total_energy(const DualPolWaveform& wave);

}  // namespace sdbp
