#include "sdbp/signal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sdbp/fft.hpp"

namespace sdbp {
namespace {

double rrc_tap(double t, double b) {
  // t in symbol periods.
  if (std::abs(t) < 1e-12) return 1.0 - b + 4.0 * b / M_PI;
  if (b > 0.0) {
    const double den = 1.0 - std::pow(4.0 * b * t, 2);
    if (std::abs(den) < 1e-9) {
      const double a = M_PI / (4.0 * b);
      return (b / std::sqrt(2.0)) *
             ((1.0 + 2.0 / M_PI) * std::sin(a) + (1.0 - 2.0 / M_PI) * std::cos(a));
    }
    return (std::sin(M_PI * t * (1.0 - b)) +
            4.0 * b * t * std::cos(M_PI * t * (1.0 + b))) /
           (M_PI * t * den);
  }
  return std::sin(M_PI * t) / (M_PI * t);
}

// Full convolution of a complex sequence with real taps.
std::vector<std::complex<double>> convolve(
    const std::vector<std::complex<double>>& u, const std::vector<double>& h) {
  std::vector<std::complex<double>> out(u.size() + h.size() - 1);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] == std::complex<double>{}) continue;
    for (std::size_t j = 0; j < h.size(); ++j) out[i + j] += u[i] * h[j];
  }
  return out;
}

}  // namespace

bool DualPolWaveform::is_finite() const {
  auto ok = [](const std::vector<std::complex<double>>& v) {
    return std::all_of(v.begin(), v.end(), [](std::complex<double> s) {
      return std::isfinite(s.real()) && std::isfinite(s.imag());
    });
  };
  return ok(x) && ok(y);
}

PulseShape make_rrc_pulse(double rolloff, int span_symbols, int samples_per_symbol) {
  if (rolloff < 0.0 || rolloff > 1.0)
    throw std::invalid_argument("make_rrc_pulse: rolloff must be in [0, 1]");
  if (span_symbols < 2 || span_symbols % 2 != 0)
    throw std::invalid_argument("make_rrc_pulse: span_symbols must be even and >= 2");
  if (samples_per_symbol < 2)
    throw std::invalid_argument("make_rrc_pulse: samples_per_symbol must be >= 2");

  const int n = span_symbols * samples_per_symbol + 1;
  const int center = span_symbols * samples_per_symbol / 2;
  PulseShape p{std::vector<double>(n), samples_per_symbol, rolloff, span_symbols};
  for (int i = 0; i < n; ++i)
    p.taps[i] = rrc_tap(static_cast<double>(i - center) / samples_per_symbol, rolloff);

  double energy = 0.0;
  for (double t : p.taps) energy += t * t;
  const double norm = 1.0 / std::sqrt(energy);
  for (double& t : p.taps) t *= norm;
  return p;
}

double shape_amplitude(double launch_power_w, int samples_per_symbol) {
  // Per-pol waveform power of a unit-energy i.i.d. stream through a
  // unit-energy pulse is A^2/sps; both polarizations together give P.
  return std::sqrt(launch_power_w * samples_per_symbol / 2.0);
}

DualPolWaveform shape(const SymbolSequence& symbols, const PulseShape& pulse,
                      double symbol_rate_hz, double launch_power_w) {
  if (symbols.empty()) throw std::invalid_argument("shape: empty symbol block");
  if (symbol_rate_hz <= 0.0) throw std::invalid_argument("shape: symbol rate");

  const int sps = pulse.samples_per_symbol;
  const std::size_t pad = pulse.span_symbols / 2;
  const std::size_t total = symbols.size() + 2 * pad;
  const double amp = shape_amplitude(launch_power_w, sps);

  std::vector<std::complex<double>> ux(total * sps), uy(total * sps);
  for (std::size_t k = 0; k < symbols.size(); ++k) {
    ux[(pad + k) * sps] = amp * pol_x(symbols[k]);
    uy[(pad + k) * sps] = amp * pol_y(symbols[k]);
  }

  DualPolWaveform w;
  w.x = convolve(ux, pulse.taps);
  w.y = convolve(uy, pulse.taps);
  w.sample_rate_hz = symbol_rate_hz * sps;
  return w;
}

std::size_t shaped_timing_offset(const PulseShape& pulse) {
  const std::size_t pad = pulse.span_symbols / 2;
  return pad * pulse.samples_per_symbol + (pulse.taps.size() - 1);
}

SymbolSequence matched_filter_sample(const DualPolWaveform& wave,
                                     const PulseShape& pulse,
                                     std::size_t timing_offset,
                                     std::size_t num_symbols,
                                     double amplitude_scale) {
  const std::size_t taps = pulse.taps.size();
  const std::size_t sps = pulse.samples_per_symbol;
  // Matched-filter output index n corresponds to the inner product of the
  // (time-reversed) pulse with wave[n-taps+1 .. n].
  const std::size_t last = timing_offset + (num_symbols - 1) * sps;
  if (num_symbols == 0) throw std::invalid_argument("matched_filter_sample: K = 0");
  if (last >= wave.size() + taps - 1)
    throw std::out_of_range("matched_filter_sample: sampling past waveform end");

  const double inv = 1.0 / amplitude_scale;
  SymbolSequence out(num_symbols);
  for (std::size_t k = 0; k < num_symbols; ++k) {
    const std::size_t n = timing_offset + k * sps;
    std::complex<double> ax{}, ay{};
    // wave index m = n - taps + 1 + i for tap i, clipped to the waveform.
    const std::size_t i_lo = (n + 1 >= taps) ? 0 : taps - 1 - n;
    const std::size_t i_hi = std::min(taps, wave.size() + taps - 1 - n);
    for (std::size_t i = i_lo; i < i_hi; ++i) {
      const std::size_t m = n + 1 + i - taps;
      ax += wave.x[m] * pulse.taps[i];
      ay += wave.y[m] * pulse.taps[i];
    }
    out[k] = {ax.real() * inv, ax.imag() * inv, ay.real() * inv, ay.imag() * inv};
  }
  return out;
}

DualPolSpectrum spectrum(const DualPolWaveform& wave) {
  DualPolSpectrum s{wave.x, wave.y, wave.sample_rate_hz};
  fft::forward(s.x);
  fft::forward(s.y);
  return s;
}

DualPolWaveform inverse_spectrum(const DualPolSpectrum& spec) {
  DualPolWaveform w{spec.x, spec.y, spec.sample_rate_hz};
  fft::inverse(w.x);
  fft::inverse(w.y);
  return w;
}

DualPolWaveform ideal_lowpass(const DualPolWaveform& wave,
                              double one_sided_bandwidth_hz) {
  if (one_sided_bandwidth_hz > wave.sample_rate_hz / 2.0)
    throw std::invalid_argument("ideal_lowpass: bandwidth exceeds Nyquist");
  DualPolSpectrum s = spectrum(wave);
  const std::size_t n = s.x.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(fft::bin_frequency(i, n, wave.sample_rate_hz)) >
        one_sided_bandwidth_hz) {
      s.x[i] = 0.0;
      s.y[i] = 0.0;
    }
  }
  return inverse_spectrum(s);
}

double mean_power(const DualPolWaveform& wave) {
  return mean_power(wave, 0, wave.size());
}

double mean_power(const DualPolWaveform& wave, std::size_t first, std::size_t last) {
  if (first >= last || last > wave.size())
    throw std::out_of_range("mean_power: bad sample range");
  double p = 0.0;
  for (std::size_t i = first; i < last; ++i)
    p += std::norm(wave.x[i]) + std::norm(wave.y[i]);
  return p / static_cast<double>(last - first);
}

double total_energy(const DualPolWaveform& wave) {
  double e = 0.0;
  for (std::size_t i = 0; i < wave.size(); ++i)
    e += std::norm(wave.x[i]) + std::norm(wave.y[i]);
  return e;
}

}  // namespace sdbp
