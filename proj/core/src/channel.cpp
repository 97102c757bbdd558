#include "sdbp/channel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sdbp/fft.hpp"
#include "sdbp/units.hpp"

namespace sdbp {
namespace {

// Quadratic spectral phase exp(j sign (beta2/2) w^2 z) plus optional field
// gain, applied in place.
void apply_linear(std::vector<std::complex<double>>& x,
                  std::vector<std::complex<double>>& y, double fs,
                  double beta2, double z_m, double field_gain) {
  fft::forward(x);
  fft::forward(y);
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 2.0 * M_PI * fft::bin_frequency(i, n, fs);
    const double phase = 0.5 * beta2 * w * w * z_m;
    const std::complex<double> h =
        field_gain * std::complex<double>(std::cos(phase), std::sin(phase));
    x[i] *= h;
    y[i] *= h;
  }
  fft::inverse(x);
  fft::inverse(y);
}

DualPolWaveform cd_allpass(const DualPolWaveform& wave, double beta2,
                           double z_m, double field_gain) {
  DualPolWaveform out = wave;
  apply_linear(out.x, out.y, wave.sample_rate_hz, beta2, z_m, field_gain);
  return out;
}

// Band-limited circular complex Gaussian noise, drawn directly on the
// frequency grid so it is exactly confined to |f| <= bandwidth. The per-bin
// variance is normalized by the realized bin count, so the total power is
// psd * 2 * bandwidth exactly on any grid (the in-band PSD then matches the
// continuum value to O(1/n)).
void add_ase(std::vector<std::complex<double>>& v, double fs, double psd,
             double bandwidth_hz, rng::Stream& rng) {
  const std::size_t n = v.size();
  std::size_t in_band = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(fft::bin_frequency(i, n, fs)) <= bandwidth_hz) ++in_band;
  if (in_band == 0) return;
  const double total_power = psd * 2.0 * bandwidth_hz;
  const double sigma =
      std::sqrt(total_power * static_cast<double>(n) * static_cast<double>(n) /
                static_cast<double>(in_band));
  std::vector<std::complex<double>> w(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(fft::bin_frequency(i, n, fs)) <= bandwidth_hz)
      w[i] = sigma * rng.cgaussian();
  }
  fft::inverse(w);
  for (std::size_t i = 0; i < n; ++i) v[i] += w[i];
}

}  // namespace

void FiberParams::validate() const {
  if (length_km <= 0.0) throw std::invalid_argument("fiber length must be > 0");
  if (attenuation_db_km < 0.0) throw std::invalid_argument("fiber attenuation must be >= 0");
  if (wavelength_nm <= 0.0) throw std::invalid_argument("fiber wavelength must be > 0");
}

double AmplifierParams::ase_psd() const {
  const double f_lin = db_to_linear(noise_figure_db);
  return (gain_linear - 1.0) * f_lin * photon_energy(wavelength_nm) / 2.0;
}

double AmplifierParams::ase_power() const {
  return ase_psd() * 2.0 * noise_bandwidth_hz;
}

double LinkConfig::launch_power_w() const { return dbm_to_watt(launch_power_dbm); }

double LinkConfig::span_loss_db() const {
  return smf.attenuation_db_km * smf.length_km;
}

double LinkConfig::edfa1_gain() const {
  const double backoff = dcm ? dcm_power_backoff_db : 0.0;
  return db_to_linear(span_loss_db() - backoff);
}

double LinkConfig::edfa2_gain() const {
  if (!dcm) return 1.0;
  return db_to_linear(dcm_power_backoff_db + dcm->insertion_loss_db);
}

AmplifierParams LinkConfig::edfa1_params() const {
  return {edfa1_gain(), noise_figure_db, symbol_rate_baud, smf.wavelength_nm};
}

AmplifierParams LinkConfig::edfa2_params() const {
  return {edfa2_gain(), noise_figure_db, symbol_rate_baud, smf.wavelength_nm};
}

void LinkConfig::validate() const {
  if (spans < 1) throw std::invalid_argument("link.spans must be >= 1");
  if (symbol_rate_baud <= 0.0) throw std::invalid_argument("symbol rate must be > 0");
  if (step_epsilon <= 0.0) throw std::invalid_argument("step epsilon must be > 0");
  smf.validate();
  if (edfa1_gain() < 1.0)
    throw std::invalid_argument("EDFA1 gain below 1 (backoff exceeds span loss)");
}

std::vector<std::string> LinkConfig::warnings() const {
  std::vector<std::string> w;
  if (noise_figure_db < 3.0)
    w.push_back("noise figure below the 3 dB quantum limit of a high-gain EDFA");
  return w;
}

double StepPlan::total_km() const {
  double t = 0.0;
  for (double s : segment_lengths_km) t += s;
  return t;
}

double step_size_km(double epsilon, double gamma_per_w_km, double power_w,
                    double dispersion_ps_nm_km, double wavelength_nm,
                    double symbol_period_s) {
  if (epsilon <= 0.0 || gamma_per_w_km <= 0.0 || power_w <= 0.0 ||
      dispersion_ps_nm_km <= 0.0 || wavelength_nm <= 0.0 || symbol_period_s <= 0.0)
    throw std::invalid_argument("step_size_km: all inputs must be positive");
  const double ln_km = 1.0 / (gamma_per_w_km * power_w);
  const double d_si = dispersion_ps_nm_km * 1e-6;  // s/m^2
  const double lambda_m = wavelength_nm * 1e-9;
  const double ld_km = symbol_period_s * symbol_period_s * 2.0 * M_PI *
                       kSpeedOfLight / (d_si * lambda_m * lambda_m) / 1e3;
  return std::cbrt(epsilon * ln_km * ld_km * ld_km);
}

StepPlan make_step_plan(const FiberParams& fiber, double launch_power_w,
                        double epsilon, double symbol_period_s) {
  fiber.validate();
  std::size_t n = 1;
  if (fiber.gamma_per_w_km > 0.0 && launch_power_w > 0.0 &&
      fiber.dispersion_ps_nm_km != 0.0) {
    const double delta =
        step_size_km(epsilon, fiber.gamma_per_w_km, launch_power_w,
                     std::abs(fiber.dispersion_ps_nm_km), fiber.wavelength_nm,
                     symbol_period_s);
    n = static_cast<std::size_t>(std::ceil(fiber.length_km / delta));
    n = std::max<std::size_t>(n, 1);
  }
  StepPlan plan;
  plan.segment_lengths_km.assign(n, fiber.length_km / static_cast<double>(n));
  return plan;
}

DualPolWaveform ssfm(const DualPolWaveform& wave, const FiberParams& fiber,
                     const StepPlan& plan, Direction direction,
                     double manakov_factor, SsfmDiagnostics* diag) {
  if (std::abs(plan.total_km() - fiber.length_km) > 1e-9 * fiber.length_km)
    throw std::invalid_argument("ssfm: step plan does not cover the fiber");

  const double sign = direction == Direction::forward ? 1.0 : -1.0;
  const double beta2 = beta2_from_dispersion(fiber.dispersion_ps_nm_km,
                                             fiber.wavelength_nm);
  const double alpha_m = attenuation_db_km_to_per_m(fiber.attenuation_db_km);
  const double kerr = sign * manakov_factor * fiber.gamma_per_w_km / 1e3;  // 1/(W m)

  DualPolWaveform out = wave;
  const std::size_t nseg = plan.segment_lengths_km.size();
  for (std::size_t si = 0; si < nseg; ++si) {
    const std::size_t seg = direction == Direction::forward ? si : nseg - 1 - si;
    const double dz = plan.segment_lengths_km[seg] * 1e3;  // m
    const double half = dz / 2.0;
    const double gain_half = std::exp(-sign * alpha_m * half / 2.0);
    const double leff =
        alpha_m > 0.0 ? (1.0 - std::exp(-alpha_m * dz)) / alpha_m : dz;

    apply_linear(out.x, out.y, out.sample_rate_hz, sign * beta2, half, gain_half);
    if (kerr != 0.0) {
      for (std::size_t i = 0; i < out.size(); ++i) {
        const double p = std::norm(out.x[i]) + std::norm(out.y[i]);
        const double phase = kerr * leff * p;
        const std::complex<double> rot(std::cos(phase), std::sin(phase));
        out.x[i] *= rot;
        out.y[i] *= rot;
      }
    }
    apply_linear(out.x, out.y, out.sample_rate_hz, sign * beta2, half, gain_half);
  }

  if (diag) {
    // Energy within 10% of Nyquist; nonzero content there means the Kerr
    // spectral broadening is about to wrap.
    DualPolSpectrum s = spectrum(out);
    double outer = 0.0, total = 0.0;
    const std::size_t n = s.x.size();
    for (std::size_t i = 0; i < n; ++i) {
      const double e = std::norm(s.x[i]) + std::norm(s.y[i]);
      total += e;
      if (std::abs(fft::bin_frequency(i, n, out.sample_rate_hz)) >
          0.45 * out.sample_rate_hz)
        outer += e;
    }
    diag->outer_band_fraction = total > 0.0 ? outer / total : 0.0;
    diag->aliasing_warning = diag->outer_band_fraction > 1e-6;
  }
  return out;
}

DualPolWaveform edfa(const DualPolWaveform& wave, const AmplifierParams& amp,
                     rng::Stream* noise_rng) {
  const double g_field = std::sqrt(amp.gain_linear);
  DualPolWaveform out = wave;
  for (auto& s : out.x) s *= g_field;
  for (auto& s : out.y) s *= g_field;
  if (noise_rng && amp.gain_linear > 1.0) {
    add_ase(out.x, out.sample_rate_hz, amp.ase_psd(), amp.noise_bandwidth_hz,
            *noise_rng);
    add_ase(out.y, out.sample_rate_hz, amp.ase_psd(), amp.noise_bandwidth_hz,
            *noise_rng);
  }
  return out;
}

DualPolWaveform edfa_inverse_particle(const DualPolWaveform& wave,
                                      const AmplifierParams& amp,
                                      rng::Stream* noise_rng) {
  DualPolWaveform out = wave;
  if (noise_rng && amp.gain_linear > 1.0) {
    add_ase(out.x, out.sample_rate_hz, amp.ase_psd(), amp.noise_bandwidth_hz,
            *noise_rng);
    add_ase(out.y, out.sample_rate_hz, amp.ase_psd(), amp.noise_bandwidth_hz,
            *noise_rng);
  }
  const double g_field = 1.0 / std::sqrt(amp.gain_linear);
  for (auto& s : out.x) s *= g_field;
  for (auto& s : out.y) s *= g_field;
  return out;
}

DualPolWaveform fbg_dcm(const DualPolWaveform& wave, const FiberParams& smf,
                        double insertion_loss_db, Direction direction) {
  const double beta2 = beta2_from_dispersion(smf.dispersion_ps_nm_km,
                                             smf.wavelength_nm);
  const double z = smf.length_km * 1e3;
  const double sign = direction == Direction::forward ? -1.0 : 1.0;
  const double gain = std::pow(10.0, sign * insertion_loss_db / 20.0);
  return cd_allpass(wave, sign * beta2, z, gain);
}

LinkRun simulate_link(const SymbolSequence& symbols, const LinkConfig& cfg,
                      const PulseShape& pulse, rng::Stream* noise_rng) {
  cfg.validate();
  const double p_w = cfg.launch_power_w();
  const double rs = cfg.symbol_rate_baud;

  LinkRun run;
  run.amplitude_scale = shape_amplitude(p_w, pulse.samples_per_symbol);
  run.timing_offset = shaped_timing_offset(pulse);
  run.smf_plan = make_step_plan(cfg.smf, p_w, cfg.step_epsilon, 1.0 / rs);
  run.edfa1_gain = cfg.edfa1_gain();
  run.edfa2_gain = cfg.edfa2_gain();

  rng::Stream* noise = cfg.ase_enabled ? noise_rng : nullptr;
  const AmplifierParams amp1 = cfg.edfa1_params();
  const AmplifierParams amp2 = cfg.edfa2_params();

  DualPolWaveform w = shape(symbols, pulse, rs, p_w);
  for (int span = 0; span < cfg.spans; ++span) {
    w = ssfm(w, cfg.smf, run.smf_plan, Direction::forward, cfg.manakov_factor);
    w = edfa(w, amp1, noise);
    if (cfg.dcm) {
      w = fbg_dcm(w, cfg.smf, cfg.dcm->insertion_loss_db, Direction::forward);
      w = edfa(w, amp2, noise);
    }
  }
  run.link_output = w;
  run.r = ideal_lowpass(w, rs);
  return run;
}

}  // namespace sdbp
