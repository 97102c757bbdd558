#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sdbp/rng.hpp"
#include "sdbp/signal.hpp"
#include "sdbp/symbols.hpp"

namespace sdbp {

struct FiberParams {
  double dispersion_ps_nm_km = 16.0;  // D
  double gamma_per_w_km = 1.3;        // Kerr coefficient
  double attenuation_db_km = 0.2;
  double length_km = 80.0;
  double wavelength_nm = 1550.0;

  void validate() const;  // throws std::invalid_argument
};

struct AmplifierParams {
  double gain_linear = 1.0;            // power gain G >= 1
  double noise_figure_db = 5.0;        // F; < 3 dB is unphysical for an EDFA
  double noise_bandwidth_hz = 0.0;     // one-sided
  double wavelength_nm = 1550.0;

  // One-sided ASE PSD per polarization: (G-1) F h nu / 2.
  double ase_psd() const;
  // Total ASE power per polarization: ase_psd() * 2 * noise_bandwidth.
  double ase_power() const;
};

// Inline dispersion-compensating module: fiber Bragg grating modeled as the
// exact inverse CD all-pass of the preceding SMF plus a scalar insertion loss.
struct DcmParams {
  double insertion_loss_db = 3.0;
};

struct LinkConfig {
  int spans = 1;
  FiberParams smf;
  std::optional<DcmParams> dcm;        // absent -> NDM link
  double launch_power_dbm = 0.0;
  double dcm_power_backoff_db = 4.0;   // DCM input sits this far below launch
  double symbol_rate_baud = 14e9;
  double step_epsilon = 1e-4;
  double noise_figure_db = 5.0;
  bool ase_enabled = true;
  double manakov_factor = 8.0 / 9.0;   // 1.0 gives the scalar Kerr reading

  double launch_power_w() const;
  double span_loss_db() const;         // SMF attenuation * length
  // Gains from the deterministic loss ledger. EDFA1 restores launch power
  // minus the DCM backoff (DM) or launch power (NDM); EDFA2 undoes backoff
  // plus DCM insertion loss.
  double edfa1_gain() const;
  double edfa2_gain() const;
  AmplifierParams edfa1_params() const;
  AmplifierParams edfa2_params() const;

  void validate() const;                       // throws std::invalid_argument
  std::vector<std::string> warnings() const;   // non-fatal physics checks
};

// SSFM segmentation for one fiber; segments sum to the fiber length and
// each is at most the step-size bound.
struct StepPlan {
  std::vector<double> segment_lengths_km;

  double total_km() const;
};

enum class Direction { forward, inverse };

// Step-size rule Delta = (eps L_N L_D^2)^(1/3) in km, with L_N = 1/(gamma P)
// and L_D = T^2 2 pi c / (|D| lambda^2). Throws on nonpositive input.
double step_size_km(double epsilon, double gamma_per_w_km, double power_w,
                    double dispersion_ps_nm_km, double wavelength_nm,
                    double symbol_period_s);

// Uniform segmentation honoring the step-size bound at the given launch
// power; a single segment when the fiber is effectively linear.
StepPlan make_step_plan(const FiberParams& fiber, double launch_power_w,
                        double epsilon, double symbol_period_s);

struct SsfmDiagnostics {
  double outer_band_fraction = 0.0;  // energy fraction within 10% of Nyquist
  bool aliasing_warning = false;
};

// Symmetrized split-step propagation: per segment, a linear half step
// (quadratic CD phase plus field attenuation), the dual-polarization Kerr
// rotation over the segment's effective length, then the second half step.
// Inverse direction negates dispersion and Kerr signs, turns attenuation
// into gain, and walks segments in reverse order.
DualPolWaveform ssfm(const DualPolWaveform& wave, const FiberParams& fiber,
                     const StepPlan& plan, Direction direction,
                     double manakov_factor, SsfmDiagnostics* diag = nullptr);

// Forward EDFA: field gain sqrt(G), then band-limited circular complex
// Gaussian ASE per polarization (skipped when noise_rng is null).
DualPolWaveform edfa(const DualPolWaveform& wave, const AmplifierParams& amp,
                     rng::Stream* noise_rng);

// Message-passing inverse of the EDFA: (wave + w) / sqrt(G), with w drawn
// from the forward ASE law (zero when noise_rng is null).
DualPolWaveform edfa_inverse_particle(const DualPolWaveform& wave,
                                      const AmplifierParams& amp,
                                      rng::Stream* noise_rng);

// FBG DCM: exact inverse CD transfer function of the preceding SMF plus
// insertion loss. Inverse direction applies the forward SMF CD phase and
// inverts the loss.
DualPolWaveform fbg_dcm(const DualPolWaveform& wave, const FiberParams& smf,
                        double insertion_loss_db, Direction direction);

// Ground-truth bookkeeping the receiver is granted (perfect timing etc.).
struct LinkRun {
  DualPolWaveform r;            // post receiver low-pass observation
  DualPolWaveform link_output;  // pre-filter output of the last span
  double amplitude_scale = 1.0;
  std::size_t timing_offset = 0;
  StepPlan smf_plan;
  double edfa1_gain = 1.0;
  double edfa2_gain = 1.0;
};

// Full Fig.-1 pipeline: shape, N spans of SMF/EDFA1[/DCM/EDFA2], receiver
// ideal low-pass of one-sided bandwidth R_s.
LinkRun simulate_link(const SymbolSequence& symbols, const LinkConfig& cfg,
                      const PulseShape& pulse, rng::Stream* noise_rng);

}  // namespace sdbp
