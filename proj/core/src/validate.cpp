#include "sdbp/validate.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "sdbp/channel.hpp"
#include "sdbp/detectors.hpp"
#include "sdbp/engine.hpp"
#include "sdbp/modem.hpp"
#include "sdbp/signal.hpp"
#include "sdbp/units.hpp"

namespace sdbp {
namespace {

double rel_err(const DualPolWaveform& a, const DualPolWaveform& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a.x[i] - b.x[i]) + std::norm(a.y[i] - b.y[i]);
    den += std::norm(b.x[i]) + std::norm(b.y[i]);
  }
  return std::sqrt(num / den);
}

DualPolWaveform random_wave(std::size_t n, double fs, std::uint64_t seed) {
  rng::Stream s(seed);
  DualPolWaveform w;
  w.sample_rate_hz = fs;
  w.x.resize(n);
  w.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    w.x[i] = s.cgaussian();
    w.y[i] = s.cgaussian();
  }
  return w;
}

// Particle cloud scattered around a random symbol sequence.
SymbolCloud random_cloud(const Constellation& c, std::size_t num_symbols,
                         std::size_t num_particles, double sigma,
                         std::uint64_t seed) {
  rng::Stream s(seed);
  SymbolSequence center(num_symbols);
  for (auto& sym : center) sym = c.points[s.index(c.cardinality())];
  SymbolCloud cloud;
  cloud.particles.assign(num_particles, SymbolSequence(num_symbols));
  for (auto& p : cloud.particles)
    for (std::size_t k = 0; k < num_symbols; ++k)
      for (int i = 0; i < 4; ++i) p[k][i] = center[k][i] + sigma * s.gaussian();
  return cloud;
}

struct Harness {
  std::vector<CheckResult> results;

  void check(const std::string& name, const std::function<std::string()>& fn) {
    CheckResult r;
    r.name = name;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      r.detail = fn();
      r.pass = true;
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = e.what();
    }
    r.millis = std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - t0)
                   .count();
    results.push_back(std::move(r));
  }
};

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error(msg);
}

std::string fmt(double v) {
  std::ostringstream o;
  o.precision(3);
  o << std::scientific << v;
  return o.str();
}

}  // namespace

std::vector<CheckResult> run_validation() {
  Harness h;
  const FiberParams smf;  // G.652 defaults

  h.check("rrc-pulse", [] {
    const PulseShape p = make_rrc_pulse(0.25, 16, 4);
    require(p.taps.size() == 65, "tap count != 65");
    double e = 0.0;
    for (double t : p.taps) e += t * t;
    require(std::abs(e - 1.0) < 1e-12, "tap energy != 1");
    for (std::size_t i = 0; i < p.taps.size(); ++i)
      require(std::abs(p.taps[i] - p.taps[p.taps.size() - 1 - i]) < 1e-15,
              "taps not symmetric");
    require(std::abs(p.taps[32] - 0.5341707532507458) < 1e-12,
            "center tap mismatch");
    // RRC correlated with itself sampled at symbol spacing is Nyquist.
    for (int lag = 1; lag <= 8; ++lag) {
      double acc = 0.0;
      for (std::size_t i = 0; i + 4 * lag < p.taps.size(); ++i)
        acc += p.taps[i] * p.taps[i + 4 * lag];
      require(std::abs(acc) < 1e-3, "symbol-spaced autocorrelation too large");
    }
    return "65 taps, unit energy, Nyquist autocorrelation";
  });

  h.check("spectral-round-trip", [] {
    const DualPolWaveform w = random_wave(1500, 56e9, 11);
    const DualPolWaveform back = inverse_spectrum(spectrum(w));
    const double err = rel_err(back, w);
    require(err < 1e-12, "round trip error " + fmt(err));
    const DualPolSpectrum s = spectrum(w);
    double ef = 0.0;
    for (std::size_t i = 0; i < s.x.size(); ++i)
      ef += std::norm(s.x[i]) + std::norm(s.y[i]);
    ef /= static_cast<double>(s.x.size());
    const double et = total_energy(w);
    require(std::abs(ef - et) / et < 1e-10, "Parseval mismatch");
    return "identity " + fmt(err);
  });

  h.check("cd-unitarity", [&] {
    DualPolWaveform w = random_wave(2048, 56e9, 12);
    FiberParams linear = smf;
    linear.gamma_per_w_km = 0.0;
    linear.attenuation_db_km = 0.0;
    StepPlan plan{{linear.length_km}};
    const double e0 = total_energy(w);
    const DualPolWaveform out =
        ssfm(w, linear, plan, Direction::forward, 1.0);
    const double e1 = total_energy(out);
    require(std::abs(e1 - e0) / e0 < 1e-10, "CD not unitary");
    const DualPolWaveform back =
        ssfm(out, linear, plan, Direction::inverse, 1.0);
    const double err = rel_err(back, w);
    require(err < 1e-9, "CD round trip " + fmt(err));
    return "energy drift " + fmt(std::abs(e1 - e0) / e0);
  });

  h.check("kerr-power-preservation", [&] {
    DualPolWaveform w = random_wave(1024, 56e9, 13);
    FiberParams nl = smf;
    nl.dispersion_ps_nm_km = 0.0;
    nl.attenuation_db_km = 0.0;
    StepPlan plan{{nl.length_km}};
    const DualPolWaveform out = ssfm(w, nl, plan, Direction::forward, 8.0 / 9.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double p0 = std::norm(w.x[i]) + std::norm(w.y[i]);
      const double p1 = std::norm(out.x[i]) + std::norm(out.y[i]);
      worst = std::max(worst, std::abs(p1 - p0) / (p0 + 1e-300));
    }
    require(worst < 1e-12, "Kerr step changed instantaneous power " + fmt(worst));
    return "max per-sample drift " + fmt(worst);
  });

  h.check("ssfm-round-trip", [&] {
    DualPolWaveform w = random_wave(2048, 56e9, 14);
    for (auto& s : w.x) s *= 0.01;  // ~mW scale
    for (auto& s : w.y) s *= 0.01;
    const StepPlan plan = make_step_plan(smf, 1e-3, 1e-4, 1.0 / 14e9);
    const DualPolWaveform out = ssfm(w, smf, plan, Direction::forward, 8.0 / 9.0);
    const DualPolWaveform back = ssfm(out, smf, plan, Direction::inverse, 8.0 / 9.0);
    const double err = rel_err(back, w);
    require(err < 1e-6, "round trip " + fmt(err));
    return std::to_string(plan.segment_lengths_km.size()) + " segments, error " +
           fmt(err);
  });

  h.check("fbg-dcm", [&] {
    DualPolWaveform w = random_wave(2048, 56e9, 15);
    FiberParams linear = smf;
    linear.gamma_per_w_km = 0.0;
    linear.attenuation_db_km = 0.0;
    StepPlan plan{{linear.length_km}};
    const DualPolWaveform dispersed =
        ssfm(w, linear, plan, Direction::forward, 1.0);
    const DualPolWaveform restored =
        fbg_dcm(dispersed, linear, 0.0, Direction::forward);
    const double err = rel_err(restored, w);
    require(err < 1e-9, "CD not cancelled: " + fmt(err));

    const DualPolWaveform lossy = fbg_dcm(w, smf, 3.0, Direction::forward);
    const double ratio = mean_power(lossy) / mean_power(w);
    require(std::abs(ratio - std::pow(10.0, -0.3)) < 1e-12,
            "insertion loss wrong");
    const DualPolWaveform undone =
        fbg_dcm(lossy, smf, 3.0, Direction::inverse);
    require(rel_err(undone, w) < 1e-9, "fbg inverse not exact");
    return "restore " + fmt(err) + ", loss ratio " + fmt(ratio);
  });

  h.check("matched-filter-identity", [] {
    const Constellation c = Constellation::make("qpsk");
    const PulseShape p = make_rrc_pulse(0.25, 16, 4);

    // Isolated symbol: per-component identity, limited only by truncation.
    SymbolSequence one(31);
    one[15] = c.points[0];
    const DualPolWaveform w1 = shape(one, p, 14e9, 1e-3);
    const SymbolSequence r1 = matched_filter_sample(
        w1, p, shaped_timing_offset(p), one.size(), shape_amplitude(1e-3, 4));
    double worst = 0.0;
    for (std::size_t k = 0; k < one.size(); ++k)
      for (int i = 0; i < 4; ++i)
        worst = std::max(worst, std::abs(r1[k][i] - one[k][i]));
    require(worst < 1e-3, "isolated-symbol mismatch " + fmt(worst));

    // Random block: residual ISI of the 16-symbol truncation in RMS.
    const SymbolSequence tx = random_symbols(c, 64, 21);
    const DualPolWaveform w = shape(tx, p, 14e9, 1e-3);
    const SymbolSequence rx = matched_filter_sample(
        w, p, shaped_timing_offset(p), tx.size(), shape_amplitude(1e-3, 4));
    double mse = 0.0;
    for (std::size_t k = 0; k < tx.size(); ++k) mse += distance_sq(rx[k], tx[k]);
    const double rms = std::sqrt(mse / static_cast<double>(4 * tx.size()));
    require(rms < 1e-3, "block per-component RMS mismatch " + fmt(rms));
    return "isolated " + fmt(worst) + ", block rms " + fmt(rms);
  });

  h.check("step-size", [] {
    const double d = step_size_km(1e-4, 1.3, 1e-3, 16.0, 1550.0, 1.0 / 28e9);
    require(std::abs(d - 6.698120695613925) / d < 1e-12, "frozen value mismatch");
    const double d2 = step_size_km(1e-4, 1.3, 2e-3, 16.0, 1550.0, 1.0 / 28e9);
    require(std::abs(d2 / d - std::pow(2.0, -1.0 / 3.0)) < 1e-12,
            "P^(-1/3) scaling violated");
    const double d3 = step_size_km(1e-4, 1.3, 1e-3, 16.0, 1550.0, 4.0 / 28e9);
    require(std::abs(d3 / d - std::pow(16.0, 2.0 / 3.0)) < 1e-12,
            "T^(4/3) scaling violated");
    return "frozen 6.6981 km and scalings hold";
  });

  h.check("edfa-deterministic", [] {
    const DualPolWaveform w = random_wave(512, 56e9, 31);
    AmplifierParams amp{db_to_linear(16.0), 5.0, 14e9, 1550.0};
    const DualPolWaveform out = edfa(w, amp, nullptr);
    const double g = std::sqrt(amp.gain_linear);
    for (std::size_t i = 0; i < w.size(); ++i)
      require(out.x[i] == w.x[i] * g && out.y[i] == w.y[i] * g,
              "noise-free EDFA is not exactly sqrt(G)");
    return "exact sqrt(G) field gain";
  });

  h.check("reversion-identities", [] {
    const Constellation c = Constellation::make("qpsk");
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const SymbolCloud cloud = random_cloud(c, 32, 64, 0.2, 100 + seed);
      const DetectorReport sbs = sbs_detect(cloud, c);
      const DetectorReport dd0 = dd_detect(cloud, 0, c);
      const DetectorReport va0 = va_detect(cloud, 0, c);
      require(sbs.decided == dd0.decided, "dd(L=0) != sbs");
      require(sbs.decided == va0.decided, "va(L=0) != sbs");
    }
    return "va(0) == dd(0) == sbs on 5 random clouds";
  });

  h.check("viterbi-oracle", [] {
    const Constellation c = Constellation::make("qpsk");
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const SymbolCloud cloud = random_cloud(c, 4, 48, 0.35, 200 + seed);
      const DetectorReport va = va_detect(cloud, 1, c);
      const PsiTable table = build_psi_table(cloud, 1, c);
      const SymbolSequence brute = brute_force_map(table, c);
      require(va.viterbi_path == brute, "VA path != exhaustive argmin");
    }
    return "VA matches exhaustive search on 3 tiny instances";
  });

  h.check("moment-consistency", [] {
    const Constellation c = Constellation::make("qpsk");
    const SymbolCloud cloud = random_cloud(c, 8, 32, 0.3, 77);
    const WindowStats st = estimate_moments(cloud, 3, 2);
    for (int i = 0; i < 8; ++i) {
      require(st.mu_x[i] == st.mu_y[4 + i], "mu_x not a view of mu_y");
      for (int j = 0; j < 8; ++j)
        require(st.sigma_x(i, j) == st.sigma_y(4 + i, 4 + j),
                "sigma_x not a submatrix of sigma_y");
    }
    return "x-moments equal trailing y-moments exactly";
  });

  return h.results;
}

}  // namespace sdbp
