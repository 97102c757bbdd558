#include <doctest.h>

#include <cmath>

#include "sdbp/channel.hpp"
#include "sdbp/modem.hpp"
#include "sdbp/units.hpp"

using namespace sdbp;

namespace {

DualPolWaveform noise_wave(std::size_t n, double fs, std::uint64_t seed,
                           double scale = 1.0) {
  rng::Stream s(seed);
  DualPolWaveform w;
  w.sample_rate_hz = fs;
  w.x.resize(n);
  w.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    w.x[i] = scale * s.cgaussian();
    w.y[i] = scale * s.cgaussian();
  }
  return w;
}

double rel_err(const DualPolWaveform& a, const DualPolWaveform& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a.x[i] - b.x[i]) + std::norm(a.y[i] - b.y[i]);
    den += std::norm(b.x[i]) + std::norm(b.y[i]);
  }
  return std::sqrt(num / den);
}

LinkConfig dm_link(int spans, double power_dbm, bool ase) {
  LinkConfig cfg;
  cfg.spans = spans;
  cfg.dcm = DcmParams{3.0};
  cfg.launch_power_dbm = power_dbm;
  cfg.symbol_rate_baud = 14e9;
  cfg.ase_enabled = ase;
  return cfg;
}

}  // namespace

TEST_CASE("step size formula and scalings") {
  // Frozen from an independent evaluation with separate unit bookkeeping.
  const double d = step_size_km(1e-4, 1.3, 1e-3, 16.0, 1550.0, 1.0 / 28e9);
  CHECK(d == doctest::Approx(6.698120695613925).epsilon(1e-12));

  CHECK(step_size_km(1e-4, 1.3, 2e-3, 16.0, 1550.0, 1.0 / 28e9) / d ==
        doctest::Approx(std::pow(2.0, -1.0 / 3.0)).epsilon(1e-12));
  CHECK(step_size_km(1e-4, 1.3, 1e-3, 16.0, 1550.0, 4.0 / 28e9) / d ==
        doctest::Approx(std::pow(16.0, 2.0 / 3.0)).epsilon(1e-12));
  CHECK_THROWS_AS(step_size_km(1e-4, 0.0, 1e-3, 16.0, 1550.0, 1e-10),
                  std::invalid_argument);
  CHECK_THROWS_AS(step_size_km(-1e-4, 1.3, 1e-3, 16.0, 1550.0, 1e-10),
                  std::invalid_argument);
}

TEST_CASE("step plan covers the fiber and honors the bound") {
  FiberParams smf;
  const StepPlan plan = make_step_plan(smf, 2e-3, 1e-4, 1.0 / 28e9);
  CHECK(plan.total_km() == doctest::Approx(smf.length_km).epsilon(1e-12));
  const double bound = step_size_km(1e-4, 1.3, 2e-3, 16.0, 1550.0, 1.0 / 28e9);
  for (double seg : plan.segment_lengths_km) CHECK(seg <= bound + 1e-12);

  // Linear fiber collapses to a single segment.
  FiberParams lin = smf;
  lin.gamma_per_w_km = 0.0;
  CHECK(make_step_plan(lin, 2e-3, 1e-4, 1.0 / 28e9).segment_lengths_km.size() == 1);
}

TEST_CASE("ssfm: dispersion-only round trip is unitary") {
  FiberParams f;
  f.gamma_per_w_km = 0.0;
  f.attenuation_db_km = 0.0;
  StepPlan plan{{f.length_km}};
  const DualPolWaveform w = noise_wave(2048, 56e9, 1);
  const DualPolWaveform fwd = ssfm(w, f, plan, Direction::forward, 1.0);
  CHECK(total_energy(fwd) == doctest::Approx(total_energy(w)).epsilon(1e-10));
  const DualPolWaveform back = ssfm(fwd, f, plan, Direction::inverse, 1.0);
  CHECK(rel_err(back, w) < 1e-9);
}

TEST_CASE("ssfm: Kerr-only step is a pure per-sample phase rotation") {
  FiberParams f;
  f.dispersion_ps_nm_km = 0.0;
  f.attenuation_db_km = 0.0;
  StepPlan plan{{f.length_km}};
  const DualPolWaveform w = noise_wave(512, 56e9, 2, 0.03);
  const DualPolWaveform out = ssfm(w, f, plan, Direction::forward, 8.0 / 9.0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double p0 = std::norm(w.x[i]) + std::norm(w.y[i]);
    const double p1 = std::norm(out.x[i]) + std::norm(out.y[i]);
    CHECK(p1 == doctest::Approx(p0).epsilon(1e-12));
  }
}

TEST_CASE("ssfm: full forward/inverse composition is the identity") {
  FiberParams smf;
  const StepPlan plan = make_step_plan(smf, 1e-3, 1e-4, 1.0 / 14e9);
  const DualPolWaveform w = noise_wave(4096, 56e9, 3, 0.02);
  const DualPolWaveform fwd = ssfm(w, smf, plan, Direction::forward, 8.0 / 9.0);
  const DualPolWaveform back = ssfm(fwd, smf, plan, Direction::inverse, 8.0 / 9.0);
  CHECK(rel_err(back, w) < 1e-6);
}

TEST_CASE("ssfm rejects a plan that does not cover the fiber") {
  FiberParams smf;
  StepPlan bad{{smf.length_km / 2.0}};
  const DualPolWaveform w = noise_wave(64, 56e9, 4);
  CHECK_THROWS_AS(ssfm(w, smf, bad, Direction::forward, 1.0),
                  std::invalid_argument);
}

TEST_CASE("edfa: deterministic gain, identity at G=1") {
  const DualPolWaveform w = noise_wave(256, 56e9, 5);
  AmplifierParams unity{1.0, 5.0, 14e9, 1550.0};
  rng::Stream noise(9);
  const DualPolWaveform same = edfa(w, unity, &noise);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(same.x[i] == w.x[i]);

  AmplifierParams amp{db_to_linear(16.0), 5.0, 14e9, 1550.0};
  const DualPolWaveform scaled = edfa(w, amp, nullptr);
  const double g = std::sqrt(amp.gain_linear);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(scaled.x[i] == w.x[i] * g);
    CHECK(scaled.y[i] == w.y[i] * g);
  }
}

TEST_CASE("edfa ASE power matches (G-1) F h nu B") {
  AmplifierParams amp{db_to_linear(16.0), 5.0, 14e9, 1550.0};
  DualPolWaveform zero;
  zero.sample_rate_hz = 56e9;
  zero.x.assign(256, 0.0);
  zero.y.assign(256, 0.0);

  rng::Stream noise(77);
  const int reps = 600;
  double sum = 0.0, sum_sq = 0.0;
  for (int r = 0; r < reps; ++r) {
    const DualPolWaveform out = edfa(zero, amp, &noise);
    double px = 0.0;
    for (const auto& s : out.x) px += std::norm(s);
    px /= static_cast<double>(out.size());
    sum += px;
    sum_sq += px * px;
  }
  const double mean = sum / reps;
  const double se = std::sqrt((sum_sq / reps - mean * mean) / reps);
  const double expected = amp.ase_power();
  CHECK(std::abs(mean - expected) < 3.0 * se);
}

TEST_CASE("edfa inverse particle: zero-noise division, independent draws") {
  const DualPolWaveform w = noise_wave(256, 56e9, 6);
  AmplifierParams amp{db_to_linear(12.0), 5.0, 14e9, 1550.0};
  const DualPolWaveform quiet = edfa_inverse_particle(w, amp, nullptr);
  const double g = 1.0 / std::sqrt(amp.gain_linear);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(quiet.x[i] == w.x[i] * g);

  rng::Stream n1(100), n2(101);
  const DualPolWaveform p1 = edfa_inverse_particle(w, amp, &n1);
  const DualPolWaveform p2 = edfa_inverse_particle(w, amp, &n2);
  bool differ = false;
  for (std::size_t i = 0; i < w.size() && !differ; ++i) differ = p1.x[i] != p2.x[i];
  CHECK(differ);

  // Ensemble mean of the inverse output converges to wave / sqrt(G).
  const int reps = 400;
  DualPolWaveform acc = quiet;
  for (auto& s : acc.x) s = 0.0;
  rng::Stream nm(707);
  for (int r = 0; r < reps; ++r) {
    const DualPolWaveform p = edfa_inverse_particle(w, amp, &nm);
    for (std::size_t i = 0; i < w.size(); ++i) acc.x[i] += p.x[i];
  }
  // Per-sample complex noise variance after /sqrt(G) is ase_power / G.
  const double var_sample = amp.ase_power() / amp.gain_linear;
  const double tol = 5.0 * std::sqrt(var_sample / reps);
  double worst = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    worst = std::max(worst, std::abs(acc.x[i] / double(reps) - quiet.x[i]));
  CHECK(worst < tol);
}

TEST_CASE("fbg dcm restores dispersion exactly and applies 3 dB loss") {
  FiberParams smf;
  FiberParams cd_only = smf;
  cd_only.gamma_per_w_km = 0.0;
  cd_only.attenuation_db_km = 0.0;
  StepPlan plan{{cd_only.length_km}};
  const DualPolWaveform w = noise_wave(2048, 56e9, 8);
  const DualPolWaveform dispersed = ssfm(w, cd_only, plan, Direction::forward, 1.0);
  const DualPolWaveform restored = fbg_dcm(dispersed, smf, 3.0, Direction::forward);
  CHECK(mean_power(restored) / mean_power(w) ==
        doctest::Approx(std::pow(10.0, -0.3)).epsilon(1e-12));

  DualPolWaveform rescaled = restored;
  const double undo = std::pow(10.0, 0.15);
  for (auto& s : rescaled.x) s *= undo;
  for (auto& s : rescaled.y) s *= undo;
  CHECK(rel_err(rescaled, w) < 1e-9);

  const DualPolWaveform back =
      fbg_dcm(fbg_dcm(w, smf, 3.0, Direction::forward), smf, 3.0, Direction::inverse);
  CHECK(rel_err(back, w) < 1e-9);
}

TEST_CASE("link config gain ledger") {
  LinkConfig dm = dm_link(5, 0.0, false);
  CHECK(linear_to_db(dm.edfa1_gain()) == doctest::Approx(16.0 - 4.0));
  CHECK(linear_to_db(dm.edfa2_gain()) == doctest::Approx(4.0 + 3.0));

  LinkConfig ndm = dm;
  ndm.dcm.reset();
  CHECK(linear_to_db(ndm.edfa1_gain()) == doctest::Approx(16.0));
  CHECK(ndm.edfa2_gain() == doctest::Approx(1.0));

  LinkConfig bad = dm;
  bad.spans = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  LinkConfig quantum = dm;
  quantum.noise_figure_db = 2.0;
  CHECK(quantum.warnings().size() == 1);
  CHECK(dm.warnings().empty());
}

TEST_CASE("all-linear compensated DM link is transparent end to end") {
  const Constellation c = Constellation::make("qpsk");
  const PulseShape pulse = make_rrc_pulse(0.25, 16, 4);
  LinkConfig cfg = dm_link(3, 0.0, false);
  cfg.smf.gamma_per_w_km = 0.0;
  const SymbolSequence tx = random_symbols(c, 128, 11);
  const LinkRun run = simulate_link(tx, cfg, pulse, nullptr);

  const SymbolSequence rx = matched_filter_sample(
      run.r, pulse, run.timing_offset, tx.size(), run.amplitude_scale);
  for (std::size_t k = 0; k < tx.size(); ++k)
    CHECK(c.points[hard_decide(rx[k], c)] == tx[k]);

  // Net gain is one: interior mean power equals the launch power.
  const std::size_t lead = run.timing_offset;
  CHECK(mean_power(run.link_output, lead, run.link_output.size() - lead) ==
        doctest::Approx(cfg.launch_power_w()).epsilon(0.05));
}

TEST_CASE("per-span power budget closes on a noisy DM link") {
  const Constellation c = Constellation::make("qpsk");
  const PulseShape pulse = make_rrc_pulse(0.25, 16, 4);
  LinkConfig cfg = dm_link(1, 2.0, true);

  const int blocks = 12;
  double sum = 0.0, sum_sq = 0.0;
  for (int b = 0; b < blocks; ++b) {
    const SymbolSequence tx = random_symbols(c, 256, 50 + b);
    rng::Stream noise(900 + b);
    const LinkRun run = simulate_link(tx, cfg, pulse, &noise);
    const std::size_t lead = run.timing_offset;
    const double p =
        mean_power(run.link_output, lead, run.link_output.size() - lead);
    sum += p;
    sum_sq += p * p;
  }
  const double mean = sum / blocks;
  const double se = std::sqrt((sum_sq / blocks - mean * mean) / blocks);
  // EDFA1 ASE reaches the span output through the DCM loss and EDFA2 gain;
  // both polarizations contribute.
  const double ase1_through =
      cfg.edfa1_params().ase_power() * db_to_linear(-cfg.dcm->insertion_loss_db) *
      cfg.edfa2_gain();
  const double expected = cfg.launch_power_w() +
                          2.0 * (cfg.edfa2_params().ase_power() + ase1_through);
  CHECK(std::abs(mean - expected) < 3.0 * se);
}
