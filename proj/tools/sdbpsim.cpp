// Command line front end: run SDBP/DBP symbol-error-rate experiments from a
// config file, validate the engine invariants, or time the hot kernels.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "sdbp/channel.hpp"
#include "sdbp/config.hpp"
#include "sdbp/detectors.hpp"
#include "sdbp/engine.hpp"
#include "sdbp/experiment.hpp"
#include "sdbp/units.hpp"
#include "sdbp/validate.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<std::string> output;
  bool dry_run = false;
};

void add_common(CLI::App* cmd, CommonOpts* opts) {
  cmd->add_option("--config", opts->config_path, "experiment config file")
      ->required();
  cmd->add_option("--seed", opts->seed, "override master_seed");
  cmd->add_option("--workers", opts->workers, "override engine.workers");
  cmd->add_option("--output", opts->output, "override output.dir");
  cmd->add_flag("--dry-run", opts->dry_run,
                "print the resolved config and derived quantities, run nothing");
}

sdbp::RunConfig load(const CommonOpts& opts) {
  sdbp::RunConfig cfg = sdbp::parse_config_file(opts.config_path);
  if (opts.seed) cfg.spec.master_seed = *opts.seed;
  if (opts.workers) cfg.spec.workers = *opts.workers;
  if (opts.output) cfg.output_dir = *opts.output;
  return cfg;
}

void print_warnings(const sdbp::RunConfig& cfg) {
  for (const auto& w : cfg.spec.link.warnings())
    std::cerr << "warning: " << w << "\n";
}

int run_experiment(const CommonOpts& opts, std::optional<double> only_power,
                   std::optional<std::string> only_detector) {
  sdbp::RunConfig cfg = load(opts);
  if (only_power) cfg.spec.power_sweep_dbm = {*only_power};
  if (only_detector)
    cfg.spec.detectors = {sdbp::DetectorSpec::parse(*only_detector)};
  if (opts.dry_run) {
    std::cout << sdbp::dry_run_report(cfg);
    return 0;
  }
  print_warnings(cfg);

  const auto t0 = std::chrono::steady_clock::now();
  const sdbp::SweepResult result = sdbp::sweep(cfg.spec, cfg.output_dir, cfg.resume);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  sdbp::write_outputs(cfg.spec, result, cfg.output_dir);

  std::cout << sdbp::to_csv(result);
  std::cout << "\nbest per detector (gain = SER_dbp / SER_x at the lowest SERs):\n";
  for (const auto& b : result.best) {
    std::printf("  %-6s best SER %.4g at %+.3g dBm", b.detector_id.c_str(),
                b.ser, b.power_dbm);
    if (b.gain_vs_dbp > 0.0)
      std::printf("  gain %.3g", b.gain_vs_dbp);
    std::printf("\n");
  }
  for (const auto& n : result.notes) std::cout << "note: " << n << "\n";
  std::printf("done in %.1f s; outputs in %s/\n", secs, cfg.output_dir.c_str());
  return 0;
}

int run_validate() {
  const auto checks = sdbp::run_validation();
  bool all = true;
  std::printf("%-28s %-6s %9s  %s\n", "check", "result", "time", "detail");
  for (const auto& c : checks) {
    all &= c.pass;
    std::printf("%-28s %-6s %7.1fms  %s\n", c.name.c_str(),
                c.pass ? "PASS" : "FAIL", c.millis, c.detail.c_str());
  }
  std::printf("%zu checks, %s\n", checks.size(), all ? "all passed" : "FAILURES");
  return all ? 0 : 1;
}

int run_bench(std::size_t wave_samples, int segments, std::size_t particles) {
  using clock = std::chrono::steady_clock;
  auto ms_since = [](clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  };

  sdbp::rng::Stream s(1);
  sdbp::DualPolWaveform w;
  w.sample_rate_hz = 4 * 14e9;
  w.x.resize(wave_samples);
  w.y.resize(wave_samples);
  for (std::size_t i = 0; i < wave_samples; ++i) {
    w.x[i] = 0.01 * s.cgaussian();
    w.y[i] = 0.01 * s.cgaussian();
  }

  sdbp::FiberParams smf;
  sdbp::StepPlan plan;
  plan.segment_lengths_km.assign(segments, smf.length_km / segments);
  auto t0 = clock::now();
  auto out = sdbp::ssfm(w, smf, plan, sdbp::Direction::forward, 8.0 / 9.0);
  const double ssfm_ms = ms_since(t0);
  std::printf("ssfm    %6zu samples x %3d segments: %8.2f ms  (%.2f ms/segment)\n",
              wave_samples, segments, ssfm_ms, ssfm_ms / segments);

  const sdbp::Constellation c = sdbp::Constellation::make("qpsk");
  const std::size_t num_symbols = 256;
  sdbp::SymbolCloud cloud;
  cloud.particles.assign(particles, sdbp::SymbolSequence(num_symbols));
  for (auto& p : cloud.particles)
    for (auto& sym : p) {
      const sdbp::Symbol4& base = c.points[s.index(c.cardinality())];
      for (int i = 0; i < 4; ++i) sym[i] = base[i] + 0.1 * s.gaussian();
    }

  t0 = clock::now();
  auto sbs = sdbp::sbs_detect(cloud, c);
  const double sbs_ms = ms_since(t0);
  std::printf("sbs     %6zu slots x %4zu particles:  %8.2f ms\n", num_symbols,
              particles, sbs_ms);

  t0 = clock::now();
  auto va = sdbp::va_detect(cloud, 1, c);
  const double va_ms = ms_since(t0);
  std::printf("va(L=1) %6zu slots, %zu states:       %8.2f ms  (%.1f slots/s)\n",
              num_symbols, c.cardinality(), va_ms, 1e3 * num_symbols / va_ms);
  (void)out;
  (void)sbs;
  (void)va;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"single-channel dual-pol coherent link simulator with "
               "DBP and stochastic-DBP detection"};
  app.require_subcommand(1);

  CommonOpts sim_opts, sweep_opts;
  std::optional<double> only_power;
  std::optional<std::string> only_detector;

  CLI::App* sim = app.add_subcommand(
      "simulate", "run the configured experiment (optionally one cell)");
  add_common(sim, &sim_opts);
  sim->add_option("--power", only_power, "restrict to one launch power [dBm]");
  sim->add_option("--detector", only_detector,
                  "restrict to one detector (dbp|sbs|dd:L|va:L)");

  CLI::App* swp =
      app.add_subcommand("sweep", "run the full power x block grid");
  add_common(swp, &sweep_opts);

  app.add_subcommand("validate", "run the fast invariant suite");

  std::size_t bench_samples = 16512;
  int bench_segments = 20;
  std::size_t bench_particles = 200;
  CLI::App* bench = app.add_subcommand("bench", "time the hot kernels");
  bench->add_option("--samples", bench_samples, "waveform length");
  bench->add_option("--segments", bench_segments, "SSFM segments");
  bench->add_option("--particles", bench_particles, "cloud size");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return run_experiment(sim_opts, only_power, only_detector);
    if (swp->parsed()) return run_experiment(sweep_opts, {}, {});
    if (app.get_subcommand("validate")->parsed()) return run_validate();
    if (bench->parsed())
      return run_bench(bench_samples, bench_segments, bench_particles);
  } catch (const sdbp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
