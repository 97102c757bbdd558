#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sdbp/channel.hpp"
#include "sdbp/detectors.hpp"

namespace sdbp {

struct DetectorSpec {
  DetectorKind kind = DetectorKind::dbp;
  int memory = 0;

  std::string id() const;  // "dbp", "sbs", "dd:1", "va:2", ...
  static DetectorSpec parse(const std::string& text);
  friend bool operator==(const DetectorSpec&, const DetectorSpec&) = default;
};

struct ExperimentSpec {
  LinkConfig link;  // launch_power_dbm is overridden per sweep point
  std::string constellation = "qpsk";
  std::size_t block_symbols = 4096;
  std::size_t blocks = 1;
  std::vector<double> power_sweep_dbm;
  std::vector<DetectorSpec> detectors;
  std::size_t n_particles = 500;
  std::uint64_t master_seed = 1;
  double rrc_rolloff = 0.25;
  int rrc_span_symbols = 16;
  int samples_per_symbol = 4;
  MetricOptions metric;
  int workers = 0;  // 0 = hardware concurrency
  std::size_t state_budget = 1'000'000;

  void validate() const;  // throws std::invalid_argument
};

// Error counts for one (detector, power) cell; ser() and the Wilson interval
// are derived, never stored, so accumulation stays exact.
struct CellResult {
  std::string detector_id;
  int memory = 0;
  double power_dbm = 0.0;
  std::uint64_t symbols = 0;
  std::uint64_t errors = 0;
  std::uint64_t regularization_events = 0;

  double ser() const {
    return symbols ? static_cast<double>(errors) / static_cast<double>(symbols) : 0.0;
  }
  bool low_confidence() const { return errors < 10; }
};

// 95% Wilson score interval for errors/n.
std::pair<double, double> wilson_interval(std::uint64_t errors, std::uint64_t n);

struct BlockOutcome {
  double power_dbm = 0.0;
  std::size_t block_index = 0;
  std::vector<CellResult> cells;  // one per detector, in spec order
  // Digest of the shared particle cloud all SDBP detectors consumed
  // (0 when the block ran DBP only); stable across detector subsets.
  std::uint64_t cloud_fingerprint = 0;
};

struct SweepResult {
  std::vector<CellResult> cells;  // aggregated, canonical order
  struct DetectorBest {
    std::string detector_id;
    int memory = 0;
    double power_dbm = 0.0;  // lowest-SER power, ties toward lower power
    double ser = 0.0;
    double gain_vs_dbp = 0.0;  // SER_dbp / SER_x from the best cells; 0 if n/a
  };
  std::vector<DetectorBest> best;
  std::vector<std::string> notes;
};

// One Monte Carlo block at one power: generate symbols, simulate the link,
// run every requested detector. All SDBP detectors consume the identical
// particle cloud, so their per-block comparisons are paired.
BlockOutcome run_block(const ExperimentSpec& spec, double power_dbm,
                       std::size_t block_index, int inner_workers = 1);

// Full blocks x powers grid, parallel over tasks, deterministic for any
// worker count. When persist_dir is nonempty, per-task counts are appended
// to <persist_dir>/cells.jsonl and a resumed sweep skips completed tasks.
SweepResult sweep(const ExperimentSpec& spec, const std::string& persist_dir = "",
                  bool resume = false);

// CSV with canonical row order (detector, L, power).
std::string to_csv(const SweepResult& result);
std::string to_summary_json(const ExperimentSpec& spec, const SweepResult& result);

// Writes results.csv, summary.json and per-detector ser_<id>.dat plot files.
void write_outputs(const ExperimentSpec& spec, const SweepResult& result,
                   const std::string& dir);

}  // namespace sdbp
