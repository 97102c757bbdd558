#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdbp/channel.hpp"
#include "sdbp/engine.hpp"
#include "sdbp/modem.hpp"
#include "sdbp/stats.hpp"

namespace sdbp {

enum class DetectorKind { dbp, sbs, dd, va };

std::string to_string(DetectorKind kind);

struct DetectorReport {
  SymbolSequence decided;
  // Winning branch metric per slot (empty for DBP).
  std::vector<double> per_slot_metrics;
  std::size_t regularization_events = 0;
  DetectorKind detector = DetectorKind::dbp;
  int memory = 0;
  // VA only: winning total path metric and the raw argmin sequence over all
  // K slots (the first L entries are implied by the winning initial state;
  // `decided` replaces them with symbol-by-symbol decisions).
  double path_metric = 0.0;
  SymbolSequence viterbi_path;
};

// Per-slot branch-metric tables for slots k in [L, K). Value index is
// s_idx + card * state_idx; state digits are base `card` with the newest
// symbol (s_{k-1}) in the lowest digit.
struct PsiTable {
  int memory = 0;
  std::size_t cardinality = 0;
  std::size_t num_symbols = 0;
  std::vector<std::vector<double>> slots;
  std::size_t regularization_events = 0;
};

PsiTable build_psi_table(const SymbolCloud& cloud, int L, const Constellation& c,
                         const MetricOptions& opts = {});

// Deterministic backpropagation (one noiseless particle), matched filter,
// per-slot nearest-point slicing.
DetectorReport dbp_detect(const DualPolWaveform& r, const LinkConfig& cfg,
                          const PulseShape& pulse, std::size_t timing_offset,
                          std::size_t num_symbols, double amplitude_scale,
                          const Constellation& c);

// Symbol-by-symbol decisions on the per-slot 4D Gaussian marginals.
DetectorReport sbs_detect(const SymbolCloud& cloud, const Constellation& c,
                          const MetricOptions& opts = {});

// Decision-directed: slots 1..L decided symbol-by-symbol, then each slot
// minimizes psi(s, x_hat) over s with x_hat fixed from earlier decisions.
DetectorReport dd_detect(const SymbolCloud& cloud, int L, const Constellation& c,
                         const MetricOptions& opts = {});

// Exact Viterbi over states Omega^L with uniform initial state metrics and a
// free terminal state. Ties resolve to the lexicographically smallest
// sequence of constellation indices. Throws std::length_error when |Omega|^L
// exceeds state_budget.
DetectorReport va_detect(const SymbolCloud& cloud, int L, const Constellation& c,
                         const MetricOptions& opts = {},
                         std::size_t state_budget = 1'000'000);

// Exhaustive sequence minimizer of the summed branch metric; oracle for
// va_detect on instances with |Omega|^K <= 10^7 (std::length_error beyond).
// Shares the VA tie-break (lexicographically smallest index sequence).
SymbolSequence brute_force_map(const PsiTable& table, const Constellation& c);

}  // namespace sdbp
