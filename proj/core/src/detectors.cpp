#include "sdbp/detectors.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace sdbp {
namespace {

// psi values for one slot, indexed s_idx + card * state_idx. Shared by the
// trellis detectors and the table builder so oracle comparisons see
// bit-identical numbers.
std::vector<double> psi_slot_values(const SlotMetric& metric,
                                    const Constellation& c, int L) {
  const std::size_t card = c.cardinality();
  std::size_t total = card;
  for (int j = 0; j < L; ++j) total *= card;

  std::vector<Symbol4> window(L);
  std::vector<double> values(total);
  for (std::size_t y_idx = 0; y_idx < total; ++y_idx) {
    std::size_t rem = y_idx;
    const Symbol4& s = c.points[rem % card];
    rem /= card;
    for (int j = 0; j < L; ++j) {
      window[j] = c.points[rem % card];
      rem /= card;
    }
    values[y_idx] = metric.psi(s, window);
  }
  return values;
}

// Symbol-by-symbol decision at one slot: argmin over the constellation of
// the 4D marginal Mahalanobis metric, lowest index on ties.
struct SlotDecision {
  std::size_t index;
  double metric;
  int reg_events;
};

SlotDecision sbs_decide_slot(const SymbolCloud& cloud, std::size_t k,
                             const Constellation& c, const MetricOptions& opts) {
  const WindowStats stats = estimate_moments(cloud, k, 0);
  const SlotMetric metric(stats, opts);
  std::size_t best = 0;
  double best_m = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < c.cardinality(); ++s) {
    const double m = metric.psi(c.points[s], {});
    if (m < best_m) {
      best_m = m;
      best = s;
    }
  }
  return {best, best_m, metric.regularization_events()};
}

std::size_t pow_size(std::size_t base, int exp) {
  std::size_t v = 1;
  for (int i = 0; i < exp; ++i) {
    if (v > std::numeric_limits<std::size_t>::max() / base)
      return std::numeric_limits<std::size_t>::max();
    v *= base;
  }
  return v;
}

}  // namespace

std::string to_string(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::dbp: return "dbp";
    case DetectorKind::sbs: return "sbs";
    case DetectorKind::dd: return "dd";
    case DetectorKind::va: return "va";
  }
  return "?";
}

PsiTable build_psi_table(const SymbolCloud& cloud, int L, const Constellation& c,
                         const MetricOptions& opts) {
  if (L < 0) throw std::invalid_argument("build_psi_table: negative memory");
  const std::size_t kk = cloud.num_symbols();
  PsiTable table;
  table.memory = L;
  table.cardinality = c.cardinality();
  table.num_symbols = kk;
  for (std::size_t k = L; k < kk; ++k) {
    const WindowStats stats = estimate_moments(cloud, k, L);
    const SlotMetric metric(stats, opts);
    table.regularization_events += metric.regularization_events();
    table.slots.push_back(psi_slot_values(metric, c, L));
  }
  return table;
}

DetectorReport dbp_detect(const DualPolWaveform& r, const LinkConfig& cfg,
                          const PulseShape& pulse, std::size_t timing_offset,
                          std::size_t num_symbols, double amplitude_scale,
                          const Constellation& c) {
  const WaveCloud one = backpropagate(r, cfg, 1, 0, /*inject_noise=*/false);
  const SymbolSequence mf = matched_filter_sample(
      one.particles.front(), pulse, timing_offset, num_symbols, amplitude_scale);

  DetectorReport report;
  report.detector = DetectorKind::dbp;
  report.decided.resize(num_symbols);
  for (std::size_t k = 0; k < num_symbols; ++k)
    report.decided[k] = c.points[hard_decide(mf[k], c)];
  return report;
}

DetectorReport sbs_detect(const SymbolCloud& cloud, const Constellation& c,
                          const MetricOptions& opts) {
  const std::size_t kk = cloud.num_symbols();
  DetectorReport report;
  report.detector = DetectorKind::sbs;
  report.decided.resize(kk);
  report.per_slot_metrics.resize(kk);
  for (std::size_t k = 0; k < kk; ++k) {
    const SlotDecision d = sbs_decide_slot(cloud, k, c, opts);
    report.decided[k] = c.points[d.index];
    report.per_slot_metrics[k] = d.metric;
    report.regularization_events += d.reg_events;
  }
  return report;
}

DetectorReport dd_detect(const SymbolCloud& cloud, int L, const Constellation& c,
                         const MetricOptions& opts) {
  if (L < 0) throw std::invalid_argument("dd_detect: negative memory");
  const std::size_t kk = cloud.num_symbols();
  const std::size_t lead = std::min<std::size_t>(L, kk);

  DetectorReport report;
  report.detector = DetectorKind::dd;
  report.memory = L;
  report.decided.resize(kk);
  report.per_slot_metrics.resize(kk);

  for (std::size_t k = 0; k < lead; ++k) {
    const SlotDecision d = sbs_decide_slot(cloud, k, c, opts);
    report.decided[k] = c.points[d.index];
    report.per_slot_metrics[k] = d.metric;
    report.regularization_events += d.reg_events;
  }

  std::vector<Symbol4> state(L);
  for (std::size_t k = lead; k < kk; ++k) {
    const WindowStats stats = estimate_moments(cloud, k, L);
    const SlotMetric metric(stats, opts);
    report.regularization_events += metric.regularization_events();
    for (int j = 0; j < L; ++j) state[j] = report.decided[k - 1 - j];

    std::size_t best = 0;
    double best_m = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < c.cardinality(); ++s) {
      const double m = metric.psi(c.points[s], state);
      if (m < best_m) {
        best_m = m;
        best = s;
      }
    }
    report.decided[k] = c.points[best];
    report.per_slot_metrics[k] = best_m;
  }
  return report;
}

DetectorReport va_detect(const SymbolCloud& cloud, int L, const Constellation& c,
                         const MetricOptions& opts, std::size_t state_budget) {
  if (L < 0) throw std::invalid_argument("va_detect: negative memory");
  const std::size_t card = c.cardinality();
  const std::size_t num_states = pow_size(card, L);
  if (num_states > state_budget)
    throw std::length_error("va_detect: |Omega|^L exceeds the state budget");

  const std::size_t kk = cloud.num_symbols();
  DetectorReport report;
  report.detector = DetectorKind::va;
  report.memory = L;

  if (kk <= static_cast<std::size_t>(L)) {
    // Block shorter than the memory: every slot is a boundary slot.
    report.decided.resize(kk);
    report.per_slot_metrics.resize(kk);
    for (std::size_t k = 0; k < kk; ++k) {
      const SlotDecision d = sbs_decide_slot(cloud, k, c, opts);
      report.decided[k] = c.points[d.index];
      report.per_slot_metrics[k] = d.metric;
      report.regularization_events += d.reg_events;
    }
    report.viterbi_path = report.decided;
    return report;
  }

  const std::size_t shift = L > 0 ? pow_size(card, L - 1) : 1;
  const std::size_t num_stages = kk - L;

  // pred[t][ns] = winning predecessor state, sym[t][ns] = consumed symbol.
  std::vector<std::vector<std::uint32_t>> pred(num_stages);
  std::vector<std::vector<std::uint16_t>> sym(num_stages);
  std::vector<double> metric(num_states, 0.0);  // uniform initial prior
  std::vector<double> next_metric(num_states);

  // Index sequence s_0..s_{stage-1} of the survivor ending in `state` after
  // `stage` trellis steps; used only to settle exact metric ties.
  auto head_path = [&](std::size_t stage, std::size_t state) {
    std::vector<std::uint16_t> path(L + stage);
    std::size_t st = state;
    for (std::size_t t = stage; t-- > 0;) {
      path[L + t] = sym[t][st];
      st = pred[t][st];
    }
    for (int j = 0; j < L; ++j) {
      std::size_t digit = st;
      for (int i = 0; i < L - 1 - j; ++i) digit /= card;
      path[j] = static_cast<std::uint16_t>(digit % card);
    }
    return path;
  };

  for (std::size_t k = L; k < kk; ++k) {
    const WindowStats stats = estimate_moments(cloud, k, L);
    const SlotMetric slot(stats, opts);
    report.regularization_events += slot.regularization_events();
    const std::vector<double> psi = psi_slot_values(slot, c, L);
    const std::size_t stage = k - L;
    pred[stage].resize(num_states);
    sym[stage].resize(num_states);

    for (std::size_t ns = 0; ns < num_states; ++ns) {
      double best_m = std::numeric_limits<double>::infinity();
      std::size_t best_x = 0;
      std::size_t best_s = 0;
      auto consider = [&](std::size_t x, std::size_t s) {
        const double cand = metric[x] + psi[s + card * x];
        if (cand < best_m) {
          best_m = cand;
          best_x = x;
          best_s = s;
        } else if (cand == best_m && x != best_x) {
          // Same metric via a different survivor: keep the lexicographically
          // smaller partial sequence (the appended symbol is the same).
          if (head_path(stage, x) < head_path(stage, best_x)) {
            best_x = x;
            best_s = s;
          }
        }
      };
      if (L == 0) {
        for (std::size_t s = 0; s < card; ++s) consider(0, s);
      } else {
        const std::size_t s = ns % card;
        const std::size_t base = ns / card;
        for (std::size_t t = 0; t < card; ++t) consider(base + t * shift, s);
      }
      next_metric[ns] = best_m;
      pred[stage][ns] = static_cast<std::uint32_t>(best_x);
      sym[stage][ns] = static_cast<std::uint16_t>(best_s);
    }
    metric.swap(next_metric);
  }

  // Free terminal state: best metric, ties by lexicographic path.
  std::size_t winner = 0;
  for (std::size_t st = 1; st < num_states; ++st) {
    if (metric[st] < metric[winner]) {
      winner = st;
    } else if (metric[st] == metric[winner]) {
      if (head_path(num_stages, st) < head_path(num_stages, winner)) winner = st;
    }
  }
  report.path_metric = metric[winner];

  const std::vector<std::uint16_t> path = head_path(num_stages, winner);
  report.viterbi_path.resize(kk);
  for (std::size_t k = 0; k < kk; ++k) report.viterbi_path[k] = c.points[path[k]];

  // Emit decisions: boundary slots by SBS, the rest from the winning path.
  report.decided = report.viterbi_path;
  report.per_slot_metrics.resize(kk);
  for (int k = 0; k < L; ++k) {
    const SlotDecision d = sbs_decide_slot(cloud, k, c, opts);
    report.decided[k] = c.points[d.index];
    report.per_slot_metrics[k] = d.metric;
    report.regularization_events += d.reg_events;
  }
  // Winning branch metrics, recomputed along the path (tables are streamed).
  for (std::size_t k = L; k < kk; ++k) {
    const WindowStats stats = estimate_moments(cloud, k, L);
    const SlotMetric slot(stats, opts);
    std::vector<Symbol4> window(L);
    for (int j = 0; j < L; ++j) window[j] = c.points[path[k - 1 - j]];
    report.per_slot_metrics[k] = slot.psi(c.points[path[k]], window);
  }
  return report;
}

SymbolSequence brute_force_map(const PsiTable& table, const Constellation& c) {
  const std::size_t card = table.cardinality;
  const std::size_t kk = table.num_symbols;
  const int L = table.memory;
  if (card != c.cardinality())
    throw std::invalid_argument("brute_force_map: constellation mismatch");
  const std::size_t total = pow_size(card, static_cast<int>(kk));
  if (total > 10'000'000)
    throw std::length_error("brute_force_map: |Omega|^K exceeds 1e7");

  std::vector<std::size_t> idx(kk, 0);
  std::vector<std::size_t> best_idx;
  double best_m = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < total; ++n) {
    double m = 0.0;
    for (std::size_t k = L; k < kk; ++k) {
      std::size_t y = 0;
      for (int j = L; j >= 0; --j) y = y * card + idx[k - j];
      m += table.slots[k - L][y];
    }
    if (m < best_m) {
      best_m = m;
      best_idx = idx;
    }
    // Lexicographic odometer: s_0 is the most significant digit, so the
    // first minimum found is the lexicographically smallest.
    for (std::size_t pos = kk; pos-- > 0;) {
      if (++idx[pos] < card) break;
      idx[pos] = 0;
    }
  }
  SymbolSequence out(kk);
  for (std::size_t k = 0; k < kk; ++k) out[k] = c.points[best_idx[k]];
  return out;
}

}  // namespace sdbp
