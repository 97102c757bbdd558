#include "sdbp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

#ifdef SDBP_VENDORED_JSON
#include "json.hpp"
#else
#include <nlohmann/json.hpp>
#endif

#include "sdbp/parallel.hpp"

namespace sdbp {
namespace {

using nlohmann::json;

int detector_rank(const std::string& id) {
  if (id.rfind("dbp", 0) == 0) return 0;
  if (id.rfind("sbs", 0) == 0) return 1;
  if (id.rfind("dd", 0) == 0) return 2;
  return 3;
}

std::string file_safe(const std::string& id) {
  std::string s = id;
  std::replace(s.begin(), s.end(), ':', '_');
  return s;
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::uint64_t count_errors(const SymbolSequence& truth,
                           const SymbolSequence& decided) {
  std::uint64_t e = 0;
  for (std::size_t k = 0; k < truth.size(); ++k)
    if (truth[k] != decided[k]) ++e;
  return e;
}

}  // namespace

std::string DetectorSpec::id() const {
  switch (kind) {
    case DetectorKind::dbp: return "dbp";
    case DetectorKind::sbs: return "sbs";
    case DetectorKind::dd: return "dd:" + std::to_string(memory);
    case DetectorKind::va: return "va:" + std::to_string(memory);
  }
  return "?";
}

DetectorSpec DetectorSpec::parse(const std::string& text) {
  DetectorSpec d;
  std::string name = text;
  const auto colon = text.find(':');
  if (colon != std::string::npos) {
    name = text.substr(0, colon);
    const std::string rest = text.substr(colon + 1);
    std::size_t used = 0;
    int mem = -1;
    try {
      mem = std::stoi(rest, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != rest.size() || mem < 0)
      throw std::invalid_argument("detector memory must be a nonnegative integer: " + text);
    d.memory = mem;
  }
  if (name == "dbp") d.kind = DetectorKind::dbp;
  else if (name == "sbs") d.kind = DetectorKind::sbs;
  else if (name == "dd") d.kind = DetectorKind::dd;
  else if (name == "va") d.kind = DetectorKind::va;
  else throw std::invalid_argument("unknown detector: " + text);
  if ((d.kind == DetectorKind::dbp || d.kind == DetectorKind::sbs) && d.memory != 0)
    throw std::invalid_argument("detector " + name + " takes no memory argument");
  return d;
}

void ExperimentSpec::validate() const {
  link.validate();
  if (constellation != "qpsk" && constellation != "16qam")
    throw std::invalid_argument("constellation must be qpsk or 16qam");
  if (block_symbols < 1) throw std::invalid_argument("block_symbols must be >= 1");
  if (blocks < 1) throw std::invalid_argument("blocks must be >= 1");
  if (power_sweep_dbm.empty()) throw std::invalid_argument("power_sweep is empty");
  if (detectors.empty()) throw std::invalid_argument("detectors list is empty");
  if (n_particles < 1) throw std::invalid_argument("particles must be >= 1");
  bool needs_cloud = false;
  for (const auto& d : detectors)
    if (d.kind != DetectorKind::dbp) needs_cloud = true;
  if (needs_cloud && n_particles < 2)
    throw std::invalid_argument("SDBP detectors need at least 2 particles");
  if (rrc_rolloff < 0.0 || rrc_rolloff > 1.0)
    throw std::invalid_argument("rrc.rolloff must be in [0, 1]");
  if (rrc_span_symbols < 2 || rrc_span_symbols % 2)
    throw std::invalid_argument("rrc.span_symbols must be even and >= 2");
  if (samples_per_symbol < 2)
    throw std::invalid_argument("samples_per_symbol must be >= 2");
}

std::pair<double, double> wilson_interval(std::uint64_t errors, std::uint64_t n) {
  if (n == 0) return {0.0, 1.0};
  const double z = 1.959963984540054;
  if (errors == 0) {
    const double z2n = z * z / static_cast<double>(n);
    return {0.0, z2n / (1.0 + z2n)};
  }
  if (errors == n) {
    const double z2n = z * z / static_cast<double>(n);
    return {1.0 / (1.0 + z2n), 1.0};
  }
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(errors) / nn;
  const double z2n = z * z / nn;
  const double denom = 1.0 + z2n;
  const double center = (p + z2n / 2.0) / denom;
  const double half =
      z * std::sqrt(p * (1.0 - p) / nn + z2n / (4.0 * nn)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

BlockOutcome run_block(const ExperimentSpec& spec, double power_dbm,
                       std::size_t block_index, int inner_workers) {
  const Constellation c = Constellation::make(spec.constellation);
  const PulseShape pulse = make_rrc_pulse(spec.rrc_rolloff, spec.rrc_span_symbols,
                                          spec.samples_per_symbol);
  LinkConfig cfg = spec.link;
  cfg.launch_power_dbm = power_dbm;

  const std::uint64_t pbits = rng::bits_of(power_dbm);
  auto seed = [&](rng::Role role) {
    return rng::derive({spec.master_seed, block_index, pbits,
                        static_cast<std::uint64_t>(role)});
  };

  const SymbolSequence tx =
      random_symbols(c, spec.block_symbols, seed(rng::Role::tx_symbols));
  rng::Stream channel_noise(seed(rng::Role::channel));
  const LinkRun run = simulate_link(tx, cfg, pulse, &channel_noise);

  bool needs_cloud = false;
  for (const auto& d : spec.detectors)
    if (d.kind != DetectorKind::dbp) needs_cloud = true;

  SymbolCloud cloud;
  BlockOutcome out;
  if (needs_cloud) {
    const WaveCloud waves =
        backpropagate(run.r, cfg, spec.n_particles, seed(rng::Role::backprop),
                      /*inject_noise=*/true, inner_workers);
    cloud = to_symbol_cloud(waves, pulse, run.timing_offset, spec.block_symbols,
                            run.amplitude_scale, inner_workers);
    out.cloud_fingerprint = fingerprint(cloud);
  }

  out.power_dbm = power_dbm;
  out.block_index = block_index;
  for (const auto& d : spec.detectors) {
    DetectorReport report;
    switch (d.kind) {
      case DetectorKind::dbp:
        report = dbp_detect(run.r, cfg, pulse, run.timing_offset,
                            spec.block_symbols, run.amplitude_scale, c);
        break;
      case DetectorKind::sbs:
        report = sbs_detect(cloud, c, spec.metric);
        break;
      case DetectorKind::dd:
        report = dd_detect(cloud, d.memory, c, spec.metric);
        break;
      case DetectorKind::va:
        report = va_detect(cloud, d.memory, c, spec.metric, spec.state_budget);
        break;
    }
    CellResult cell;
    cell.detector_id = d.id();
    cell.memory = d.memory;
    cell.power_dbm = power_dbm;
    cell.symbols = spec.block_symbols;
    cell.errors = count_errors(tx, report.decided);
    cell.regularization_events = report.regularization_events;
    out.cells.push_back(std::move(cell));
  }
  return out;
}

namespace {

json outcome_to_json(const BlockOutcome& o) {
  json cells = json::array();
  for (const auto& c : o.cells)
    cells.push_back({{"detector", c.detector_id},
                     {"errors", c.errors},
                     {"symbols", c.symbols},
                     {"reg_events", c.regularization_events}});
  return {{"power_dbm", o.power_dbm},
          {"block", o.block_index},
          {"cells", cells}};
}

BlockOutcome outcome_from_json(const json& j) {
  BlockOutcome o;
  o.power_dbm = j.at("power_dbm").get<double>();
  o.block_index = j.at("block").get<std::size_t>();
  for (const auto& cj : j.at("cells")) {
    CellResult c;
    c.detector_id = cj.at("detector").get<std::string>();
    c.errors = cj.at("errors").get<std::uint64_t>();
    c.symbols = cj.at("symbols").get<std::uint64_t>();
    c.regularization_events = cj.at("reg_events").get<std::uint64_t>();
    c.power_dbm = o.power_dbm;
    o.cells.push_back(std::move(c));
  }
  return o;
}

}  // namespace

SweepResult sweep(const ExperimentSpec& spec, const std::string& persist_dir,
                  bool resume) {
  spec.validate();

  struct Task {
    double power_dbm;
    std::size_t block;
  };
  std::vector<Task> tasks;
  for (double p : spec.power_sweep_dbm)
    for (std::size_t b = 0; b < spec.blocks; ++b) tasks.push_back({p, b});

  // Previously persisted outcomes, keyed on (power bits, block).
  std::map<std::pair<std::uint64_t, std::size_t>, BlockOutcome> done;
  std::filesystem::path persist_path;
  if (!persist_dir.empty()) {
    std::filesystem::create_directories(persist_dir);
    persist_path = std::filesystem::path(persist_dir) / "cells.jsonl";
    if (resume && std::filesystem::exists(persist_path)) {
      std::ifstream in(persist_path);
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        const BlockOutcome o = outcome_from_json(json::parse(line));
        done.emplace(std::make_pair(rng::bits_of(o.power_dbm), o.block_index), o);
      }
    }
  }

  std::vector<BlockOutcome> outcomes(tasks.size());
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const auto key = std::make_pair(rng::bits_of(tasks[i].power_dbm), tasks[i].block);
    auto it = done.find(key);
    if (it != done.end())
      outcomes[i] = it->second;
    else
      pending.push_back(i);
  }

  const int inner = tasks.size() == 1 ? spec.workers : 1;
  std::mutex persist_mu;
  std::ofstream persist_out;
  if (!persist_path.empty())
    persist_out.open(persist_path, resume ? std::ios::app : std::ios::trunc);

  parallel_for(pending.size(), spec.workers, [&](std::size_t pi) {
    const std::size_t i = pending[pi];
    BlockOutcome o = run_block(spec, tasks[i].power_dbm, tasks[i].block, inner);
    if (persist_out.is_open()) {
      std::lock_guard lock(persist_mu);
      persist_out << outcome_to_json(o).dump() << "\n";
      persist_out.flush();
    }
    outcomes[i] = std::move(o);
  });

  // Aggregate counts per (detector, power); integer sums are associative so
  // the result is independent of execution order.
  SweepResult result;
  for (const auto& d : spec.detectors) {
    for (double p : spec.power_sweep_dbm) {
      CellResult agg;
      agg.detector_id = d.id();
      agg.memory = d.memory;
      agg.power_dbm = p;
      for (std::size_t i = 0; i < tasks.size(); ++i) {
        if (rng::bits_of(tasks[i].power_dbm) != rng::bits_of(p)) continue;
        for (const auto& c : outcomes[i].cells) {
          if (c.detector_id != agg.detector_id) continue;
          agg.symbols += c.symbols;
          agg.errors += c.errors;
          agg.regularization_events += c.regularization_events;
        }
      }
      result.cells.push_back(std::move(agg));
    }
  }
  std::sort(result.cells.begin(), result.cells.end(),
            [](const CellResult& a, const CellResult& b) {
              const int ra = detector_rank(a.detector_id);
              const int rb = detector_rank(b.detector_id);
              if (ra != rb) return ra < rb;
              if (a.memory != b.memory) return a.memory < b.memory;
              return a.power_dbm < b.power_dbm;
            });

  // Best power per detector (lowest SER, ties toward lower power) and the
  // DBP-relative gains from the best cells.
  double dbp_best_ser = -1.0;
  for (const auto& d : spec.detectors) {
    SweepResult::DetectorBest best;
    best.detector_id = d.id();
    best.memory = d.memory;
    bool first = true;
    for (const auto& c : result.cells) {
      if (c.detector_id != d.id()) continue;
      // Cells are sorted by ascending power, so keeping only strictly lower
      // SER leaves the lowest power among ties.
      if (first || c.ser() < best.ser) {
        best.ser = c.ser();
        best.power_dbm = c.power_dbm;
        first = false;
      }
    }
    if (d.kind == DetectorKind::dbp) dbp_best_ser = best.ser;
    result.best.push_back(best);
  }
  for (auto& b : result.best) {
    if (dbp_best_ser < 0.0) continue;  // no DBP baseline in this sweep
    b.gain_vs_dbp = b.ser > 0.0 ? dbp_best_ser / b.ser
                                : (dbp_best_ser == 0.0 ? 1.0 : 0.0);
    if (b.ser == 0.0 && dbp_best_ser > 0.0)
      result.notes.push_back(b.detector_id +
                             ": zero errors at best power, gain undefined");
  }

  for (const auto& c : result.cells)
    if (c.low_confidence())
      result.notes.push_back(c.detector_id + " @ " + format_double(c.power_dbm) +
                             " dBm: fewer than 10 errors, interval is weak");
  return result;
}

std::string to_csv(const SweepResult& result) {
  std::ostringstream out;
  out << "detector,L,power_dBm,symbols,errors,ser,ci_lo,ci_hi\n";
  for (const auto& c : result.cells) {
    const auto [lo, hi] = wilson_interval(c.errors, c.symbols);
    out << c.detector_id << ',' << c.memory << ',' << format_double(c.power_dbm)
        << ',' << c.symbols << ',' << c.errors << ',' << format_double(c.ser())
        << ',' << format_double(lo) << ',' << format_double(hi) << '\n';
  }
  return out.str();
}

std::string to_summary_json(const ExperimentSpec& spec, const SweepResult& result) {
  json j;
  j["constellation"] = spec.constellation;
  j["symbol_rate_baud"] = spec.link.symbol_rate_baud;
  j["spans"] = spec.link.spans;
  j["link_kind"] = spec.link.dcm ? "dm" : "ndm";
  j["block_symbols"] = spec.block_symbols;
  j["blocks"] = spec.blocks;
  j["particles"] = spec.n_particles;
  j["master_seed"] = spec.master_seed;

  json best = json::array();
  for (const auto& b : result.best) {
    json e = {{"detector", b.detector_id},
              {"L", b.memory},
              {"best_power_dbm", b.power_dbm},
              {"best_ser", b.ser}};
    if (b.gain_vs_dbp > 0.0)
      e["gain_vs_dbp"] = b.gain_vs_dbp;
    else
      e["gain_vs_dbp"] = nullptr;
    best.push_back(e);
  }
  j["best"] = best;

  json cells = json::array();
  for (const auto& c : result.cells) {
    const auto [lo, hi] = wilson_interval(c.errors, c.symbols);
    cells.push_back({{"detector", c.detector_id},
                     {"L", c.memory},
                     {"power_dbm", c.power_dbm},
                     {"symbols", c.symbols},
                     {"errors", c.errors},
                     {"ser", c.ser()},
                     {"ci95", {lo, hi}},
                     {"reg_events", c.regularization_events},
                     {"low_confidence", c.low_confidence()}});
  }
  j["cells"] = cells;
  j["notes"] = result.notes;
  return j.dump(2);
}

void write_outputs(const ExperimentSpec& spec, const SweepResult& result,
                   const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  {
    std::ofstream f(base / "results.csv");
    f << to_csv(result);
  }
  {
    std::ofstream f(base / "summary.json");
    f << to_summary_json(spec, result) << "\n";
  }
  for (const auto& d : spec.detectors) {
    std::ofstream f(base / ("ser_" + file_safe(d.id()) + ".dat"));
    f << "# power_dBm ser ci_lo ci_hi\n";
    for (const auto& c : result.cells) {
      if (c.detector_id != d.id()) continue;
      const auto [lo, hi] = wilson_interval(c.errors, c.symbols);
      f << format_double(c.power_dbm) << ' ' << format_double(c.ser()) << ' '
        << format_double(lo) << ' ' << format_double(hi) << '\n';
    }
  }
}

}  // namespace sdbp
