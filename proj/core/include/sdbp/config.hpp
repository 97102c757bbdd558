#pragma once

#include <stdexcept>
#include <string>

#include "sdbp/experiment.hpp"

namespace sdbp {

// Full run description: the experiment plus output handling. Parsed from a
// flat `key = value` text format where every physical quantity carries an
// explicit unit suffix (e.g. span_length = "80 km"); unit parsing is strict
// and unknown keys are rejected.
struct RunConfig {
  ExperimentSpec spec;
  std::string output_dir = "results";
  bool resume = false;
};

// Parse/validation failures carry the offending key in what().
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Canonical serialization; parse(serialize(cfg)) reproduces cfg exactly.
std::string serialize_config(const RunConfig& cfg);

// Resolved configuration plus derived engine facts (step plans, EDFA gains,
// ASE levels, trellis sizes) without running anything.
std::string dry_run_report(const RunConfig& cfg);

}  // namespace sdbp
