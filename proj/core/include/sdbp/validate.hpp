#pragma once

#include <string>
#include <vector>

namespace sdbp {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double millis = 0.0;
};

// Fast deterministic invariant suite: transform round trips, physics
// conservation laws, detector reversion identities and a tiny exhaustive
// trellis oracle. Designed to finish in seconds.
std::vector<CheckResult> run_validation();

}  // namespace sdbp
