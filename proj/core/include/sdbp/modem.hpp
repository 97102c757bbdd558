#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sdbp/rng.hpp"
#include "sdbp/symbols.hpp"

namespace sdbp {

// Dual-polarization constellation: the 4D alphabet is the Cartesian product
// of the per-polarization complex alphabet with itself. Points are indexed
// lexicographically (x-pol index * per-pol size + y-pol index, per-pol
// points ordered by (Re, Im)); unit average energy per polarization, so the
// mean squared 4D norm is 2.
struct Constellation {
  std::string name;
  std::vector<std::complex<double>> per_pol;
  std::vector<Symbol4> points;

  std::size_t cardinality() const { return points.size(); }

  // "qpsk" or "16qam". Throws std::invalid_argument otherwise.
  static Constellation make(const std::string& name);
};

// K i.i.d. uniform draws from the constellation; deterministic per seed.
SymbolSequence random_symbols(const Constellation& c, std::size_t count,
                              std::uint64_t seed);

// Nearest constellation point in Euclidean distance; exact ties resolve to
// the lowest index.
std::size_t hard_decide(const Symbol4& point, const Constellation& c);

// Fraction of 4D symbol slots that differ. Throws std::invalid_argument on
// length mismatch.
double symbol_error_rate(const SymbolSequence& truth, const SymbolSequence& decided);

}  // namespace sdbp
