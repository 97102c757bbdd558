#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <vector>

namespace sdbp {

// One dual-polarization symbol as four reals. Layout is fixed everywhere:
// [Re sx, Im sx, Re sy, Im sy].
using Symbol4 = std::array<double, 4>;

// Length-K sequence of 4D symbols (the paper-level unit the detectors decide).
using SymbolSequence = std::vector<Symbol4>;

inline std::complex<double> pol_x(const Symbol4& s) { return {s[0], s[1]}; }
inline std::complex<double> pol_y(const Symbol4& s) { return {s[2], s[3]}; }

inline double distance_sq(const Symbol4& a, const Symbol4& b) {
  double d = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double e = a[i] - b[i];
    d += e * e;
  }
  return d;
}

inline bool symbol_finite(const Symbol4& s) {
  for (double v : s)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace sdbp
