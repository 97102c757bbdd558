#include "sdbp/modem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdbp {
namespace {

std::vector<std::complex<double>> per_pol_alphabet(const std::string& name) {
  std::vector<std::complex<double>> pts;
  if (name == "qpsk") {
    const double a = 1.0 / std::sqrt(2.0);
    for (int re = -1; re <= 1; re += 2)
      for (int im = -1; im <= 1; im += 2) pts.emplace_back(a * re, a * im);
  } else if (name == "16qam") {
    const double a = 1.0 / std::sqrt(10.0);
    for (int re = -3; re <= 3; re += 2)
      for (int im = -3; im <= 3; im += 2) pts.emplace_back(a * re, a * im);
  } else {
    throw std::invalid_argument("unknown constellation: " + name);
  }
  std::sort(pts.begin(), pts.end(), [](auto l, auto r) {
    return l.real() != r.real() ? l.real() < r.real() : l.imag() < r.imag();
  });
  return pts;
}

}  // namespace

Constellation Constellation::make(const std::string& name) {
  Constellation c;
  c.name = name;
  c.per_pol = per_pol_alphabet(name);
  const std::size_t m = c.per_pol.size();
  c.points.reserve(m * m);
  for (std::size_t ix = 0; ix < m; ++ix)
    for (std::size_t iy = 0; iy < m; ++iy)
      c.points.push_back({c.per_pol[ix].real(), c.per_pol[ix].imag(),
                          c.per_pol[iy].real(), c.per_pol[iy].imag()});
  return c;
}

SymbolSequence random_symbols(const Constellation& c, std::size_t count,
                              std::uint64_t seed) {
  if (count == 0) throw std::invalid_argument("random_symbols: count = 0");
  rng::Stream stream(seed);
  SymbolSequence s(count);
  for (auto& sym : s) sym = c.points[stream.index(c.cardinality())];
  return s;
}

std::size_t hard_decide(const Symbol4& point, const Constellation& c) {
  std::size_t best = 0;
  double best_d = distance_sq(point, c.points[0]);
  for (std::size_t i = 1; i < c.points.size(); ++i) {
    const double d = distance_sq(point, c.points[i]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

double symbol_error_rate(const SymbolSequence& truth, const SymbolSequence& decided) {
  if (truth.size() != decided.size())
    throw std::invalid_argument("symbol_error_rate: length mismatch");
  std::size_t errors = 0;
  for (std::size_t k = 0; k < truth.size(); ++k)
    if (truth[k] != decided[k]) ++errors;
  return static_cast<double>(errors) / static_cast<double>(truth.size());
}

}  // namespace sdbp
