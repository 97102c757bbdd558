#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <initializer_list>
#include <random>

namespace sdbp::rng {

// splitmix64 finalizer; used to derive statistically independent substreams
// from (master_seed, block, power, role, particle, ...) coordinates.
inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline std::uint64_t derive(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t s = 0x8FB3D2A1C09ull;
  for (auto p : parts) s = mix(s ^ p);
  return s;
}

// Bit-pattern of a double, for folding real-valued coordinates (e.g. a power
// in dBm) into a seed without rounding ambiguity.
inline std::uint64_t bits_of(double v) {
  std::uint64_t u;
  static_assert(sizeof(u) == sizeof(v));
  std::memcpy(&u, &v, sizeof(u));
  return u;
}

// Seed roles, kept stable so persisted sweeps can be resumed bit-exactly.
enum class Role : std::uint64_t {
  tx_symbols = 1,
  channel = 2,
  backprop = 3,
};

// Deterministic random stream. Gaussian variates use Box-Muller on 53-bit
// uniforms rather than std::normal_distribution, whose output sequence is
// implementation-defined.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : eng_(mix(seed)) {}

  std::uint64_t u64() { return eng_(); }

  // Uniform in (0, 1].
  double uniform() {
    return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1p-53;
  }

  // Uniform index in [0, n).
  std::size_t index(std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
      v = eng_();
    } while (v >= limit);
    return static_cast<std::size_t>(v % bound);
  }

  // Circularly-symmetric complex normal with E[|w|^2] = 1.
  std::complex<double> cgaussian() {
    const double r = std::sqrt(-std::log(uniform()));
    const double th = 2.0 * M_PI * uniform();
    return {r * std::cos(th), r * std::sin(th)};
  }

  // Standard real normal N(0, 1).
  double gaussian() {
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    return r * std::cos(2.0 * M_PI * uniform());
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace sdbp::rng
