#include <doctest.h>

#include <cmath>
#include <map>

#include "sdbp/modem.hpp"

using namespace sdbp;

TEST_CASE("constellations are unit-energy Cartesian products") {
  for (const char* name : {"qpsk", "16qam"}) {
    const Constellation c = Constellation::make(name);
    const std::size_t m = c.per_pol.size();
    CHECK(c.cardinality() == m * m);

    double mean_energy = 0.0;
    for (const auto& p : c.points)
      mean_energy += p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3];
    mean_energy /= static_cast<double>(c.cardinality());
    CHECK(mean_energy == doctest::Approx(2.0).epsilon(1e-12));

    for (std::size_t i = 0; i < c.cardinality(); ++i)
      for (std::size_t j = i + 1; j < c.cardinality(); ++j)
        CHECK(distance_sq(c.points[i], c.points[j]) > 0.0);
  }
  CHECK(Constellation::make("qpsk").cardinality() == 16);
  CHECK(Constellation::make("16qam").cardinality() == 256);
  CHECK_THROWS_AS(Constellation::make("8psk"), std::invalid_argument);
}

TEST_CASE("random symbols are uniform, deterministic per seed") {
  const Constellation c = Constellation::make("qpsk");
  const SymbolSequence s = random_symbols(c, 4096, 42);
  REQUIRE(s.size() == 4096);

  std::map<std::size_t, int> counts;
  for (const auto& sym : s) counts[hard_decide(sym, c)]++;
  const double expected = 4096.0 / 16.0;
  const double sigma = std::sqrt(4096.0 * (1.0 / 16.0) * (15.0 / 16.0));
  for (std::size_t i = 0; i < 16; ++i)
    CHECK(std::abs(counts[i] - expected) < 5.0 * sigma);

  CHECK(random_symbols(c, 1, 7).size() == 1);
  CHECK(random_symbols(c, 64, 7) == random_symbols(c, 64, 7));
  CHECK(random_symbols(c, 64, 7) != random_symbols(c, 64, 8));
  CHECK_THROWS_AS(random_symbols(c, 0, 7), std::invalid_argument);
}

TEST_CASE("hard decisions: exact points, perturbations, tie-break") {
  const Constellation c = Constellation::make("16qam");
  for (std::size_t i = 0; i < c.cardinality(); ++i)
    CHECK(hard_decide(c.points[i], c) == i);

  // Perturbation below half the minimum distance keeps the decision.
  const double half_min = 0.5 * 2.0 / std::sqrt(10.0);
  Symbol4 p = c.points[37];
  p[0] += 0.9 * half_min;
  CHECK(hard_decide(p, c) == 37);

  // Exact midpoint of two points ties to the lower index.
  Symbol4 mid;
  for (int i = 0; i < 4; ++i) mid[i] = (c.points[0][i] + c.points[1][i]) / 2.0;
  CHECK(hard_decide(mid, c) == 0);

  // Idempotence: re-deciding a decided point changes nothing.
  Symbol4 noisy = {0.21, -0.4, 0.9, 0.05};
  const std::size_t once = hard_decide(noisy, c);
  CHECK(hard_decide(c.points[once], c) == once);
}

TEST_CASE("symbol error rate counts joint 4D mismatches") {
  const Constellation c = Constellation::make("qpsk");
  SymbolSequence a = random_symbols(c, 100, 3);
  SymbolSequence b = a;
  CHECK(symbol_error_rate(a, b) == 0.0);

  b[17] = c.points[(hard_decide(b[17], c) + 1) % c.cardinality()];
  CHECK(symbol_error_rate(a, b) == doctest::Approx(0.01));

  for (std::size_t k = 0; k < b.size(); ++k)
    b[k] = c.points[(hard_decide(a[k], c) + 5) % c.cardinality()];
  CHECK(symbol_error_rate(a, b) == 1.0);

  b.pop_back();
  CHECK_THROWS_AS(symbol_error_rate(a, b), std::invalid_argument);
}
