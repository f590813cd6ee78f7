#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>

#include "support/oracles.hpp"
#include "threshold_lab/twobody.hpp"

using namespace tlab;
constexpr double kPi = std::numbers::pi;

using oracle::birman_schwinger_critical;

TEST_CASE("exponential well critical coupling is j01^2 / (4 a^2)") {
  for (double a : {0.5, 1.0, 2.0}) {
    const PairPotential p{PotentialFamily::Exponential, 1.0, a};
    const double j01 = boost::math::cyl_bessel_j_zero(0.0, 1);
    const double exact = j01 * j01 / (4.0 * a * a);
    const auto r = twobody::find_critical_coupling(p);
    CHECK(r.gCritical == doctest::Approx(exact).epsilon(1e-7));
    CHECK(r.bracket.first <= r.gCritical);
    CHECK(r.bracket.second >= r.gCritical);
  }
}

TEST_CASE("gaussian critical coupling matches the Birman-Schwinger oracle") {
  const PairPotential p{PotentialFamily::Gaussian, 1.0, 1.0};
  const double gc = twobody::find_critical_coupling(p).gCritical;
  const double bs = birman_schwinger_critical(p, 400, 8.0);
  CHECK(gc == doctest::Approx(bs).epsilon(1e-4));
  const PairPotential y{PotentialFamily::TruncatedYukawa, 1.0, 1.0};
  CHECK(twobody::find_critical_coupling(y).gCritical == doctest::Approx(birman_schwinger_critical(y, 500, 45.0)).epsilon(1e-4));
}

TEST_CASE("critical depth scales with the reduced mass") {
  const PairPotential p{PotentialFamily::Gaussian, 1.0, 1.0};
  const double gc = twobody::find_critical_coupling(p).gCritical;
  CHECK(twobody::pair_critical_depth(p, 0.5) == doctest::Approx(gc).epsilon(1e-10));
  CHECK(twobody::pair_critical_depth(p, 2.0) == doctest::Approx(gc / 4.0).epsilon(1e-10));
}

TEST_CASE("level counting across the critical coupling") {
  const PairPotential p{PotentialFamily::Gaussian, 1.0, 1.0};
  const double gc = twobody::find_critical_coupling(p).gCritical;
  CHECK(twobody::count_levels_below(p, 0.98 * gc, -1e-6, 1e-3) == 0);
  CHECK(twobody::count_levels_below(p, 1.05 * gc, -1e-6, 1e-3) == 1);
  CHECK(twobody::subcriticality_check(p, 0.99 * gc));
  CHECK_FALSE(twobody::subcriticality_check(p, 1.0001 * gc));
}

TEST_CASE("exponential well bound state satisfies J_{2ka}(2a sqrt g) = 0") {
  const double a = 1.0;
  const PairPotential p{PotentialFamily::Exponential, 1.0, a};
  for (double g : {1.6, 2.5, 4.0}) {
    const auto sol = twobody::bound_state(p, g);
    REQUIRE(sol.energy < 0.0);
    const double k = std::sqrt(-sol.energy);
    // J_{2ka}(2a sqrt g) changes sign at the exact k; compare the root location
    const double f = boost::math::cyl_bessel_j(2.0 * k * a, 2.0 * a * std::sqrt(g));
    const double df = (boost::math::cyl_bessel_j(2.0 * (k + 1e-6) * a, 2.0 * a * std::sqrt(g)) - f) / 1e-6;
    CHECK(std::abs(f / df) < 1e-6);
  }
}

TEST_CASE("bound state normalization and coupling inversion") {
  const PairPotential p{PotentialFamily::Gaussian, 1.0, 1.0};
  const double g = twobody::coupling_for_energy(p, -0.05);
  const auto sol = twobody::bound_state(p, g);
  CHECK(sol.energy == doctest::Approx(-0.05).epsilon(1e-6));
  double n = 0.0;
  for (std::size_t i = 1; i < sol.rGrid.size(); ++i) {
    const double h = sol.rGrid[i] - sol.rGrid[i - 1];
    n += 0.5 * h * (sol.uValues[i] * sol.uValues[i] + sol.uValues[i - 1] * sol.uValues[i - 1]);
  }
  CHECK(4.0 * kPi * n == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("two-body distances shrink toward threshold") {
  const PairPotential p{PotentialFamily::Exponential, 1.0, 1.0};
  const auto seq = twobody::energy_sequence(p, -0.1, 0.5, 7);
  REQUIRE(seq.size() == 7);
  for (std::size_t j = 1; j < seq.size(); ++j) {
    CHECK(seq[j].distance < seq[j - 1].distance);
    CHECK(seq[j].g < seq[j - 1].g);
    CHECK(seq[j].energy == doctest::Approx(0.5 * seq[j - 1].energy).epsilon(1e-6));
  }
  CHECK(seq.back().distance < 0.5 * seq.front().distance);
  for (const auto& e : seq) CHECK(e.k == doctest::Approx(std::sqrt(-e.energy)).epsilon(1e-6));
}

TEST_CASE("W kernel closed form") {
  for (double y : {0.0, 0.5, 1.0, 2.0, 5.0}) {
    const auto c = twobody::w_kernel_check(y);
    CHECK(c.closedForm == doctest::Approx(2.0 * kPi * std::exp(-y)).epsilon(1e-15));
    CHECK(c.numeric == doctest::Approx(c.closedForm).epsilon(1e-6));
  }
}
