#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/special_functions/legendre.hpp>

#include "threshold_lab/quadrature.hpp"

using namespace tlab;
constexpr double kPi = std::numbers::pi;

TEST_CASE("gauss_legendre integrates polynomials of degree 2n-1 exactly") {
  for (int n : {1, 2, 5, 16, 48}) {
    const quad::GaussRule r = quad::gauss_legendre(n);
    REQUIRE(r.nodes.size() == static_cast<std::size_t>(n));
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double s = 0.0;
      for (int i = 0; i < n; ++i) s += r.weights[i] * std::pow(r.nodes[i], p);
      const double exact = (p % 2 == 0) ? 2.0 / (p + 1) : 0.0;
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("gauss_legendre nodes are Legendre roots") {
  const quad::GaussRule r = quad::gauss_legendre(12);
  for (double x : r.nodes) CHECK(std::abs(boost::math::legendre_p(12, x)) < 1e-13);
}

TEST_CASE("mapped rule on [a, b]") {
  const quad::GaussRule r = quad::gauss_legendre(20, 0.0, 0.5 * kPi);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * std::sin(r.nodes[i]) * std::sin(r.nodes[i]);
  CHECK(s == doctest::Approx(kPi / 4).epsilon(1e-14));
}

TEST_CASE("legendre_values matches boost") {
  for (double x : {-0.93, -0.2, 0.0, 0.41, 1.0}) {
    const std::vector<double> p = quad::legendre_values(9, x);
    for (int l = 0; l <= 9; ++l) CHECK(p[l] == doctest::Approx(boost::math::legendre_p(l, x)).epsilon(1e-13));
  }
}

TEST_CASE("adaptive handles endpoint singularities and infinite tails") {
  auto logf = [](double x) { return std::log(x); };
  CHECK(quad::adaptive(logf, 0.0, 1.0).value == doctest::Approx(-1.0).epsilon(1e-11));

  auto inv = [](double x) { return 1.0 / std::sqrt(x); };
  CHECK(quad::adaptive(inv, 0.0, 4.0).value == doctest::Approx(4.0).epsilon(1e-10));

  auto gauss = [](double x) { return std::exp(-x * x); };
  CHECK(quad::adaptive(gauss, 0.0, INFINITY).value == doctest::Approx(0.5 * std::sqrt(kPi)).epsilon(1e-12));

  auto osc = [](double x) { return std::sin(40.0 * x) * std::sin(40.0 * x); };
  const double exact = 0.5 - std::sin(80.0) / 160.0;
  CHECK(quad::adaptive(osc, 0.0, 1.0).value == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("adaptive with breakpoints and a kink") {
  auto f = [](double x) { return std::abs(x - 0.3); };
  const double knots[] = {0.0, 0.3, 1.0};
  const quad::Result r = quad::adaptive(f, std::span<const double>(knots), 1e-13);
  CHECK(r.value == doctest::Approx(0.5 * 0.09 + 0.5 * 0.49).epsilon(1e-14));
  CHECK(r.error <= 1e-12);
}
