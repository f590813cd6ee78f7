#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/expint.hpp>

#include "threshold_lab/universal.hpp"

using namespace tlab;
constexpr double kPi = std::numbers::pi;

TEST_CASE("complex E1 against boost on the real axis and quadrature off it") {
  for (double x : {0.01, 0.5, 3.9, 4.1, 20.0})
    CHECK(universal::expint_e1({x, 0.0}).real() == doctest::Approx(boost::math::expint(1, x)).epsilon(1e-12));

  boost::math::quadrature::exp_sinh<double> es;
  for (std::complex<double> z : {std::complex<double>(0.3, 1.2), {2.0, -3.0}, {6.0, 5.0}, {0.02, -0.5}, {3.9, 0.1}}) {
    // E1(z) = e^{-z} ∫_0^∞ e^{-t} / (z + t) dt for |arg z| < π
    const double re = es.integrate([&](double t) { return (std::exp(-t) / (z + t)).real(); });
    const double im = es.integrate([&](double t) { return (std::exp(-t) / (z + t)).imag(); });
    const std::complex<double> ref = std::exp(-z) * std::complex<double>(re, im);
    const std::complex<double> got = universal::expint_e1(z);
    CHECK(std::abs(got - ref) < 1e-10 * std::abs(ref));
  }
}

TEST_CASE("closed-form hyperradial integral matches direct quadrature") {
  for (double theta : {0.1, 0.7, 1.2, 1.5})
    for (double k : {0.3, 1e-2, 1e-5}) {
      CHECK(universal::radial_integral_closed(theta, k) ==
            doctest::Approx(universal::radial_integral(theta, k)).epsilon(1e-10));
    }
}

TEST_CASE("substitution identity") {
  for (double theta : {0.2, 0.6, 0.7853981633974483, 1.0, 1.4})
    for (double k : {1e-2, 1e-3, 1e-6, 1e-9, 1e-12})
      CHECK(std::abs(universal::radial_integral(theta, k) - universal::t_integral(theta, k)) <
            1e-10 * universal::radial_integral(theta, k));
}

TEST_CASE("angular distribution converges at rate 1/|ln k|") {
  const double theta = kPi / 4;
  const double lim = universal::universal_limit(theta);
  CHECK(lim == doctest::Approx(1.0 / (8.0 * kPi * kPi * kPi)).epsilon(1e-15));
  const double e3 = std::abs(universal::d_theta_n(theta, 1e-3) - lim);
  const double e6 = std::abs(universal::d_theta_n(theta, 1e-6) - lim);
  CHECK(e3 / e6 == doctest::Approx(2.0).epsilon(0.05));
  for (double t : {0.3, 0.9, 1.3}) {
    double prev = INFINITY;
    for (double k : {1e-2, 1e-4, 1e-8, 1e-12}) {
      const double e = std::abs(universal::d_theta_n(t, k) - universal::universal_limit(t));
      CHECK(e < prev);
      prev = e;
    }
  }
}

TEST_CASE("universal limit integrates to one") {
  // 8π² ∫_{-1}^{1} du ∫_0^{π/2} sin²θ / (4π³) dθ
  boost::math::quadrature::tanh_sinh<double> ts;
  const double I = ts.integrate([](double t) { return universal::universal_limit(t); }, 0.0, kPi / 2);
  CHECK(8.0 * kPi * kPi * 2.0 * I == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("profile in polar and Jacobi forms") {
  for (double k : {0.5, 1e-3, 1e-9})
    for (double rho : {1.0, 2.5, 40.0, 1e4})
      for (double theta : {0.05, 0.8, 1.5}) {
        const double a = universal::theta_n(rho, theta, k);
        const double b = universal::theta_n_jacobi(rho * std::cos(theta), rho * std::sin(theta), k);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
      }
  CHECK(universal::theta_n(0.99, 0.5, 0.1) == 0.0);
  CHECK_THROWS_AS(universal::theta_n(2.0, 0.5, 1.5), ConfigError);
  CHECK_THROWS_AS(universal::d_theta_n(0.0, 0.1), ConfigError);
}

TEST_CASE("profile norm against tanh-sinh over the closed-form radial integral") {
  boost::math::quadrature::tanh_sinh<double> ts;
  for (double k : {0.3, 0.1, 1e-4}) {
    const double I = ts.integrate([k](double t) { return universal::radial_integral_closed(t, k); }, 0.0, kPi / 2);
    const double ref = std::sqrt(4.0 / (kPi * std::abs(std::log(k))) * I);
    CHECK(universal::theta_norm(k) == doctest::Approx(ref).epsilon(1e-8));
  }
}

TEST_CASE("profile norm tends to one") {
  double prevGap = INFINITY;
  for (double k : {1e-1, 1e-2, 1e-3, 1e-6, 1e-9, 1e-12}) {
    const double gap = std::abs(universal::theta_norm(k) - 1.0);
    CHECK(gap < prevGap);
    prevGap = gap;
  }
  CHECK(prevGap < 2e-3);
}

TEST_CASE("heuristic PDE: odd harmonics pass, even ones fail the boundary conditions") {
  for (int n : {1, 3}) {
    const auto c = universal::heuristic_pde_residual(n);
    CHECK(c.residual < 1e-8);
    CHECK(c.boundaryOk);
    CHECK(c.boundaryValue < 1e-12);
  }
  for (int n : {2, 4}) {
    const auto c = universal::heuristic_pde_residual(n);
    CHECK(c.residual < 1e-8);
    CHECK_FALSE(c.boundaryOk);
  }
}
