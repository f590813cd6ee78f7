#include "threshold_lab/universal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "threshold_lab/quadrature.hpp"

namespace tlab::universal {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kRelTol = 1e-12;

void require_momentum(double k) {
  if (!(k > 0.0 && k < 1.0)) throw ConfigError("momentum k must lie in (0, 1)");
}

void require_interior(double theta) {
  if (!(theta > 0.0 && theta < 0.5 * kPi)) throw ConfigError("theta must lie strictly inside (0, pi/2)");
}

/// Sums ∫ f over consecutive windows of the given width starting at a until
/// the envelope bound drops below the accumulated value times 1e-17.
template <class F, class Envelope>
double periodwise_tail(F&& f, Envelope&& envelope, double a, double width) {
  double total = 0.0;
  for (int chunk = 0; chunk < 20'000'000; ++chunk) {
    const double lo = a + chunk * width;
    const double piece = quad::adaptive(f, lo, lo + width, kRelTol).value;
    total += piece;
    if (envelope(lo + width) * width < 1e-17 * std::abs(total) + 1e-300) break;
  }
  return total;
}

}  // namespace

UniversalProfile::UniversalProfile(double momentum) : k(momentum) {
  require_momentum(k);
  normalizationFactor = 1.0 / (2.0 * std::pow(kPi, 1.5) * std::sqrt(std::abs(std::log(k))));
}

double UniversalProfile::operator()(double rho, double theta) const {
  if (rho < 1.0) return 0.0;
  const double c = std::cos(theta), s = std::sin(theta);
  return normalizationFactor * std::exp(-k * rho * c) * std::sin(theta + k * rho * s) / (rho * rho * rho * c * s);
}

double theta_n(double rho, double theta, double k) { return UniversalProfile(k)(rho, theta); }

double theta_n_jacobi(double xMag, double yMag, double k) {
  require_momentum(k);
  const double rho = std::hypot(xMag, yMag);
  if (rho < 1.0) return 0.0;
  const double pref = 1.0 / (2.0 * std::pow(kPi, 1.5) * std::sqrt(std::abs(std::log(k))));
  const double num = (xMag * std::sin(k * yMag) + yMag * std::cos(k * yMag)) * std::exp(-k * xMag);
  const double den = xMag * xMag * xMag * yMag + yMag * yMag * yMag * xMag;
  return pref * num / den;
}

double heuristic_profile(double rho, double theta) {
  return std::sin(theta) / (rho * rho * rho * std::cos(theta) * std::sin(theta));
}

double radial_integral(double theta, double k) {
  require_interior(theta);
  require_momentum(k);
  const double c = std::cos(theta), s = std::sin(theta);

  // ρ in [1, 1/k]: no oscillation yet, integrate in log ρ
  auto logPart = [&](double lr) {
    const double rho = std::exp(lr);
    const double sn = std::sin(theta + k * rho * s);
    return std::exp(-2.0 * k * rho * c) * sn * sn;
  };
  const double L = -std::log(k);
  const double headKnots[] = {0.0, std::max(0.0, L - 6.0), std::max(0.0, L - 2.0), L};
  const double head = quad::adaptive(logPart, headKnots, kRelTol).value;

  // ρ > 1/k: period-wise in ρ
  auto f = [&](double rho) {
    const double sn = std::sin(theta + k * rho * s);
    return std::exp(-2.0 * k * rho * c) * sn * sn / rho;
  };
  auto envelope = [&](double rho) { return std::exp(-2.0 * k * rho * c) / rho; };
  const double tail = periodwise_tail(f, envelope, 1.0 / k, std::min(kPi / (k * s), 2.0 / (k * c)));
  return head + tail;
}

double d_theta_n(double theta, double k) {
  return radial_integral(theta, k) / (4.0 * kPi * kPi * kPi * std::abs(std::log(k)));
}

double t_integral(double theta, double k) {
  require_interior(theta);
  require_momentum(k);
  const double cot = std::cos(theta) / std::sin(theta);
  const double t0 = k * std::sin(theta);

  auto logPart = [&](double lt) {
    const double t = std::exp(lt);
    const double sn = std::sin(theta + t);
    return std::exp(-2.0 * t * cot) * sn * sn;
  };
  const double lt0 = std::log(t0);
  const double headKnots[] = {lt0, std::min(0.0, std::max(lt0, -6.0)), std::min(0.0, std::max(lt0, -2.0)), 0.0};
  const double head = quad::adaptive(logPart, headKnots, kRelTol).value;

  auto f = [&](double t) {
    const double sn = std::sin(theta + t);
    return std::exp(-2.0 * t * cot) * sn * sn / t;
  };
  double tail = 0.0;
  if (cot >= 0.1) {
    const double knots[] = {1.0, 10.0, 10.0 + 40.0 / cot};
    tail = quad::adaptive(f, knots, kRelTol).value;
  } else {
    tail = quad::adaptive(f, 1.0, 10.0, kRelTol).value;
    auto envelope = [&](double t) { return std::exp(-2.0 * t * cot) / t; };
    tail += periodwise_tail(f, envelope, 10.0, kPi);
  }
  return head + tail;
}

double universal_limit(double theta) {
  const double s = std::sin(theta);
  return s * s / (4.0 * kPi * kPi * kPi);
}

std::complex<double> expint_e1(std::complex<double> z) {
  using C = std::complex<double>;
  if (z == C(0.0)) throw ConfigError("expint_e1: z = 0");
  if (std::abs(z) < 4.0) {
    // -γ - ln z + Σ_{n≥1} (-1)^{n+1} z^n / (n n!)
    C sum = 0.0, term = 1.0;
    for (int n = 1; n < 200; ++n) {
      term *= -z / static_cast<double>(n);
      const C add = -term / static_cast<double>(n);
      sum += add;
      if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return -std::numbers::egamma - std::log(z) + sum;
  }
  // modified Lentz on e^{-z} / (z + 1 / (1 + 1 / (z + 2 / (1 + 2 / (z + ...)))))
  const double tiny = 1e-300;
  C b = z + 1.0;
  C c = 1.0 / tiny;
  C d = 1.0 / b;
  C h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const C del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-z);
}

double radial_integral_closed(double theta, double k) {
  require_interior(theta);
  require_momentum(k);
  const std::complex<double> z = std::polar(2.0 * k, -theta);
  const double first = expint_e1(2.0 * k * std::cos(theta)).real();
  const double second = (std::polar(1.0, 2.0 * theta) * expint_e1(z)).real();
  return 0.5 * (first - second);
}

double theta_norm(double k) {
  require_momentum(k);
  const double logInvK = -std::log(k);
  // inner ρ-integral in closed form; near θ = π/2 it grows like -ln(π/2 - θ),
  // so that end is integrated in t = -ln(π/2 - θ)
  auto f = [&](double theta) {
    if (theta <= 0.0 || theta >= 0.5 * kPi) return 0.0;
    return radial_integral_closed(theta, k);
  };
  const double phi0 = 0.05;
  auto nearEnd = [&](double t) {
    const double phi = std::exp(-t);
    return phi > 0.0 ? f(0.5 * kPi - phi) * phi : 0.0;
  };
  const double knots[] = {0.0, 0.25 * kPi, 0.5 * kPi - phi0};
  const double tailKnots[] = {-std::log(phi0), 10.0, std::numeric_limits<double>::infinity()};
  const quad::Result body = quad::adaptive(f, knots, 1e-12);
  const quad::Result end = quad::adaptive(nearEnd, tailKnots, 1e-12);
  const quad::Result res{body.value + end.value, body.error + end.error, body.intervals + end.intervals};
  if (!std::isfinite(res.value) || res.error > 1e-8 * std::abs(res.value)) {
    throw ConvergenceError("theta_norm: quadrature did not converge");
  }
  return std::sqrt(4.0 / (kPi * logInvK) * res.value);
}

PdeCheck heuristic_pde_residual(int n, const PolarSampleSet& grid) {
  if (n < 1) throw ConfigError("heuristic_pde_residual: n must be a positive integer");
  auto psi = [n](double rho, double theta) { return std::pow(rho, -n) * std::sin(n * theta); };
  auto psiXY = [n](double x, double y) {
    const double rho = std::hypot(x, y);
    return std::pow(rho, -n) * std::sin(n * std::atan2(y, x));
  };
  const double h = grid.step;
  // sixth-order central second derivative
  auto d2 = [h](auto&& fn) {
    return (2.0 * fn(-3) - 27.0 * fn(-2) + 270.0 * fn(-1) - 490.0 * fn(0) + 270.0 * fn(1) - 27.0 * fn(2) +
            2.0 * fn(3)) /
           (180.0 * h * h);
  };
  auto d1 = [h](auto&& fn) {
    return (-fn(-3) + 9.0 * fn(-2) - 45.0 * fn(-1) + 45.0 * fn(1) - 9.0 * fn(2) + fn(3)) / (60.0 * h);
  };

  PdeCheck out;
  for (int i = 0; i < grid.nRho; ++i) {
    const double rho = grid.rhoMin + (grid.rhoMax - grid.rhoMin) * i / std::max(1, grid.nRho - 1);
    for (int j = 0; j < grid.nTheta; ++j) {
      const double theta = 0.5 * kPi * (j + 0.5) / grid.nTheta;
      auto alongRho = [&](int m) { return psi(rho + m * h, theta); };
      auto alongTheta = [&](int m) { return psi(rho, theta + m * h); };
      const double res = d1(alongRho) / rho + d2(alongRho) + d2(alongTheta) / (rho * rho);
      out.residual = std::max(out.residual, std::abs(res));
    }
    // θ = π/2 is |x| = 0; θ = 0 is |y| = 0
    auto acrossAxis = [&](int m) { return psiXY(m * h, rho); };
    out.boundaryDerivative = std::max(out.boundaryDerivative, std::abs(d1(acrossAxis)));
    out.boundaryValue = std::max(out.boundaryValue, std::abs(psi(rho, 0.0)));
  }
  out.boundaryOk = out.boundaryDerivative < 1e-8 && out.boundaryValue < 1e-8;
  return out;
}

}  // namespace tlab::universal
