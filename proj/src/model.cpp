#include "threshold_lab/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "threshold_lab/quadrature.hpp"

namespace tlab {

void MassConfig::validate() const {
  if (!(m1 > 0.0 && m2 > 0.0 && m3 > 0.0) || !std::isfinite(m1 + m2 + m3)) {
    throw ConfigError("masses must be finite and strictly positive");
  }
}

JacobiFrame build_jacobi_frame(const MassConfig& masses) {
  masses.validate();
  const double m1 = masses.m1, m2 = masses.m2, m3 = masses.m3;
  const double total = m1 + m2 + m3;

  JacobiFrame f;
  f.masses = masses;
  f.mu12 = m1 * m2 / (m1 + m2);
  f.mu13 = m1 * m3 / (m1 + m3);
  f.mu23 = m2 * m3 / (m2 + m3);
  f.M12 = (m1 + m2) * m3 / total;
  f.M13 = (m1 + m3) * m2 / total;
  f.alpha = 1.0 / std::sqrt(2.0 * f.mu12);
  f.alphaPrime = 1.0 / std::sqrt(2.0 * f.mu13);

  // r2 - r1 = alpha x,  r3 - (m1 r1 + m2 r2)/(m1 + m2) = beta y
  const double beta = 1.0 / std::sqrt(2.0 * f.M12);
  f.sep12 = {f.alpha, 0.0};
  f.sep13 = {f.alpha * m2 / (m1 + m2), beta};
  f.sep23 = {-f.alpha * m1 / (m1 + m2), beta};
  return f;
}

std::array<double, 4> JacobiFrame::xyToEtaZeta() const {
  // eta  = sqrt(2 mu13) (r3 - r1)
  // zeta = sqrt(2 M13) ((r2 - r1) - m3/(m1 + m3) (r3 - r1))
  const double s13 = std::sqrt(2.0 * mu13);
  const double S13 = std::sqrt(2.0 * M13);
  const double w3 = masses.m3 / (masses.m1 + masses.m3);
  const double ex = sep13.cx, ey = sep13.cy;
  return {s13 * ex, s13 * ey, S13 * (alpha - w3 * ex), -S13 * w3 * ey};
}

double pair_distance(const SeparationCoeffs& c, double r1, double r2, double u) {
  const double a = c.cx * r1;
  const double b = c.cy * r2;
  const double sq = a * a + b * b + 2.0 * a * b * u;
  return std::sqrt(std::max(sq, 0.0));
}

Separations separation_distances(double r1, double r2, double u, const JacobiFrame& frame) {
  return {frame.alpha * r1, pair_distance(frame.sep13, r1, r2, u), pair_distance(frame.sep23, r1, r2, u)};
}

std::string_view to_string(PotentialFamily family) {
  switch (family) {
    case PotentialFamily::Gaussian: return "gaussian";
    case PotentialFamily::Exponential: return "exponential";
    case PotentialFamily::TruncatedYukawa: return "truncated-yukawa";
    case PotentialFamily::Harmonic: return "harmonic";
  }
  return "unknown";
}

PotentialFamily parse_family(std::string_view name) {
  if (name == "gaussian") return PotentialFamily::Gaussian;
  if (name == "exponential") return PotentialFamily::Exponential;
  if (name == "truncated-yukawa" || name == "yukawa") return PotentialFamily::TruncatedYukawa;
  if (name == "harmonic") return PotentialFamily::Harmonic;
  throw ConfigError("unknown potential family '" + std::string(name) + "'");
}

void PairPotential::validate() const {
  if (!(depth >= 0.0) || !std::isfinite(depth)) throw ConfigError("potential depth must be finite and nonnegative");
  if (!(range > 0.0) || !std::isfinite(range)) throw ConfigError("potential range must be positive");
}

double PairPotential::shape(double s) const {
  switch (family) {
    case PotentialFamily::Gaussian: return std::exp(-s * s);
    case PotentialFamily::Exponential: return std::exp(-s);
    case PotentialFamily::TruncatedYukawa:
      return s < 1e-8 ? (1.0 - 0.5 * s) : -std::expm1(-s) * std::exp(-s) / s;
    case PotentialFamily::Harmonic: return s * s;
  }
  return 0.0;
}

double PairPotential::unitValue(double r) const {
  const double s = shape(r / range);
  return isWell() ? -s : s;
}

double PairPotential::exponentialBoundConstant() const {
  switch (family) {
    case PotentialFamily::Gaussian: return std::exp(0.25);  // max of exp(s - s^2)
    case PotentialFamily::Exponential: return 1.0;
    case PotentialFamily::TruncatedYukawa: return 1.0;      // (1 - e^{-s})/s <= 1
    case PotentialFamily::Harmonic: return std::numeric_limits<double>::infinity();
  }
  return std::numeric_limits<double>::infinity();
}

double PairPotential::cutoffRadius() const {
  switch (family) {
    case PotentialFamily::Gaussian: return 6.0 * range;
    case PotentialFamily::Exponential: return 30.0 * range;
    case PotentialFamily::TruncatedYukawa: return 30.0 * range;
    case PotentialFamily::Harmonic: return std::numeric_limits<double>::infinity();
  }
  return std::numeric_limits<double>::infinity();
}

MomentIntegrals moment_integrals(const PairPotential& p) {
  p.validate();
  if (!p.isWell()) throw ConvergenceError("moment integrals diverge for the harmonic family");
  if (p.depth == 0.0) return {};

  const double delta = p.delta;
  const double a = p.range;
  const double four_pi = 4.0 * std::numbers::pi;
  auto V = [&](double r) { return std::abs(p.value(r)); };
  auto radial = [&](auto&& weight) {
    auto f = [&](double r) {
      const double v = V(r);
      return four_pi * r * r * weight(r, v);
    };
    const double knots[] = {0.0, a, 4.0 * a, 16.0 * a, std::numeric_limits<double>::infinity()};
    const quad::Result res = quad::adaptive(f, knots, 1e-12);
    if (!std::isfinite(res.value) || res.error > 1e-6 * std::max(1.0, std::abs(res.value))) {
      throw ConvergenceError("moment quadrature did not converge; potential is not admissible");
    }
    return res.value;
  };

  const double l2 = radial([](double, double v) { return v * v; });
  const double l2_weighted = radial([&](double r, double v) { return (1.0 + std::pow(r, delta)) * v * v; });
  const double l2_r2_weighted =
      radial([&](double r, double v) { return r * r * (1.0 + std::pow(r, delta)) * v * v; });
  const double l1_weighted = radial([&](double r, double v) { return v * std::pow(1.0 + r, 2.0 * delta); });

  return {std::max(l2_r2_weighted, l2_weighted), std::max(l2, l1_weighted)};
}

}  // namespace tlab
