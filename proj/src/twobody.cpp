#include "threshold_lab/twobody.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "threshold_lab/quadrature.hpp"

namespace tlab::twobody {
namespace {

constexpr double kRescaleAbove = 1e200;

/// One Numerov step for u'' = f u: returns u_{n+1}.
inline double numerov_step(double h2, double fPrev, double fCur, double fNext, double uPrev, double uCur) {
  const double c = h2 / 12.0;
  return (2.0 * uCur * (1.0 + 5.0 * c * fCur) - uPrev * (1.0 - c * fPrev)) / (1.0 - c * fNext);
}

/// Composite Simpson over a uniform grid; the last panel falls back to the
/// trapezoid rule when the sample count is even.
double simpson(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  if (n < 2) return 0.0;
  const std::size_t last = (n % 2 == 1) ? n - 1 : n - 2;
  double s = 0.0;
  for (std::size_t i = 0; i + 2 <= last; i += 2) s += f[i] + 4.0 * f[i + 1] + f[i + 2];
  s *= h / 3.0;
  if (last != n - 1) s += 0.5 * h * (f[n - 2] + f[n - 1]);
  return s;
}

double turning_radius(const PairPotential& p, double g, double energy, double h) {
  // every supported profile is monotone, so the first crossing is the one
  double r = h;
  const double rCap = p.isWell() ? p.cutoffRadius() : p.range * (std::sqrt(std::max(energy, 0.0) / g) + 1.0) + 1.0;
  while (r < rCap && g * p.unitValue(r) < energy) r += h;
  return std::max(r, 10.0 * h);
}

struct OutwardState {
  double u = 0.0;
  double du = 0.0;
  int nodes = 0;
};

/// Outward Numerov for -u'' + (g v - E) u = 0 from u(0) = 0 to r_end; only
/// signs and the final (u, u') are kept, with overflow rescaling.
OutwardState shoot_outward(const PairPotential& p, double g, double energy, double h, double rEnd) {
  const auto f = [&](double r) { return g * p.unitValue(r) - energy; };
  const std::size_t steps = static_cast<std::size_t>(std::ceil(rEnd / h));
  const double h2 = h * h;
  double uPrev = 0.0, uCur = h;
  double fPrev = f(0.0), fCur = f(h);
  OutwardState st;
  for (std::size_t n = 1; n <= steps; ++n) {
    const double fNext = f((n + 1) * h);
    double uNext = numerov_step(h2, fPrev, fCur, fNext, uPrev, uCur);
    if ((uNext < 0.0) != (uCur < 0.0) || uNext == 0.0) {
      if (n < steps) ++st.nodes;
    }
    if (std::abs(uNext) > kRescaleAbove) {
      uNext /= kRescaleAbove;
      uCur /= kRescaleAbove;
    }
    if (n == steps) {
      st.u = uCur;
      st.du = (uNext - uPrev) / (2.0 * h);
    }
    uPrev = uCur;
    uCur = uNext;
    fPrev = fCur;
    fCur = fNext;
  }
  return st;
}

}  // namespace

ZeroEnergyResult integrate_zero_energy(const PairPotential& p, double g, const NumerovOptions& opts) {
  p.validate();
  if (g < 0.0) throw ConfigError("integrate_zero_energy: coupling must be nonnegative");
  const double h = opts.stepFactor * p.range;
  const double rMax = opts.rMaxFactor * p.range;
  const std::size_t steps = static_cast<std::size_t>(std::llround(rMax / h));
  const double h2 = h * h;

  std::vector<double> u(steps + 1, 0.0);
  u[1] = h;
  double fPrev = g * p.unitValue(0.0), fCur = g * p.unitValue(h);
  ZeroEnergyResult res;
  for (std::size_t n = 1; n < steps; ++n) {
    const double fNext = g * p.unitValue((n + 1) * h);
    u[n + 1] = numerov_step(h2, fPrev, fCur, fNext, u[n - 1], u[n]);
    if ((u[n + 1] < 0.0) != (u[n] < 0.0)) ++res.nodes;
    fPrev = fCur;
    fCur = fNext;
  }

  // least squares u ≈ a + b r on the tail window
  const std::size_t first = steps - static_cast<std::size_t>(opts.tailFraction * steps);
  double sr = 0, su = 0, srr = 0, sru = 0;
  const double cnt = static_cast<double>(steps - first + 1);
  for (std::size_t n = first; n <= steps; ++n) {
    const double r = n * h;
    sr += r;
    su += u[n];
    srr += r * r;
    sru += r * u[n];
  }
  const double det = cnt * srr - sr * sr;
  res.slope = (cnt * sru - sr * su) / det;
  res.intercept = (su - res.slope * sr) / cnt;
  return res;
}

CriticalCouplingResult find_critical_coupling(const PairPotential& p, const CriticalOptions& opts) {
  p.validate();
  if (!p.isWell()) throw ConfigError("critical coupling requires an attractive potential family");
  auto above = [&](double g) {
    const ZeroEnergyResult z = integrate_zero_energy(p, g, opts.numerov);
    return z.nodes >= 1 || z.slope < 0.0;
  };
  double lo = 0.0;
  double hi = opts.gMaxFactor / (p.range * p.range);
  if (above(lo) || !above(hi)) {
    throw ConvergenceError("find_critical_coupling: no sign change of the asymptotic slope in [0, gMax]");
  }
  for (int iter = 0; iter < 200 && (hi - lo) > opts.tolerance * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (above(mid) ? hi : lo) = mid;
  }
  CriticalCouplingResult res;
  res.gCritical = 0.5 * (lo + hi);
  res.bracket = {lo, hi};
  res.slopeAtCritical = integrate_zero_energy(p, res.gCritical, opts.numerov).slope;
  return res;
}

double pair_critical_depth(const PairPotential& p, double reducedMass) {
  if (!(reducedMass > 0.0)) throw ConfigError("reduced mass must be positive");
  PairPotential unit = p;
  unit.depth = 1.0;
  return find_critical_coupling(unit).gCritical / (2.0 * reducedMass);
}

bool subcriticality_check(const PairPotential& p, double lambda, double reducedMass, double margin) {
  const double strength = lambda * p.depth;
  if (strength == 0.0) return true;
  return strength < pair_critical_depth(p, reducedMass) * (1.0 - margin);
}

int count_levels_below(const PairPotential& p, double g, double energy, double step) {
  const double rT = p.isWell() ? p.cutoffRadius()
                               : p.range * (std::sqrt(std::max(energy, 0.0) / std::max(g, 1e-300)) + 6.0);
  const OutwardState st = shoot_outward(p, g, energy, step, rT);
  const double kappa = std::sqrt(std::max(g * p.unitValue(rT) - energy, 0.0));
  // a pending node lies beyond r_T when the growing component has the sign
  // opposite to u(r_T)
  const bool pending = st.u * (st.du + kappa * st.u) < 0.0;
  return st.nodes + (pending ? 1 : 0);
}

RadialSolution bound_state(const PairPotential& p, double g, const BoundStateOptions& opts) {
  p.validate();
  if (!(g > 0.0)) throw ConfigError("bound_state: coupling must be positive");
  const double h = opts.stepFactor * p.range;

  double lo = 0.0, hi = 0.0;
  if (p.isWell()) {
    lo = -g * p.shape(0.0) * (1.0 + 1e-12);
    hi = 0.0;
    if (count_levels_below(p, g, hi, h) < 1) {
      throw ConvergenceError("bound_state: no bound state below threshold at this coupling");
    }
  } else {
    lo = 0.0;
    hi = g / (p.range * p.range);
    while (count_levels_below(p, g, hi, h) < 1) hi *= 2.0;
  }
  for (int iter = 0; iter < 300; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (count_levels_below(p, g, mid, h) >= 1 ? hi : lo) = mid;
  }
  const double energy = 0.5 * (lo + hi);

  // Outward to the turning point, inward from the far boundary, matched in value.
  const double rC = turning_radius(p, g, energy, h);
  double rEnd = 0.0;
  if (p.isWell()) {
    const double kappa = std::sqrt(-energy);
    rEnd = std::max(p.cutoffRadius(), rC) + opts.tailDecayLengths / kappa;
  } else {
    rEnd = p.range * (std::sqrt(energy / g) + 6.0);
  }
  const std::size_t nEnd = static_cast<std::size_t>(std::ceil(rEnd / h));
  const std::size_t nC = std::min(static_cast<std::size_t>(std::llround(rC / h)), nEnd - 2);
  const double h2 = h * h;
  auto f = [&](std::size_t n) { return g * p.unitValue(n * h) - energy; };

  std::vector<double> u(nEnd + 1, 0.0);
  u[1] = h;
  for (std::size_t n = 1; n < nC; ++n) u[n + 1] = numerov_step(h2, f(n - 1), f(n), f(n + 1), u[n - 1], u[n]);
  const double uMatch = u[nC];

  std::vector<double> in(nEnd + 1, 0.0);
  in[nEnd] = 0.0;
  in[nEnd - 1] = 1e-30;
  for (std::size_t n = nEnd - 1; n > nC; --n) {
    in[n - 1] = numerov_step(h2, f(n + 1), f(n), f(n - 1), in[n + 1], in[n]);
    if (std::abs(in[n - 1]) > kRescaleAbove) {
      for (std::size_t m = n - 1; m <= nEnd; ++m) in[m] /= kRescaleAbove;
    }
  }
  const double scale = uMatch / in[nC];
  for (std::size_t n = nC + 1; n <= nEnd; ++n) u[n] = scale * in[n];

  std::vector<double> u2(u.size());
  std::transform(u.begin(), u.end(), u2.begin(), [](double v) { return v * v; });
  const double norm2 = 4.0 * std::numbers::pi * simpson(u2, h);
  const double inv = 1.0 / std::sqrt(norm2);
  const double sign = (u[nC] < 0.0) ? -1.0 : 1.0;

  RadialSolution sol;
  sol.energy = energy;
  sol.coupling = g;
  sol.rGrid.resize(u.size());
  sol.uValues.resize(u.size());
  for (std::size_t n = 0; n < u.size(); ++n) {
    sol.rGrid[n] = n * h;
    sol.uValues[n] = sign * inv * u[n];
  }
  std::transform(sol.uValues.begin(), sol.uValues.end(), u2.begin(), [](double v) { return v * v; });
  sol.norm = std::sqrt(4.0 * std::numbers::pi * simpson(u2, h));
  return sol;
}

double coupling_for_energy(const PairPotential& p, double energy, const BoundStateOptions& opts) {
  if (!(energy < 0.0)) throw ConfigError("coupling_for_energy: target energy must be negative");
  if (!p.isWell()) throw ConfigError("coupling_for_energy: requires an attractive family");
  const double h = opts.stepFactor * p.range;
  PairPotential unit = p;
  unit.depth = 1.0;
  double lo = 0.0;
  double hi = find_critical_coupling(unit).gCritical;
  while (count_levels_below(unit, hi, energy, h) < 1) hi *= 1.5;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi || (hi - lo) < 1e-15 * hi) break;
    (count_levels_below(unit, mid, energy, h) >= 1 ? hi : lo) = mid;
  }
  return hi;
}

double theorem1_distance(const RadialSolution& sol) {
  if (!(sol.energy < 0.0)) throw ConfigError("theorem1_distance: requires a bound state");
  if (sol.rGrid.size() < 3) return std::sqrt(2.0);
  const double k = std::sqrt(-sol.energy);
  const double h = sol.rGrid[1] - sol.rGrid[0];
  const double pref = std::sqrt(k / (2.0 * std::numbers::pi));
  std::vector<double> integrand(sol.rGrid.size());
  for (std::size_t n = 0; n < integrand.size(); ++n) {
    integrand[n] = sol.uValues[n] * pref * std::exp(-k * sol.rGrid[n]);
  }
  const double overlap = 4.0 * std::numbers::pi * simpson(integrand, h) / sol.norm;
  return std::sqrt(std::max(0.0, 2.0 - 2.0 * std::abs(overlap)));
}

KernelCheck w_kernel_check(double yMag) {
  if (!(yMag >= 0.0)) throw ConfigError("w_kernel_check: |y| must be nonnegative");
  const double Y = yMag;
  KernelCheck out;
  out.closedForm = 2.0 * std::numbers::pi * std::exp(-Y);

  // Spherical coordinates about the origin, axis along y; the polar variable
  // is 1 - cos = sigma^2 to tame the 1/|z - y| peak at r = |y|.
  double innerErr = 0.0;
  auto inner = [&](double r) {
    if (r == 0.0) return 0.0;
    const double d = r - Y;
    auto g = [&](double sigma) {
      const double s = std::sqrt(d * d + 2.0 * r * Y * sigma * sigma);
      if (s == 0.0) return 2.0 / std::sqrt(2.0 * r * Y);
      return 2.0 * sigma * std::exp(-s) / s;
    };
    if (Y == 0.0) return 2.0 * std::exp(-r) / r;
    const double sKnee = std::min(std::sqrt(2.0), std::abs(d) / std::sqrt(2.0 * r * Y));
    const double knots[] = {0.0, sKnee, std::sqrt(2.0)};
    const quad::Result res = quad::adaptive(g, knots, 1e-11);
    innerErr = std::max(innerErr, res.error);
    return res.value;
  };
  auto outer = [&](double r) { return r * std::exp(-r) * inner(r); };
  std::vector<double> knots = {0.0};
  if (Y > 0.0) knots.push_back(Y);
  knots.push_back(Y + 10.0);
  knots.push_back(std::numeric_limits<double>::infinity());
  const quad::Result res = quad::adaptive(outer, knots, 1e-11);
  out.numeric = 2.0 * std::numbers::pi * res.value;
  out.error = 2.0 * std::numbers::pi * res.error + innerErr;
  if (!std::isfinite(out.numeric)) throw ConvergenceError("w_kernel_check: quadrature failed");
  return out;
}

std::vector<SequenceEntry> energy_sequence(const PairPotential& p, double startE, double ratio, int count,
                                           const BoundStateOptions& opts) {
  std::vector<SequenceEntry> out;
  double e = startE;
  for (int j = 0; j < count; ++j, e *= ratio) {
    const double g = coupling_for_energy(p, e, opts);
    const RadialSolution sol = bound_state(p, g, opts);
    out.push_back({g, sol.energy, std::sqrt(-sol.energy), theorem1_distance(sol)});
  }
  return out;
}

}  // namespace tlab::twobody
