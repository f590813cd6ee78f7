#pragma once

#include <utility>
#include <vector>

#include "threshold_lab/model.hpp"

namespace tlab::twobody {

/// Radial s-wave problem -u'' + g * unitValue(r) u = E u with u = r psi.
/// Units: hbar^2 / (2 mu) = 1, i.e. the operator is -Δ + g v.

struct NumerovOptions {
  double rMaxFactor = 40.0;   // r_max = rMaxFactor * range
  double stepFactor = 1.0 / 200.0;  // h = stepFactor * range
  double tailFraction = 0.25;
};

struct ZeroEnergyResult {
  double slope = 0.0;      // b in u(r) ~ a + b r on the tail window
  double intercept = 0.0;  // a
  int nodes = 0;           // sign changes of u on (0, r_max)
};

ZeroEnergyResult integrate_zero_energy(const PairPotential& p, double g, const NumerovOptions& opts = {});

struct CriticalCouplingResult {
  double gCritical = 0.0;
  std::pair<double, double> bracket{0.0, 0.0};
  double slopeAtCritical = 0.0;
};

struct CriticalOptions {
  NumerovOptions numerov;
  double gMaxFactor = 50.0;  // initial bracket [0, gMaxFactor / range^2]
  double tolerance = 1e-12;  // relative bracket width
};

CriticalCouplingResult find_critical_coupling(const PairPotential& p, const CriticalOptions& opts = {});

/// Depth at which the pair with the given reduced mass sits at critical
/// coupling in the Jacobi units of the three-body problem.
double pair_critical_depth(const PairPotential& p, double reducedMass);

inline constexpr double kDefaultSubcriticalMargin = 1e-3;

/// True iff lambda * depth < gCritical (1 - margin) for a pair of the given
/// reduced mass (0.5 reproduces the bare -Δ + g v convention).
bool subcriticality_check(const PairPotential& p, double lambda, double reducedMass = 0.5,
                          double margin = kDefaultSubcriticalMargin);

struct RadialSolution {
  std::vector<double> rGrid;
  std::vector<double> uValues;  // u = r psi, normalized 4π∫u² dr = 1
  double energy = 0.0;
  double norm = 1.0;
  double coupling = 0.0;
};

struct BoundStateOptions {
  double stepFactor = 1.0 / 200.0;
  double tailDecayLengths = 40.0;  // grid extends this many 1/k beyond the core
};

/// Lowest s-wave bound state of -Δ + g v by shooting with node counting.
RadialSolution bound_state(const PairPotential& p, double g, const BoundStateOptions& opts = {});

/// Coupling g at which the ground state sits at the requested energy E < 0.
double coupling_for_energy(const PairPotential& p, double energy, const BoundStateOptions& opts = {});

/// Number of s-wave levels strictly below E for -Δ + g v (Sturm count).
int count_levels_below(const PairPotential& p, double g, double energy, double step);

/// min over phase of || psi - e^{iφ} f_k ||, f_k = sqrt(k) e^{-k r} / (sqrt(2π) r).
double theorem1_distance(const RadialSolution& sol);

struct KernelCheck {
  double numeric = 0.0;
  double closedForm = 0.0;
  double error = 0.0;  // quadrature error estimate
};

/// W(y) = ∫ e^{-|z|} e^{-|z-y|} / (|z| |z-y|) d^3 z, numerically and as 2π e^{-|y|}.
KernelCheck w_kernel_check(double yMag);

struct SequenceEntry {
  double g = 0.0;
  double energy = 0.0;
  double k = 0.0;
  double distance = 0.0;
};

/// Geometric sequence of energies startE * ratio^j, j = 0..count-1.
std::vector<SequenceEntry> energy_sequence(const PairPotential& p, double startE, double ratio, int count,
                                           const BoundStateOptions& opts = {});

}  // namespace tlab::twobody
