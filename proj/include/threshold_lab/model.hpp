#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <string_view>

namespace tlab {

/// Base class for all library errors; the CLI maps subclasses to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class AdmissibilityError : public Error {
 public:
  using Error::Error;
};

// ---------------------------------------------------------------------------
// Masses and Jacobi coordinates (hbar = 1)
// ---------------------------------------------------------------------------

struct MassConfig {
  double m1 = 1.0;
  double m2 = 1.0;
  double m3 = 1.0;

  void validate() const;
};

/// Coefficients (c_x, c_y) such that the squared separation of a particle
/// pair is c_x^2 r1^2 + c_y^2 r2^2 + 2 c_x c_y r1 r2 u, where r1 = |x|,
/// r2 = |y| and u = x̂·ŷ.
struct SeparationCoeffs {
  double cx = 0.0;
  double cy = 0.0;
};

struct JacobiFrame {
  MassConfig masses;
  double mu12 = 0.0, mu13 = 0.0, mu23 = 0.0;
  double M12 = 0.0, M13 = 0.0;
  double alpha = 0.0;       // 1/sqrt(2 mu12)
  double alphaPrime = 0.0;  // 1/sqrt(2 mu13)
  SeparationCoeffs sep12, sep13, sep23;

  /// Row-major 2x2 block B with (eta, zeta) = B (x, y), eta and zeta being
  /// the Jacobi coordinates of the {1,3} partition.
  std::array<double, 4> xyToEtaZeta() const;
};

JacobiFrame build_jacobi_frame(const MassConfig& masses);

struct Separations {
  double d12 = 0.0;
  double d13 = 0.0;
  double d23 = 0.0;
};

/// Physical pair distances at Jacobi radii r1 = |x|, r2 = |y| and u = x̂·ŷ.
Separations separation_distances(double r1, double r2, double u, const JacobiFrame& frame);

double pair_distance(const SeparationCoeffs& c, double r1, double r2, double u);

// ---------------------------------------------------------------------------
// Pair potentials
// ---------------------------------------------------------------------------

enum class PotentialFamily {
  Gaussian,         // exp(-(r/a)^2)
  Exponential,      // exp(-r/a)
  TruncatedYukawa,  // (1 - exp(-r/a)) exp(-r/a) / (r/a), finite at the origin
  Harmonic,         // +(r/a)^2; internal oscillator oracle, never admissible
};

std::string_view to_string(PotentialFamily family);
PotentialFamily parse_family(std::string_view name);

inline constexpr double kDefaultDelta = 0.1;

struct PairPotential {
  PotentialFamily family = PotentialFamily::Gaussian;
  double depth = 0.0;  // g >= 0; value is -g * shape(r)
  double range = 1.0;
  double delta = kDefaultDelta;

  void validate() const;

  /// Dimensionless profile at reduced distance s = r / range. Nonnegative for
  /// the attractive families; s^2 for the harmonic test family.
  double shape(double s) const;

  /// Signed potential per unit coupling: -shape for wells, +shape for the
  /// harmonic family.
  double unitValue(double r) const;

  /// Potential value at distance r with the stored depth.
  double value(double r) const { return depth * unitValue(r); }

  bool isWell() const { return family != PotentialFamily::Harmonic; }

  /// Constant C such that shape(s) <= C exp(-s) for the attractive families.
  double exponentialBoundConstant() const;

  /// Distance beyond which |shape| is below ~1e-13 and the pair is free.
  double cutoffRadius() const;
};

struct MomentIntegrals {
  double gamma = 0.0;   // two-body weighted L^2 moments
  double gamma0 = 0.0;  // three-body L^2 / weighted L^1 moments
};

MomentIntegrals moment_integrals(const PairPotential& p);

struct SystemSpec {
  MassConfig masses;
  PairPotential v12, v13, v23;
  double lambda = 1.0;
  double delta = kDefaultDelta;
};

struct AdmissibilityReport {
  bool momentsFinite = false;
  bool v12Nonpositive = false;
  bool v12ExponentialBound = false;
  bool deltaInRange = false;
  bool v12Critical = false;
  bool v13Subcritical = false;
  bool v23Subcritical = false;
  bool wellFamilies = false;
  MomentIntegrals moments12, moments13, moments23;
  double v12CriticalDepth = 0.0;
  double v13CriticalDepth = 0.0;
  double v23CriticalDepth = 0.0;
  std::string notes;

  bool r1() const { return momentsFinite && v12Nonpositive && v12ExponentialBound && deltaInRange && wellFamilies; }
  bool r3() const { return v12Critical && v13Subcritical && v23Subcritical; }
  bool ok() const { return r1() && r3(); }
};

struct AdmissibilityOptions {
  double criticalRelTol = 1e-6;
  double subcriticalMargin = 1e-3;
};

AdmissibilityReport admissibility_check(const SystemSpec& spec, const AdmissibilityOptions& opts = {});

}  // namespace tlab
