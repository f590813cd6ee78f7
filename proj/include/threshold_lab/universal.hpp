#pragma once

#include <complex>

#include "threshold_lab/model.hpp"

namespace tlab::universal {

/// Limiting three-body profile at momentum k in hyperspherical variables.
/// rho = sqrt(|x|^2 + |y|^2), theta = arctan(|y| / |x|); unit phase.
struct UniversalProfile {
  double k = 0.0;
  double normalizationFactor = 0.0;  // 1 / (2 π^{3/2} |ln k|^{1/2})

  explicit UniversalProfile(double momentum);
  double operator()(double rho, double theta) const;
};

double theta_n(double rho, double theta, double k);

/// The same profile written in the Jacobi radii |x|, |y|.
double theta_n_jacobi(double xMag, double yMag, double k);

/// k -> 0 shape of the profile without normalization: sinθ / (ρ^3 cosθ sinθ).
double heuristic_profile(double rho, double theta);

/// ||Θ_n||, from the squared norm (4 / (π |ln k|)) ∫_1^∞ dρ/ρ ∫_0^{π/2} e^{-2kρcosθ} sin²(θ + kρ sinθ) dθ.
double theta_norm(double k);

/// Hyperradial integral ∫_1^∞ e^{-2kρcosθ} sin²(θ + kρ sinθ) / ρ dρ, integrated in ρ.
double radial_integral(double theta, double k);

/// Same integral in closed form:
/// ½ [E1(2k cosθ) - Re(e^{2iθ} E1(2k e^{-iθ}))].
double radial_integral_closed(double theta, double k);

/// Exponential integral E1 for |arg z| < π.
std::complex<double> expint_e1(std::complex<double> z);

/// Angular distribution of Θ_n: radial_integral / (4 π^3 |ln k|).
double d_theta_n(double theta, double k);

/// ∫_{k sinθ}^∞ e^{-2 t cotθ} sin²(θ + t) / t dt, integrated in t.
double t_integral(double theta, double k);

/// sin²θ / (4 π^3).
double universal_limit(double theta);

struct PolarSampleSet {
  double rhoMin = 1.0;
  double rhoMax = 10.0;
  int nRho = 40;
  int nTheta = 40;
  double step = 1e-3;
};

struct PdeCheck {
  double residual = 0.0;            // max |ψ_ρ/ρ + ψ_ρρ + ψ_θθ/ρ²|
  double boundaryDerivative = 0.0;  // max |∂ψ/∂|x|| on θ = π/2
  double boundaryValue = 0.0;       // max |ψ| on θ = 0
  bool boundaryOk = false;
};

/// Checks ρ^{-n} sin(nθ) against the polar Laplace equation and the
/// resonant-pair boundary conditions.
PdeCheck heuristic_pde_residual(int n, const PolarSampleSet& grid = {});

}  // namespace tlab::universal
