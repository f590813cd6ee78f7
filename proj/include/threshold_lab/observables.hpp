#pragma once

#include <functional>
#include <vector>

#include "threshold_lab/threebody.hpp"

namespace tlab::observables {

using threebody::Grid3;
using threebody::WaveFunction3;

/// ψ(ρ, θ, u) at tensor nodes, flat index ir + nRho (it + nTheta k).
struct HypersphericalSamples {
  std::vector<double> rho, rhoWeights;      // log-spaced, trapezoid weights in dρ
  std::vector<double> theta, thetaWeights;  // Gauss nodes inside (0, π/2)
  std::vector<double> u, uWeights;          // the grid's angular nodes
  std::vector<double> values;
  std::size_t index(int ir, int it, int k) const {
    return static_cast<std::size_t>(ir) + rho.size() * (static_cast<std::size_t>(it) + theta.size() * k);
  }
};

struct ResampleOptions {
  int nRho = 400;
  int nTheta = 48;
};

/// Bilinear interpolation of ψ = Φ / (r1 r2) onto (ρ cosθ, ρ sinθ), ρ on
/// [first radial node, rMax].
HypersphericalSamples hyperspherical_resample(const WaveFunction3& psi, const ResampleOptions& opts = {});

/// ψ at one point of the (r1, r2) plane for grid angular node k.
double interpolate_psi(const WaveFunction3& psi, double r1, double r2, int k);

struct AngularDistribution {
  std::vector<double> thetaNodes, thetaWeights;
  std::vector<double> uNodes, uWeights;
  std::vector<double> values;  // D(θ, u), index it + nTheta k
  double normalization = 0.0;  // 8π² ∬ D dθ du
  double at(int it, int k) const { return values[static_cast<std::size_t>(it) + thetaNodes.size() * k]; }
};

/// D(θ, u) = cos²θ sin²θ ∫ ρ⁵ |ψ|² dρ.
AngularDistribution angular_distribution(const WaveFunction3& psi, const ResampleOptions& opts = {});
AngularDistribution angular_distribution(const HypersphericalSamples& samples);

/// sin²θ / (4π³) on the same nodes.
AngularDistribution universal_distribution(const AngularDistribution& like);

/// 8π² ∬ |D - sin²θ/(4π³)| dθ du.
double l1_distance_to_universal(const AngularDistribution& d);

/// Probability inside ρ <= R.
double spreading_diagnostic(const WaveFunction3& psi, double R);

/// min over phase of ‖ψ - e^{iφ} Θ_n‖: overlap on the grid, ‖Θ_n‖ from
/// universal::theta_norm (ψ vanishes outside the box).
double theorem2_distance(const WaveFunction3& psi, double k);

/// max over θ of (max_u D - min_u D) / (max_u D + ε).
double u_flatness(const AngularDistribution& d);

/// Samples a function ψ(r1, r2, u) on the grid as Φ = r1 r2 ψ.
WaveFunction3 wavefunction_from_function(const Grid3& grid, const std::function<double(double, double, double)>& psi);

/// Θ_n on the grid (Jacobi form), unnormalized.
WaveFunction3 theta_n_on_grid(const Grid3& grid, double k);

}  // namespace tlab::observables
