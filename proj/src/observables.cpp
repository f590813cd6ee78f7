#include "threshold_lab/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "threshold_lab/quadrature.hpp"
#include "threshold_lab/universal.hpp"

namespace tlab::observables {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEightPiSq = 8.0 * kPi * kPi;

// Position of r among nodes padded with r = 0 (ψ clamped) and r = rMax (ψ = 0).
struct Bracket {
  int lo;  // -1: below the first node, n - 1: between the last node and the wall
  double t;
};

Bracket locate(const std::vector<double>& nodes, double rMax, double r) {
  const int n = static_cast<int>(nodes.size());
  if (r <= nodes.front()) return {-1, 0.0};
  if (r >= rMax) return {n - 1, 1.0};
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), r);
  const int hi = static_cast<int>(it - nodes.begin());
  if (hi == n) return {n - 1, (r - nodes[n - 1]) / (rMax - nodes[n - 1])};
  const int lo = hi - 1;
  return {lo, (r - nodes[lo]) / (nodes[hi] - nodes[lo])};
}

}  // namespace

double interpolate_psi(const WaveFunction3& psi, double r1, double r2, int k) {
  const Grid3& g = psi.grid;
  const Bracket b1 = locate(g.r1Nodes, g.rMax, r1);
  const Bracket b2 = locate(g.r2Nodes, g.rMax, r2);
  auto value = [&](int i, int j) {
    if (i >= g.N1 || j >= g.N2) return 0.0;  // wall
    i = std::max(i, 0);
    j = std::max(j, 0);
    return psi.values[g.index(i, j, k)] / (g.r1Nodes[i] * g.r2Nodes[j]);
  };
  const int i0 = b1.lo, j0 = b2.lo;
  const double t = b1.t, s = b2.t;
  return (1 - t) * (1 - s) * value(i0, j0) + t * (1 - s) * value(i0 + 1, j0) + (1 - t) * s * value(i0, j0 + 1) +
         t * s * value(i0 + 1, j0 + 1);
}

HypersphericalSamples hyperspherical_resample(const WaveFunction3& psi, const ResampleOptions& opts) {
  const Grid3& g = psi.grid;
  if (psi.values.size() != g.size()) throw ConfigError("hyperspherical_resample: grid mismatch");
  if (opts.nRho < 2 || opts.nTheta < 1) throw ConfigError("hyperspherical_resample: too few nodes");
  HypersphericalSamples out;
  const double lo = std::log(std::min(g.r1Nodes.front(), g.r2Nodes.front()));
  const double hi = std::log(g.rMax);
  const double step = (hi - lo) / (opts.nRho - 1);
  for (int i = 0; i < opts.nRho; ++i) {
    const double rho = std::exp(lo + step * i);
    out.rho.push_back(rho);
    // trapezoid in ln ρ: dρ = ρ d(ln ρ)
    out.rhoWeights.push_back(rho * step * ((i == 0 || i == opts.nRho - 1) ? 0.5 : 1.0));
  }
  const quad::GaussRule rule = quad::gauss_legendre(opts.nTheta, 0.0, 0.5 * kPi);
  out.theta = rule.nodes;
  out.thetaWeights = rule.weights;
  out.u = g.uNodes;
  out.uWeights = g.uWeights;
  out.values.resize(out.rho.size() * out.theta.size() * out.u.size());
  for (int k = 0; k < g.Nu; ++k)
    for (int it = 0; it < opts.nTheta; ++it) {
      const double c = std::cos(out.theta[it]), s = std::sin(out.theta[it]);
      for (int ir = 0; ir < opts.nRho; ++ir)
        out.values[out.index(ir, it, k)] = interpolate_psi(psi, out.rho[ir] * c, out.rho[ir] * s, k);
    }
  return out;
}

AngularDistribution angular_distribution(const HypersphericalSamples& h) {
  AngularDistribution d;
  d.thetaNodes = h.theta;
  d.thetaWeights = h.thetaWeights;
  d.uNodes = h.u;
  d.uWeights = h.uWeights;
  const int nr = static_cast<int>(h.rho.size()), nt = static_cast<int>(h.theta.size()),
            nu = static_cast<int>(h.u.size());
  d.values.resize(static_cast<std::size_t>(nt) * nu);
  double total = 0.0;
  for (int k = 0; k < nu; ++k)
    for (int it = 0; it < nt; ++it) {
      double radial = 0.0;
      for (int ir = 0; ir < nr; ++ir) {
        const double rho = h.rho[ir];
        const double v = h.values[h.index(ir, it, k)];
        radial += h.rhoWeights[ir] * std::pow(rho, 5) * v * v;
      }
      const double c = std::cos(h.theta[it]), s = std::sin(h.theta[it]);
      const double D = c * c * s * s * radial;
      d.values[static_cast<std::size_t>(it) + static_cast<std::size_t>(nt) * k] = D;
      total += h.thetaWeights[it] * h.uWeights[k] * D;
    }
  d.normalization = kEightPiSq * total;
  return d;
}

AngularDistribution angular_distribution(const WaveFunction3& psi, const ResampleOptions& opts) {
  return angular_distribution(hyperspherical_resample(psi, opts));
}

AngularDistribution universal_distribution(const AngularDistribution& like) {
  AngularDistribution d = like;
  const std::size_t nt = like.thetaNodes.size();
  double total = 0.0;
  for (std::size_t k = 0; k < like.uNodes.size(); ++k)
    for (std::size_t it = 0; it < nt; ++it) {
      const double v = universal::universal_limit(like.thetaNodes[it]);
      d.values[it + nt * k] = v;
      total += like.thetaWeights[it] * like.uWeights[k] * v;
    }
  d.normalization = kEightPiSq * total;
  return d;
}

double l1_distance_to_universal(const AngularDistribution& d) {
  const std::size_t nt = d.thetaNodes.size();
  double total = 0.0;
  for (std::size_t k = 0; k < d.uNodes.size(); ++k)
    for (std::size_t it = 0; it < nt; ++it) {
      const double diff = d.values[it + nt * k] - universal::universal_limit(d.thetaNodes[it]);
      total += d.thetaWeights[it] * d.uWeights[k] * std::abs(diff);
    }
  return kEightPiSq * total;
}

double spreading_diagnostic(const WaveFunction3& psi, double R) {
  const Grid3& g = psi.grid;
  if (psi.values.size() != g.size()) throw ConfigError("spreading_diagnostic: grid mismatch");
  double inside = 0.0;
  for (int k = 0; k < g.Nu; ++k)
    for (int j = 0; j < g.N2; ++j)
      for (int i = 0; i < g.N1; ++i) {
        if (std::hypot(g.r1Nodes[i], g.r2Nodes[j]) > R) continue;
        const double v = psi.values[g.index(i, j, k)];
        inside += g.uWeights[k] * g.r2Weights[j] * g.r1Weights[i] * v * v;
      }
  const double total = threebody::inner_product(g, psi.values, psi.values);
  return total > 0.0 ? kEightPiSq * inside / total : 0.0;
}

WaveFunction3 wavefunction_from_function(const Grid3& grid, const std::function<double(double, double, double)>& psi) {
  WaveFunction3 out;
  out.grid = grid;
  out.values.resize(grid.size());
  for (int k = 0; k < grid.Nu; ++k)
    for (int j = 0; j < grid.N2; ++j)
      for (int i = 0; i < grid.N1; ++i) {
        const double r1 = grid.r1Nodes[i], r2 = grid.r2Nodes[j];
        out.values[grid.index(i, j, k)] = r1 * r2 * psi(r1, r2, grid.uNodes[k]);
      }
  out.norm = threebody::norm_of(grid, out.values);
  return out;
}

WaveFunction3 theta_n_on_grid(const Grid3& grid, double k) {
  return wavefunction_from_function(grid, [k](double r1, double r2, double) {
    return universal::theta_n_jacobi(r1, r2, k);
  });
}

double theorem2_distance(const WaveFunction3& psi, double k) {
  const Grid3& g = psi.grid;
  if (psi.values.size() != g.size()) throw ConfigError("theorem2_distance: grid mismatch");
  const WaveFunction3 theta = theta_n_on_grid(g, k);
  const double psiNormSq = threebody::inner_product(g, psi.values, psi.values);
  const double overlap = threebody::inner_product(g, psi.values, theta.values);
  const double thetaNorm = universal::theta_norm(k);
  const double d2 = psiNormSq + thetaNorm * thetaNorm - 2.0 * std::abs(overlap);
  return std::sqrt(std::max(0.0, d2));
}

double u_flatness(const AngularDistribution& d) {
  const std::size_t nt = d.thetaNodes.size(), nu = d.uNodes.size();
  double worst = 0.0;
  for (std::size_t it = 0; it < nt; ++it) {
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t k = 0; k < nu; ++k) {
      lo = std::min(lo, d.values[it + nt * k]);
      hi = std::max(hi, d.values[it + nt * k]);
    }
    worst = std::max(worst, (hi - lo) / (hi + 1e-300));
  }
  return worst;
}

}  // namespace tlab::observables
