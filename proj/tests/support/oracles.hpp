#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "threshold_lab/model.hpp"
#include "threshold_lab/quadrature.hpp"

namespace oracle {

/// Critical coupling of -u'' + g v u from the zero-energy s-wave
/// Birman-Schwinger kernel sqrt|v(r)| min(r, r') sqrt|v(r')| on a
/// Gauss-Legendre grid over [0, rCut].
inline double birman_schwinger_critical(const tlab::PairPotential& p, int n, double rCut) {
  const tlab::quad::GaussRule rule = tlab::quad::gauss_legendre(n, 0.0, rCut);
  Eigen::MatrixXd K(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double ri = rule.nodes[i], rj = rule.nodes[j];
      K(i, j) = std::sqrt(rule.weights[i] * p.shape(ri / p.range)) * std::min(ri, rj) *
                std::sqrt(rule.weights[j] * p.shape(rj / p.range));
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K, Eigen::EigenvaluesOnly);
  return 1.0 / es.eigenvalues().maxCoeff();
}

}  // namespace oracle
