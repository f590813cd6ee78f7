#include "threshold_lab/threebody.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include <Eigen/Dense>

#include "threshold_lab/parallel.hpp"
#include "threshold_lab/quadrature.hpp"
#include "threshold_lab/twobody.hpp"

namespace tlab::threebody {
namespace {

constexpr double kEightPiSq = 8.0 * std::numbers::pi * std::numbers::pi;

using Eigen::Map;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void radial_axis(double rMax, int n, double stretch, std::vector<double>& nodes, std::vector<double>& weights) {
  const double s = std::log(stretch) * (n + 1) / n;
  auto map = [&](double xi) { return std::abs(s) < 1e-12 ? rMax * xi : rMax * std::expm1(s * xi) / std::expm1(s); };
  std::vector<double> full(n + 2);
  for (int i = 0; i <= n + 1; ++i) full[i] = map(static_cast<double>(i) / (n + 1));
  full[0] = 0.0;
  full[n + 1] = rMax;
  nodes.assign(full.begin() + 1, full.end() - 1);
  weights.resize(n);
  for (int i = 1; i <= n; ++i) weights[i - 1] = 0.5 * (full[i + 1] - full[i - 1]);
}

// Scaled -d²/dr² with Dirichlet ends: K = W^{-1/2} (flux form) W^{-1/2}.
void scaled_laplacian(const std::vector<double>& nodes, double rMax, const std::vector<double>& w,
                      std::vector<double>& diag, std::vector<double>& off) {
  const int n = static_cast<int>(nodes.size());
  std::vector<double> h(n + 1);
  h[0] = nodes[0];
  for (int i = 1; i < n; ++i) h[i] = nodes[i] - nodes[i - 1];
  h[n] = rMax - nodes[n - 1];
  diag.resize(n);
  off.resize(n - 1);
  for (int i = 0; i < n; ++i) diag[i] = (1.0 / h[i] + 1.0 / h[i + 1]) / w[i];
  for (int i = 0; i + 1 < n; ++i) off[i] = -1.0 / (h[i + 1] * std::sqrt(w[i] * w[i + 1]));
}

double max_range(const SystemSpec& spec) {
  return std::max({spec.v12.range, spec.v13.range, spec.v23.range});
}

void orthogonalize(VectorXd& v, VectorXd* av, const VectorXd& basis, const VectorXd* aBasis) {
  const double c = basis.dot(v);
  v -= c * basis;
  if (av && aBasis) *av -= c * *aBasis;
}

}  // namespace

bool Grid3::same_shape(const Grid3& o) const {
  return N1 == o.N1 && N2 == o.N2 && Nu == o.Nu && rMax == o.rMax && r1Nodes == o.r1Nodes && r2Nodes == o.r2Nodes &&
         uNodes == o.uNodes;
}

double default_stretch(double rMax, int n, double range) {
  const double ratio = rMax / (5.0 * range);
  if (ratio <= 2.0) return 1.0;
  const double s = 2.0 * std::log(ratio - 1.0);
  return std::exp(s * n / (n + 1.0));
}

Grid3 build_grid(double rMax, int N1, int N2, int Nu, double stretch) {
  if (!(rMax > 0.0) || !std::isfinite(rMax)) throw ConfigError("build_grid: rMax must be positive");
  if (N1 < 8 || N2 < 8 || Nu < 8) throw ConfigError("build_grid: counts must be at least 8");
  Grid3 g;
  g.N1 = N1;
  g.N2 = N2;
  g.Nu = Nu;
  g.rMax = rMax;
  g.stretch = stretch > 0.0 ? stretch : default_stretch(rMax, std::max(N1, N2));
  radial_axis(rMax, N1, g.stretch, g.r1Nodes, g.r1Weights);
  radial_axis(rMax, N2, g.stretch, g.r2Nodes, g.r2Weights);
  const quad::GaussRule rule = quad::gauss_legendre(Nu);
  g.uNodes = rule.nodes;
  g.uWeights = rule.weights;
  return g;
}

double inner_product(const Grid3& g, std::span<const double> a, std::span<const double> b) {
  if (a.size() != g.size() || b.size() != g.size()) throw ConfigError("inner_product: grid mismatch");
  double total = 0.0;
  for (int k = 0; k < g.Nu; ++k) {
    for (int j = 0; j < g.N2; ++j) {
      double row = 0.0;
      const std::size_t base = g.index(0, j, k);
      for (int i = 0; i < g.N1; ++i) row += g.r1Weights[i] * a[base + i] * b[base + i];
      total += g.uWeights[k] * g.r2Weights[j] * row;
    }
  }
  return kEightPiSq * total;
}

double norm_of(const Grid3& g, std::span<const double> phi) { return std::sqrt(inner_product(g, phi, phi)); }

double boundary_mass(const WaveFunction3& psi, double fraction) {
  const Grid3& g = psi.grid;
  const double edge = fraction * g.rMax;
  double outer = 0.0;
  for (int k = 0; k < g.Nu; ++k) {
    for (int j = 0; j < g.N2; ++j) {
      for (int i = 0; i < g.N1; ++i) {
        if (std::max(g.r1Nodes[i], g.r2Nodes[j]) < edge) continue;
        const double v = psi.values[g.index(i, j, k)];
        outer += g.uWeights[k] * g.r2Weights[j] * g.r1Weights[i] * v * v;
      }
    }
  }
  const double total = inner_product(g, psi.values, psi.values);
  return total > 0.0 ? kEightPiSq * outer / total : 0.0;
}

PotentialTables system_potentials(const Grid3& g, const SystemSpec& spec) {
  const JacobiFrame frame = build_jacobi_frame(spec.masses);
  PotentialTables t;
  t.sepR1.resize(g.N1);
  t.sepR2.assign(g.N2, 0.0);
  t.coupled.resize(g.size());
  for (int i = 0; i < g.N1; ++i) t.sepR1[i] = spec.v12.value(frame.alpha * g.r1Nodes[i]);
  for (int k = 0; k < g.Nu; ++k) {
    for (int j = 0; j < g.N2; ++j) {
      for (int i = 0; i < g.N1; ++i) {
        const Separations d = separation_distances(g.r1Nodes[i], g.r2Nodes[j], g.uNodes[k], frame);
        t.coupled[g.index(i, j, k)] = spec.v13.value(d.d13) + spec.v23.value(d.d23);
      }
    }
  }
  return t;
}

PotentialTables oscillator_potentials(const Grid3& g) {
  PotentialTables t;
  for (double r : g.r1Nodes) t.sepR1.push_back(r * r);
  for (double r : g.r2Nodes) t.sepR2.push_back(r * r);
  t.coupled.assign(g.size(), 0.0);
  return t;
}

PotentialTables zero_potentials(const Grid3& g) {
  return {std::vector<double>(g.N1, 0.0), std::vector<double>(g.N2, 0.0), std::vector<double>(g.size(), 0.0)};
}

Hamiltonian::Hamiltonian(Grid3 grid, PotentialTables potentials, double lambda)
    : grid_(std::move(grid)), pots_(std::move(potentials)), lambda_(lambda) {
  const Grid3& g = grid_;
  if (pots_.sepR1.size() != static_cast<std::size_t>(g.N1) || pots_.sepR2.size() != static_cast<std::size_t>(g.N2) ||
      pots_.coupled.size() != g.size()) {
    throw ConfigError("Hamiltonian: potential tables do not match the grid");
  }
  sqrtW_.resize(g.size());
  for (int k = 0; k < g.Nu; ++k)
    for (int j = 0; j < g.N2; ++j)
      for (int i = 0; i < g.N1; ++i)
        sqrtW_[g.index(i, j, k)] = std::sqrt(kEightPiSq * g.r1Weights[i] * g.r2Weights[j] * g.uWeights[k]);

  scaled_laplacian(g.r1Nodes, g.rMax, g.r1Weights, d1_, o1_);
  scaled_laplacian(g.r2Nodes, g.rMax, g.r2Weights, d2_, o2_);

  q_.resize(static_cast<std::size_t>(g.Nu) * g.Nu);
  for (int k = 0; k < g.Nu; ++k) {
    const std::vector<double> P = quad::legendre_values(g.Nu - 1, g.uNodes[k]);
    for (int l = 0; l < g.Nu; ++l) q_[k + g.Nu * l] = std::sqrt(g.uWeights[k] * (2.0 * l + 1.0) / 2.0) * P[l];
  }
  for (double r : g.r1Nodes) invR1sq_.push_back(1.0 / (r * r));
  for (double r : g.r2Nodes) invR2sq_.push_back(1.0 / (r * r));
}

void Hamiltonian::apply_scaled(std::span<const double> in, std::span<double> out) const {
  const Grid3& g = grid_;
  const std::size_t n = g.size();
  if (in.size() != n || out.size() != n) throw ConfigError("apply_hamiltonian: grid mismatch");
  const int N1 = g.N1, N2 = g.N2, Nu = g.Nu;
  const double lam = lambda_;

  parallel_for(static_cast<std::size_t>(N2) * Nu, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t jk = lo; jk < hi; ++jk) {
      const int j = static_cast<int>(jk % N2);
      const std::size_t base = jk * N1;
      const double* x = in.data() + base;
      double* y = out.data() + base;
      const double* c = pots_.coupled.data() + base;
      const double diagJ = d2_[j] + pots_.sepR2[j];
      const double* below = j > 0 ? x - N1 : nullptr;
      const double* above = j + 1 < N2 ? x + N1 : nullptr;
      const double oBelow = j > 0 ? o2_[j - 1] : 0.0;
      const double oAbove = j + 1 < N2 ? o2_[j] : 0.0;
      for (int i = 0; i < N1; ++i) {
        double v = (d1_[i] + pots_.sepR1[i] + diagJ + lam * c[i]) * x[i];
        if (i > 0) v += o1_[i - 1] * x[i - 1];
        if (i + 1 < N1) v += o1_[i] * x[i + 1];
        if (below) v += oBelow * below[i];
        if (above) v += oAbove * above[i];
        y[i] = v;
      }
    }
  });

  // angular part: Legendre coefficients times l(l+1)(1/r1² + 1/r2²)
  const std::size_t slab = static_cast<std::size_t>(N1) * N2;
  Map<const MatrixXd> X(in.data(), slab, Nu);
  Map<const MatrixXd> Q(q_.data(), Nu, Nu);
  MatrixXd C = X * Q.rightCols(Nu - 1);
  for (int l = 1; l < Nu; ++l) {
    const double ll = l * (l + 1.0);
    double* col = C.col(l - 1).data();
    for (int j = 0; j < N2; ++j)
      for (int i = 0; i < N1; ++i) col[i + static_cast<std::size_t>(N1) * j] *= ll * (invR1sq_[i] + invR2sq_[j]);
  }
  Map<MatrixXd> Y(out.data(), slab, Nu);
  Y.noalias() += C * Q.rightCols(Nu - 1).transpose();
}

std::vector<double> Hamiltonian::apply(std::span<const double> phi) const {
  std::vector<double> in = to_scaled(phi);
  std::vector<double> out(in.size());
  apply_scaled(in, out);
  return from_scaled(out);
}

std::vector<double> Hamiltonian::to_scaled(std::span<const double> phi) const {
  if (phi.size() != sqrtW_.size()) throw ConfigError("wavefunction does not match the grid");
  std::vector<double> out(phi.size());
  for (std::size_t m = 0; m < phi.size(); ++m) out[m] = sqrtW_[m] * phi[m];
  return out;
}

std::vector<double> Hamiltonian::from_scaled(std::span<const double> psi) const {
  if (psi.size() != sqrtW_.size()) throw ConfigError("wavefunction does not match the grid");
  std::vector<double> out(psi.size());
  for (std::size_t m = 0; m < psi.size(); ++m) out[m] = psi[m] / sqrtW_[m];
  return out;
}

std::vector<double> Hamiltonian::diagonal_scaled() const {
  const Grid3& g = grid_;
  std::vector<double> angular(g.Nu, 0.0);
  for (int k = 0; k < g.Nu; ++k)
    for (int l = 1; l < g.Nu; ++l) angular[k] += l * (l + 1.0) * q_[k + g.Nu * l] * q_[k + g.Nu * l];
  std::vector<double> d(g.size());
  for (int k = 0; k < g.Nu; ++k)
    for (int j = 0; j < g.N2; ++j)
      for (int i = 0; i < g.N1; ++i) {
        const std::size_t m = g.index(i, j, k);
        d[m] = d1_[i] + d2_[j] + pots_.sepR1[i] + pots_.sepR2[j] + lambda_ * pots_.coupled[m] +
               angular[k] * (invR1sq_[i] + invR2sq_[j]);
      }
  return d;
}

WaveFunction3 apply_hamiltonian(const WaveFunction3& phi, const SystemSpec& spec, double lambda) {
  if (phi.values.size() != phi.grid.size()) throw ConfigError("apply_hamiltonian: grid mismatch");
  const Hamiltonian h(phi.grid, system_potentials(phi.grid, spec), lambda);
  WaveFunction3 out = phi;
  out.values = h.apply(phi.values);
  out.norm = norm_of(out.grid, out.values);
  out.lambda = lambda;
  return out;
}

SeparablePreconditioner::SeparablePreconditioner(const Hamiltonian& h)
    : N1_(h.grid().N1), N2_(h.grid().N2), Nu_(h.grid().Nu), q_(h.legendre_matrix()) {
  v1_.resize(Nu_);
  v2_.resize(Nu_);
  e1_.resize(Nu_);
  e2_.resize(Nu_);
  auto decompose = [](const std::vector<double>& d, const std::vector<double>& off, const std::vector<double>& pot,
                      const std::vector<double>& invSq, double ll, std::vector<double>& vecs, std::vector<double>& vals) {
    const int n = static_cast<int>(d.size());
    VectorXd diag(n), sub(n - 1);
    for (int i = 0; i < n; ++i) diag[i] = d[i] + pot[i] + ll * invSq[i];
    for (int i = 0; i + 1 < n; ++i) sub[i] = off[i];
    Eigen::SelfAdjointEigenSolver<MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (es.info() != Eigen::Success) throw ConvergenceError("preconditioner: tridiagonal eigensolve failed");
    vals.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
    vecs.assign(es.eigenvectors().data(), es.eigenvectors().data() + static_cast<std::size_t>(n) * n);
  };
  parallel_for(static_cast<std::size_t>(Nu_), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t l = lo; l < hi; ++l) {
      const double ll = l * (l + 1.0);
      decompose(h.radial1_diag(), h.radial1_off(), h.potentials().sepR1, h.inv_r1_sq(), ll, v1_[l], e1_[l]);
      decompose(h.radial2_diag(), h.radial2_off(), h.potentials().sepR2, h.inv_r2_sq(), ll, v2_[l], e2_[l]);
    }
  });
}

void SeparablePreconditioner::apply(std::span<const double> in, std::span<double> out, double sigma) const {
  const std::size_t slab = static_cast<std::size_t>(N1_) * N2_;
  Map<const MatrixXd> R(in.data(), slab, Nu_);
  Map<const MatrixXd> Q(q_.data(), Nu_, Nu_);
  MatrixXd C = R * Q;
  parallel_for(static_cast<std::size_t>(Nu_), [&](std::size_t lo, std::size_t hi) {
    for (std::size_t l = lo; l < hi; ++l) {
      Map<MatrixXd> S(C.col(static_cast<Eigen::Index>(l)).data(), N1_, N2_);
      Map<const MatrixXd> V1(v1_[l].data(), N1_, N1_);
      Map<const MatrixXd> V2(v2_[l].data(), N2_, N2_);
      MatrixXd Y = V1.transpose() * S * V2;
      for (int b = 0; b < N2_; ++b)
        for (int a = 0; a < N1_; ++a) Y(a, b) /= e1_[l][a] + e2_[l][b] + sigma;
      S.noalias() = V1 * Y * V2.transpose();
    }
  });
  Map<MatrixXd> O(out.data(), slab, Nu_);
  O.noalias() = C * Q.transpose();
}

EigenResult lowest_eigenpair(const Hamiltonian& h, const EigenOptions& opts, const std::vector<double>* guessScaled) {
  const Grid3& g = h.grid();
  const auto n = static_cast<Eigen::Index>(g.size());
  auto matvec = [&](const VectorXd& v, VectorXd& out) {
    out.resize(n);
    h.apply_scaled(std::span<const double>(v.data(), v.size()), std::span<double>(out.data(), out.size()));
  };

  VectorXd x(n);
  if (guessScaled) {
    if (static_cast<Eigen::Index>(guessScaled->size()) != n) throw ConfigError("eigensolver: guess does not match grid");
    x = Map<const VectorXd>(guessScaled->data(), n);
  } else {
    std::vector<double> phi(g.size());
    const double a = 4.0 / g.rMax;
    for (int k = 0; k < g.Nu; ++k)
      for (int j = 0; j < g.N2; ++j)
        for (int i = 0; i < g.N1; ++i) {
          const double r1 = g.r1Nodes[i], r2 = g.r2Nodes[j];
          phi[g.index(i, j, k)] = r1 * r2 * std::exp(-a * (r1 + r2)) * (1.0 - r1 / g.rMax) * (1.0 - r2 / g.rMax);
        }
    const std::vector<double> s = h.to_scaled(phi);
    x = Map<const VectorXd>(s.data(), n);
  }
  if (!(x.norm() > 0.0)) throw ConfigError("eigensolver: zero initial vector");
  x.normalize();

  std::unique_ptr<SeparablePreconditioner> sep;
  VectorXd diag;
  if (opts.preconditioner == PreconditionerKind::Separable) sep = std::make_unique<SeparablePreconditioner>(h);
  if (opts.preconditioner == PreconditionerKind::Diagonal) {
    const std::vector<double> d = h.diagonal_scaled();
    diag = Map<const VectorXd>(d.data(), n);
  }

  VectorXd Ax, w, Aw, p, Ap, r;
  matvec(x, Ax);
  double theta = x.dot(Ax);
  bool hasP = false;
  EigenResult out;

  for (int it = 1; it <= opts.maxIterations; ++it) {
    out.iterations = it;
    r = Ax - theta * x;
    double rn = r.norm();
    if (rn <= opts.tolerance * std::abs(theta)) {
      matvec(x, Ax);
      theta = x.dot(Ax);
      r = Ax - theta * x;
      rn = r.norm();
      if (rn <= opts.tolerance * std::abs(theta)) {
        out.converged = true;
        out.residual = rn / std::abs(theta);
        break;
      }
    }
    out.residual = rn / std::max(std::abs(theta), std::numeric_limits<double>::min());

    const double sigma = std::max(-theta, 0.0) + 1e-10;
    w.resize(n);
    switch (opts.preconditioner) {
      case PreconditionerKind::Separable:
        sep->apply(std::span<const double>(r.data(), r.size()), std::span<double>(w.data(), w.size()), sigma);
        break;
      case PreconditionerKind::Diagonal:
        for (Eigen::Index m = 0; m < n; ++m) w[m] = r[m] / std::max(diag[m] + sigma, 1e-12);
        break;
      case PreconditionerKind::None:
        w = r;
        break;
    }
    for (int pass = 0; pass < 2; ++pass) {
      orthogonalize(w, nullptr, x, nullptr);
      if (hasP) {
        const double pn = p.norm();
        if (pn > 0.0) {
          const double c = p.dot(w) / (pn * pn);
          w -= c * p;
        }
      }
    }
    const double wn = w.norm();
    if (!(wn > 0.0) || !std::isfinite(wn)) break;
    w /= wn;
    matvec(w, Aw);

    int m = 2;
    if (hasP) {
      for (int pass = 0; pass < 2; ++pass) {
        orthogonalize(p, &Ap, x, &Ax);
        orthogonalize(p, &Ap, w, &Aw);
      }
      const double pn = p.norm();
      if (pn > 1e-12) {
        p /= pn;
        Ap /= pn;
        m = 3;
      } else {
        hasP = false;
      }
    }

    const VectorXd* basis[3] = {&x, &w, &p};
    const VectorXd* images[3] = {&Ax, &Aw, &Ap};
    Eigen::Matrix3d G = Eigen::Matrix3d::Zero();
    for (int a = 0; a < m; ++a)
      for (int b = a; b < m; ++b) {
        const double v = 0.5 * (basis[a]->dot(*images[b]) + basis[b]->dot(*images[a]));
        G(a, b) = v;
        G(b, a) = v;
      }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(G.topLeftCorner(m, m));
    const VectorXd c = es.eigenvectors().col(0);
    theta = es.eigenvalues()[0];

    VectorXd pNew = c[1] * w;
    VectorXd ApNew = c[1] * Aw;
    if (m == 3) {
      pNew += c[2] * p;
      ApNew += c[2] * Ap;
    }
    x = c[0] * x + pNew;
    Ax = c[0] * Ax + ApNew;
    p.swap(pNew);
    Ap.swap(ApNew);
    hasP = true;
    const double xn = x.norm();
    x /= xn;
    Ax /= xn;
    if (it % 50 == 0) matvec(x, Ax);
    theta = x.dot(Ax);
  }

  out.energy = theta;
  if (x.sum() < 0.0) x = -x;
  out.scaled.assign(x.data(), x.data() + n);
  return out;
}

WaveFunction3 ground_state(const Hamiltonian& h, const EigenOptions& opts, const WaveFunction3* guess) {
  std::vector<double> guessScaled;
  if (guess) {
    if (!guess->grid.same_shape(h.grid())) throw ConfigError("ground_state: guess lives on a different grid");
    guessScaled = h.to_scaled(guess->values);
  }
  const EigenResult res = lowest_eigenpair(h, opts, guess ? &guessScaled : nullptr);
  if (!res.converged) {
    throw ConvergenceError("ground_state: eigensolver did not converge after " + std::to_string(res.iterations) +
                           " iterations (relative residual " + std::to_string(res.residual) + ")");
  }
  WaveFunction3 out;
  out.grid = h.grid();
  out.values = h.from_scaled(res.scaled);
  out.norm = norm_of(out.grid, out.values);
  out.energy = res.energy;
  out.lambda = h.lambda();
  out.residual = res.residual;
  out.iterations = res.iterations;
  out.bound = res.energy < 0.0;
  return out;
}

WaveFunction3 ground_state(const SystemSpec& spec, double lambda, const Grid3& grid, const EigenOptions& opts,
                           const WaveFunction3* guess) {
  const Hamiltonian h(grid, system_potentials(grid, spec), lambda);
  return ground_state(h, opts, guess);
}

double r3_lambda_limit(const SystemSpec& spec) {
  const JacobiFrame frame = build_jacobi_frame(spec.masses);
  double limit = std::numeric_limits<double>::infinity();
  auto pair = [&](const PairPotential& p, double mu) {
    if (p.depth <= 0.0) return;
    const double gc = twobody::pair_critical_depth(p, mu);
    limit = std::min(limit, gc * (1.0 - twobody::kDefaultSubcriticalMargin) / p.depth);
  };
  pair(spec.v13, frame.mu13);
  pair(spec.v23, frame.mu23);
  return limit;
}

bool verify_R3(const SystemSpec& spec, double lambda) {
  const JacobiFrame frame = build_jacobi_frame(spec.masses);
  return twobody::subcriticality_check(spec.v13, lambda, frame.mu13) &&
         twobody::subcriticality_check(spec.v23, lambda, frame.mu23);
}

TuneResult tune_lambda(const SystemSpec& spec, double targetE, const Grid3& grid, const TuneOptions& opts) {
  if (!(targetE < 0.0)) throw ConfigError("tune_lambda: target energy must be negative");
  const double limit = r3_lambda_limit(spec);
  if (!std::isfinite(limit)) throw BracketError("tune_lambda: v13 and v23 vanish, lambda has no effect", 0.0, limit);
  const double lamHi = limit * (1.0 - 1e-9);

  Hamiltonian h(grid, system_potentials(grid, spec), lamHi);
  EigenOptions search = opts.eigen;
  search.tolerance = std::max(opts.searchTolerance, opts.eigen.tolerance);
  TuneResult result;
  auto evaluate = [&](double lam, const std::vector<double>* warm, const EigenOptions& eo) {
    h.set_lambda(lam);
    EigenResult r = lowest_eigenpair(h, eo, warm);
    ++result.evaluations;
    result.iterations += r.iterations;
    if (!r.converged) {
      throw ConvergenceError("tune_lambda: eigensolver did not converge at lambda = " + std::to_string(lam));
    }
    return r;
  };
  auto kappa = [](double e) { return e < 0.0 ? std::sqrt(-e) : -std::sqrt(e); };
  auto close = [&](double e) { return std::abs(e - targetE) < opts.relTolerance * std::abs(targetE); };
  const double kt = std::sqrt(-targetE);

  auto finish = [&](double lam, const EigenResult& found) {
    const EigenResult fin = evaluate(lam, &found.scaled, opts.eigen);
    result.lambda = lam;
    result.state.grid = grid;
    result.state.values = h.from_scaled(fin.scaled);
    result.state.norm = norm_of(grid, result.state.values);
    result.state.energy = fin.energy;
    result.state.lambda = lam;
    result.state.residual = fin.residual;
    result.state.iterations = fin.iterations;
    result.state.bound = fin.energy < 0.0;
    return result;
  };

  EigenResult hi = evaluate(lamHi, nullptr, search);
  if (close(hi.energy)) return finish(lamHi, hi);
  if (hi.energy > targetE) {
    throw BracketError("tune_lambda: target " + std::to_string(targetE) + " not reached inside the R3 window [0, " +
                           std::to_string(limit) + "); E(lambda_max) = " + std::to_string(hi.energy),
                       0.0, limit);
  }
  EigenResult lo = evaluate(0.0, &hi.scaled, search);
  if (close(lo.energy)) return finish(0.0, lo);
  if (lo.energy < targetE) {
    throw BracketError("tune_lambda: already below the target at lambda = 0", 0.0, limit);
  }

  double a = 0.0, b = lamHi;
  double fa = kappa(lo.energy) - kt, fb = kappa(hi.energy) - kt;
  int side = 0;
  while (result.evaluations < opts.maxEvaluations) {
    double c = b - fb * (b - a) / (fb - fa);
    const double margin = 1e-3 * (b - a);
    if (!(c > a + margin && c < b - margin)) c = 0.5 * (a + b);
    const std::vector<double>* warm = (c - a < b - c) ? &lo.scaled : &hi.scaled;
    EigenResult mid = evaluate(c, warm, search);
    if (close(mid.energy)) return finish(c, mid);
    const double fc = kappa(mid.energy) - kt;
    if (fc > 0.0) {
      b = c;
      fb = fc;
      hi = std::move(mid);
      if (side == 1) fa *= 0.5;
      side = 1;
    } else {
      a = c;
      fa = fc;
      lo = std::move(mid);
      if (side == -1) fb *= 0.5;
      side = -1;
    }
  }
  throw ConvergenceError("tune_lambda: no lambda within tolerance after " + std::to_string(result.evaluations) +
                         " evaluations; bracket [" + std::to_string(a) + ", " + std::to_string(b) + "]");
}

Grid3 grid_for_target(const SystemSpec& spec, double targetE, const GridOptions& opts) {
  if (!(targetE < 0.0)) throw ConfigError("grid_for_target: target energy must be negative");
  const double k = std::sqrt(-targetE);
  const double rMax = opts.rMaxFactor / k;
  const int n = std::max(opts.N1, opts.N2);
  const double stretch = opts.stretch > 0.0 ? opts.stretch : default_stretch(rMax, n, max_range(spec));
  return build_grid(rMax, opts.N1, opts.N2, opts.Nu, stretch);
}

std::vector<double> geometric_targets(double e0, int count, double ratio) {
  std::vector<double> out;
  double e = e0;
  for (int j = 0; j < count; ++j, e *= ratio) out.push_back(e);
  return out;
}

ThresholdSequence generate_threshold_sequence(const SystemSpec& spec, const std::vector<double>& eTargets,
                                              const SequenceOptions& opts) {
  if (eTargets.empty()) throw ConfigError("threshold sequence: no targets");
  for (std::size_t j = 0; j < eTargets.size(); ++j) {
    if (!(eTargets[j] < 0.0)) throw ConfigError("threshold sequence: targets must be negative");
    if (j > 0 && !(std::abs(eTargets[j]) < std::abs(eTargets[j - 1]))) {
      throw ConfigError("threshold sequence: target magnitudes must decrease");
    }
  }

  const std::size_t count = eTargets.size();
  std::vector<std::optional<ThresholdEntry>> done(count);
  std::vector<std::string> errors(count);
  auto solve = [&](std::size_t j) {
    try {
      const Grid3 grid = grid_for_target(spec, eTargets[j], opts.grid);
      TuneResult t = tune_lambda(spec, eTargets[j], grid, opts.tune);
      ThresholdEntry e;
      e.target = eTargets[j];
      e.lambda = t.lambda;
      e.energy = t.state.energy;
      e.k = std::sqrt(std::max(0.0, -e.energy));
      e.iterations = t.iterations;
      e.evaluations = t.evaluations;
      e.r3 = verify_R3(spec, t.lambda);
      e.state = std::move(t.state);
      e.boundaryMass = boundary_mass(e.state);
      done[j] = std::move(e);
    } catch (const std::exception& ex) {
      errors[j] = ex.what();
    }
  };

  const int jobs = std::max(1, std::min<int>(opts.jobs, static_cast<int>(count)));
  if (jobs == 1) {
    for (std::size_t j = 0; j < count; ++j) {
      solve(j);
      if (!done[j]) break;
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w) {
      pool.emplace_back([&] {
        SerialScope serial;
        for (std::size_t j = next++; j < count; j = next++) solve(j);
      });
    }
    for (auto& t : pool) t.join();
  }

  ThresholdSequence seq;
  for (std::size_t j = 0; j < count; ++j) {
    if (!done[j]) {
      seq.complete = false;
      seq.message = "entry " + std::to_string(j) + " (E = " + std::to_string(eTargets[j]) + "): " +
                    (errors[j].empty() ? std::string("not attempted") : errors[j]);
      break;
    }
    seq.entries.push_back(std::move(*done[j]));
  }
  return seq;
}

}  // namespace tlab::threebody
