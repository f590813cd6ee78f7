#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "threshold_lab/model.hpp"

namespace tlab::threebody {

/// Discretized (r1, r2, u) box for the L = 0 problem. r1 = |x|, r2 = |y| in
/// Jacobi coordinates; u = x̂·ŷ. Dirichlet at r = 0 and r = rMax, which are
/// not stored. Flat index i + N1 (j + N2 k).
struct Grid3 {
  int N1 = 0, N2 = 0, Nu = 0;
  double rMax = 0.0;
  double stretch = 1.0;  // last / first radial spacing
  std::vector<double> r1Nodes, r2Nodes;
  std::vector<double> r1Weights, r2Weights;  // dual cell widths
  std::vector<double> uNodes, uWeights;

  std::size_t size() const { return static_cast<std::size_t>(N1) * N2 * Nu; }
  std::size_t index(int i, int j, int k) const {
    return static_cast<std::size_t>(i) + static_cast<std::size_t>(N1) * (j + static_cast<std::size_t>(N2) * k);
  }
  bool same_shape(const Grid3& o) const;
};

/// Stretch putting about half the radial nodes inside 5 ranges (1 when the
/// box is too small for grading to help).
double default_stretch(double rMax, int n, double range = 1.0);

/// Radial nodes from r(ξ) = rMax (e^{sξ} - 1) / (e^s - 1), ξ = i / (n + 1).
/// stretch <= 0 picks default_stretch with range 1.
Grid3 build_grid(double rMax, int N1, int N2, int Nu, double stretch = 0.0);

/// Reduced function Φ = r1 r2 ψ on a grid, ‖ψ‖² = 8π² ∫∫∫ Φ² dr1 dr2 du.
struct WaveFunction3 {
  Grid3 grid;
  std::vector<double> values;
  double norm = 0.0;
  double energy = 0.0;
  double lambda = 0.0;
  double residual = 0.0;  // ‖HΦ - EΦ‖ / |E|
  int iterations = 0;
  bool bound = false;     // energy < 0
};

/// 8π² Σ w1 w2 wu a b.
double inner_product(const Grid3& g, std::span<const double> a, std::span<const double> b);
double norm_of(const Grid3& g, std::span<const double> phi);

/// Probability in max(r1, r2) >= fraction * rMax.
double boundary_mass(const WaveFunction3& psi, double fraction = 0.9);

/// Potential split: sepR1(r1) + sepR2(r2) + lambda * coupled(r1, r2, u).
struct PotentialTables {
  std::vector<double> sepR1, sepR2, coupled;
};

/// v12 depends on |x| alone and goes into sepR1; v13 + v23 are coupled.
PotentialTables system_potentials(const Grid3& g, const SystemSpec& spec);
/// r1² + r2²: 6D isotropic oscillator with ground energy 6.
PotentialTables oscillator_potentials(const Grid3& g);
PotentialTables zero_potentials(const Grid3& g);

/// Discretized H(λ) = -∂²_{r1} - ∂²_{r2} - (1/r1² + 1/r2²) ∂_u (1 - u²) ∂_u + V.
/// Internally symmetric in the coordinates Ψ = sqrt(8π² w1 w2 wu) Φ.
class Hamiltonian {
 public:
  Hamiltonian(Grid3 grid, PotentialTables potentials, double lambda);

  const Grid3& grid() const { return grid_; }
  const PotentialTables& potentials() const { return pots_; }
  double lambda() const { return lambda_; }
  void set_lambda(double lambda) { lambda_ = lambda; }

  void apply_scaled(std::span<const double> in, std::span<double> out) const;
  /// HΦ on grid samples.
  std::vector<double> apply(std::span<const double> phi) const;

  std::vector<double> to_scaled(std::span<const double> phi) const;
  std::vector<double> from_scaled(std::span<const double> psi) const;
  std::vector<double> diagonal_scaled() const;

  // pieces shared with the preconditioner
  const std::vector<double>& radial1_diag() const { return d1_; }
  const std::vector<double>& radial1_off() const { return o1_; }
  const std::vector<double>& radial2_diag() const { return d2_; }
  const std::vector<double>& radial2_off() const { return o2_; }
  const std::vector<double>& legendre_matrix() const { return q_; }  // Nu x Nu, column-major
  const std::vector<double>& inv_r1_sq() const { return invR1sq_; }
  const std::vector<double>& inv_r2_sq() const { return invR2sq_; }

 private:
  Grid3 grid_;
  PotentialTables pots_;
  double lambda_;
  std::vector<double> sqrtW_;
  std::vector<double> d1_, o1_, d2_, o2_;  // scaled -∂² tridiagonals
  std::vector<double> q_;
  std::vector<double> invR1sq_, invR2sq_;
};

/// HΦ for Φ on phi.grid.
WaveFunction3 apply_hamiltonian(const WaveFunction3& phi, const SystemSpec& spec, double lambda);

enum class PreconditionerKind { Separable, Diagonal, None };

/// Exact inverse of the separable part (kinetic + sepR1 + sepR2 + σ), by
/// Legendre transform in u and fast diagonalization in (r1, r2) per l.
class SeparablePreconditioner {
 public:
  explicit SeparablePreconditioner(const Hamiltonian& h);
  void apply(std::span<const double> in, std::span<double> out, double sigma) const;

 private:
  int N1_, N2_, Nu_;
  std::vector<double> q_;
  std::vector<std::vector<double>> v1_, v2_;  // eigenvectors per l, column-major
  std::vector<std::vector<double>> e1_, e2_;
};

struct EigenOptions {
  int maxIterations = 2000;
  double tolerance = 1e-7;  // ‖HΨ - EΨ‖ / |E|
  PreconditionerKind preconditioner = PreconditionerKind::Separable;
};

struct EigenResult {
  std::vector<double> scaled;  // unit vector in scaled coordinates
  double energy = 0.0;
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Lowest eigenpair by block-size-1 LOBPCG.
EigenResult lowest_eigenpair(const Hamiltonian& h, const EigenOptions& opts = {},
                             const std::vector<double>* guessScaled = nullptr);

/// Ground state of H(λ) on the grid; throws ConvergenceError when the
/// eigensolver stalls. An unbound result (E >= 0) is flagged, not thrown.
WaveFunction3 ground_state(const SystemSpec& spec, double lambda, const Grid3& grid, const EigenOptions& opts = {},
                           const WaveFunction3* guess = nullptr);

/// Same for an explicit Hamiltonian (test families).
WaveFunction3 ground_state(const Hamiltonian& h, const EigenOptions& opts = {}, const WaveFunction3* guess = nullptr);

/// R3 at this λ: pairs {1,3} and {2,3} subcritical.
bool verify_R3(const SystemSpec& spec, double lambda);

/// Largest λ allowed by R3 (infinity when both coupled pairs have zero depth).
double r3_lambda_limit(const SystemSpec& spec);

/// Thrown when the target energy cannot be reached for λ inside the R3 window.
class BracketError : public ConvergenceError {
 public:
  BracketError(const std::string& what, double lo, double hi) : ConvergenceError(what), lambdaLo(lo), lambdaHi(hi) {}
  double lambdaLo, lambdaHi;
};

struct TuneOptions {
  double relTolerance = 0.05;  // |E - target| < relTolerance |target|
  int maxEvaluations = 60;
  EigenOptions eigen;
  double searchTolerance = 1e-5;  // eigen tolerance during the search
};

struct TuneResult {
  double lambda = 0.0;
  WaveFunction3 state;
  int evaluations = 0;
  int iterations = 0;  // total eigensolver iterations
};

/// Safeguarded root finding on λ (Illinois false position in k = sqrt(-E))
/// until |E(λ) - targetE| < relTolerance |targetE|.
TuneResult tune_lambda(const SystemSpec& spec, double targetE, const Grid3& grid, const TuneOptions& opts = {});

struct GridOptions {
  int N1 = 256, N2 = 256, Nu = 16;
  double rMaxFactor = 12.0;  // rMax = rMaxFactor / k
  double stretch = 0.0;      // <= 0: default_stretch over the largest potential range
};

struct ThresholdEntry {
  double target = 0.0;
  double lambda = 0.0;
  double energy = 0.0;
  double k = 0.0;
  double boundaryMass = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool r3 = false;
  WaveFunction3 state;
};

struct ThresholdSequence {
  std::vector<ThresholdEntry> entries;
  bool complete = true;
  std::string message;  // first failure, when incomplete
};

struct SequenceOptions {
  GridOptions grid;
  TuneOptions tune;
  int jobs = 1;  // entries solved concurrently
};

Grid3 grid_for_target(const SystemSpec& spec, double targetE, const GridOptions& opts);

/// Geometric default E0 4^{-j}.
std::vector<double> geometric_targets(double e0, int count, double ratio = 0.25);

/// Per target: rMax = rMaxFactor / k, fresh grid, tuned λ. Entries are
/// independent, so the result does not depend on jobs.
ThresholdSequence generate_threshold_sequence(const SystemSpec& spec, const std::vector<double>& eTargets,
                                              const SequenceOptions& opts = {});

}  // namespace tlab::threebody
