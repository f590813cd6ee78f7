#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "threshold_lab/model.hpp"
#include "threshold_lab/observables.hpp"
#include "threshold_lab/threebody.hpp"

namespace tlab::suites {

/// Process exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitAdmissibility = 2, kExitConvergence = 3, kExitConfig = 4 };

struct TwoBodySettings {
  PairPotential potential{PotentialFamily::Exponential, 1.0, 1.0};
  bool findCritical = true;
  int sequenceLength = 7;  // energies startEnergy * 2^{-j}
  double startEnergy = -0.1;
};

struct UniversalSettings {
  std::vector<double> thetaGrid{0.2, 0.4, 0.6, 0.7853981633974483, 1.0, 1.2, 1.4};
  std::vector<double> kList{1e-2, 1e-3, 1e-6, 1e-9, 1e-12};
  int identitySamples = 100;
};

struct ExperimentConfig {
  std::optional<SystemSpec> system;
  threebody::GridOptions grid;
  std::vector<double> targets = threebody::geometric_targets(-0.1, 4);
  std::filesystem::path outputDir = "threshold_lab_out";
  std::uint64_t seed = 20240611;
  int jobs = 1;
  bool dumpWavefunctions = false;
  observables::ResampleOptions resample;
  std::vector<double> spreadingRadii{1.0, 5.0};
  TwoBodySettings twobody;
  UniversalSettings universal;

  /// Checks targets and paths; throws ConfigError.
  void validate() const;
};

/// JSON layout:
///   { "system": {...} | "system_file": "path", "grid": {"N1", "N2", "Nu", "rmax_factor", "stretch"},
///     "targets": [..] | {"start", "ratio", "count"}, "output_dir", "seed", "jobs", "dump_wavefunctions",
///     "resample": {"n_rho", "n_theta"}, "twobody": {"potential", "depth", "range", "find_critical",
///     "sequence", "start_energy"}, "universal": {"theta_grid", "k_list", "identity_samples"} }
/// Relative paths resolve against baseDir.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& baseDir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

struct SuiteReport {
  std::vector<std::filesystem::path> files;
  int exitCode = kExitOk;
  std::string status;  // human-readable summary; warnings for partial runs
};

/// Critical coupling plus an E-halving sequence: twobody_sequence.csv
/// (g,E,k,theorem1_distance), twobody_critical.csv, twobody_distance.svg.
SuiteReport run_twobody_suite(const ExperimentConfig& config);

struct ThresholdRow {
  int n = 0;
  double lambda = 0.0, energy = 0.0, k = 0.0;
  double boundaryMass = 0.0;
  int iterations = 0;
  double l1 = 0.0, theorem2 = 0.0, flatness = 0.0, normD = 0.0;
  std::vector<double> spreading;  // one per config.spreadingRadii
};

/// Observables of every entry of a computed sequence.
std::vector<ThresholdRow> summarize_sequence(const threebody::ThresholdSequence& seq, const ExperimentConfig& config);

/// Threshold sequence and every observable: threebody_sequence.csv
/// (n,lambda,E,k,boundary_mass,iterations), threshold_summary.csv,
/// angular_n<j>.csv (theta,u,D) and SVG plots.
SuiteReport run_threshold_suite(const ExperimentConfig& config);

/// Hyperradial-limit tables: universal_dtheta.csv, universal_norm.csv,
/// universal_substitution.csv, universal_pde.csv, universal_identity.csv
/// and an error plot.
SuiteReport run_universal_suite(const ExperimentConfig& config);

/// Admissibility report as JSON.
nlohmann::json admissibility_json(const AdmissibilityReport& rep);

}  // namespace tlab::suites
