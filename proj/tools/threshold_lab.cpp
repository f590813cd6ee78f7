// threshold_lab: command-line driver for the experiment suites.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "threshold_lab/model.hpp"
#include "threshold_lab/parallel.hpp"
#include "threshold_lab/suites.hpp"
#include "threshold_lab/system_io.hpp"

namespace {

using namespace tlab;
using suites::ExperimentConfig;

struct Common {
  std::string config;
  std::string outputDir;
  std::optional<int> jobs;
};

ExperimentConfig base_config(const Common& c) {
  ExperimentConfig cfg = c.config.empty() ? ExperimentConfig{} : suites::load_config(c.config);
  if (!c.outputDir.empty()) cfg.outputDir = c.outputDir;
  if (c.jobs) {
    cfg.jobs = *c.jobs;
  } else {
    cfg.jobs = jobs_from_env(cfg.jobs);
  }
  if (cfg.jobs < 1) throw ConfigError("--jobs must be at least 1");
  set_thread_count(cfg.jobs);
  return cfg;
}

int finish(const suites::SuiteReport& rep) {
  for (const auto& f : rep.files) std::cout << f.string() << '\n';
  if (!rep.status.empty()) (rep.exitCode == 0 ? std::cout : std::cerr) << rep.status << '\n';
  return rep.exitCode;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Threshold behaviour of three-body bound states: solvers, observables and reports"};
  app.require_subcommand(1);

  Common common;
  auto addCommon = [&](CLI::App* sub) {
    sub->add_option("-c,--config", common.config, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("-o,--output-dir", common.outputDir, "Directory for CSV and SVG outputs");
    sub->add_option("-j,--jobs", common.jobs, "Worker threads (THRESHOLD_LAB_JOBS when omitted)");
  };

  // twobody
  auto* two = app.add_subcommand("twobody", "Critical coupling and the two-body energy sequence");
  addCommon(two);
  std::string potential;
  std::optional<double> depth, range, startEnergy;
  bool findCritical = false;
  std::optional<int> sequence;
  two->add_option("--potential", potential, "gaussian | exponential | truncated-yukawa");
  two->add_option("--depth", depth, "Well depth g");
  two->add_option("--range", range, "Well range a");
  two->add_flag("--find-critical", findCritical, "Locate the critical coupling");
  two->add_option("--sequence", sequence, "Number of energies E_j = E_0 2^-j");
  two->add_option("--start-energy", startEnergy, "E_0 (negative)");

  // threebody
  auto* three = app.add_subcommand("threebody", "Threshold sequence of the three-body problem");
  addCommon(three);
  std::string systemFile;
  std::vector<double> targets;
  std::vector<int> grid;
  std::optional<double> rMaxFactor;
  bool dump = false;
  three->add_option("--system", systemFile, "System JSON (overrides the config)")->check(CLI::ExistingFile);
  three->add_option("--targets", targets, "Energy targets, comma separated")->delimiter(',');
  three->add_option("--grid", grid, "N1,N2,Nu")->delimiter(',')->expected(3);
  three->add_option("--rmax-factor", rMaxFactor, "Box radius in units of the state size 1/k");
  three->add_flag("--dump-wavefunctions", dump, "Write wavefunction_n<j>.csv grid samples");

  // universal
  auto* uni = app.add_subcommand("universal", "Hyperradial limit tables");
  addCommon(uni);
  std::vector<double> thetaGrid, kList;
  uni->add_option("--theta-grid", thetaGrid, "Angles in (0, pi/2), comma separated")->delimiter(',');
  uni->add_option("--k-list", kList, "Momenta in (0, 1), comma separated")->delimiter(',');

  // check
  auto* check = app.add_subcommand("check", "Admissibility of a system");
  addCommon(check);
  std::string checkSystem;
  check->add_option("--system", checkSystem, "System JSON")->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return suites::kExitConfig;
  }

  try {
    ExperimentConfig cfg = base_config(common);

    if (two->parsed()) {
      auto& t = cfg.twobody;
      if (!potential.empty()) t.potential.family = parse_family(potential);
      if (depth) t.potential.depth = *depth;
      if (range) t.potential.range = *range;
      if (findCritical) t.findCritical = true;
      if (sequence) t.sequenceLength = *sequence;
      if (startEnergy) t.startEnergy = *startEnergy;
      cfg.validate();
      return finish(suites::run_twobody_suite(cfg));
    }

    if (three->parsed()) {
      if (!systemFile.empty()) cfg.system = load_system(systemFile);
      if (!targets.empty()) cfg.targets = targets;
      if (!grid.empty()) {
        cfg.grid.N1 = grid[0];
        cfg.grid.N2 = grid[1];
        cfg.grid.Nu = grid[2];
      }
      if (rMaxFactor) cfg.grid.rMaxFactor = *rMaxFactor;
      if (dump) cfg.dumpWavefunctions = true;
      if (!cfg.system) throw ConfigError("threebody: a system is required (--config or --system)");
      return finish(suites::run_threshold_suite(cfg));
    }

    if (uni->parsed()) {
      if (!thetaGrid.empty()) cfg.universal.thetaGrid = thetaGrid;
      if (!kList.empty()) cfg.universal.kList = kList;
      return finish(suites::run_universal_suite(cfg));
    }

    if (check->parsed()) {
      if (!checkSystem.empty()) cfg.system = load_system(checkSystem);
      if (!cfg.system) throw ConfigError("check: a system is required (--config or --system)");
      const AdmissibilityReport rep = admissibility_check(*cfg.system);
      std::cout << suites::admissibility_json(rep).dump(2) << '\n';
      return rep.ok() ? suites::kExitOk : suites::kExitAdmissibility;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return suites::kExitConfig;
  } catch (const AdmissibilityError& e) {
    std::cerr << "admissibility: " << e.what() << '\n';
    return suites::kExitAdmissibility;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence: " << e.what() << '\n';
    return suites::kExitConvergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return suites::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return suites::kExitOk;
}
