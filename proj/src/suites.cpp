#include "threshold_lab/suites.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>

#include <boost/math/special_functions/bessel.hpp>

#include "threshold_lab/report.hpp"
#include "threshold_lab/system_io.hpp"
#include "threshold_lab/twobody.hpp"
#include "threshold_lab/universal.hpp"

namespace tlab::suites {
namespace fs = std::filesystem;
using report::CsvWriter;
using report::fmt;

namespace {

constexpr double kPi = std::numbers::pi;

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + dir.string());
}

std::string radius_label(double r) {
  std::string s = fmt(r);
  std::replace(s.begin(), s.end(), '.', 'p');
  return "spreading_R" + s;
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (targets.empty()) throw ConfigError("config: at least one energy target is required");
  for (std::size_t j = 0; j < targets.size(); ++j) {
    if (!(targets[j] < 0.0)) throw ConfigError("config: energy targets must be strictly negative");
    if (j > 0 && !(std::abs(targets[j]) < std::abs(targets[j - 1]))) {
      throw ConfigError("config: energy targets must decrease in magnitude");
    }
  }
  if (grid.N1 < 8 || grid.N2 < 8 || grid.Nu < 8) throw ConfigError("config: grid counts must be at least 8");
  if (!(grid.rMaxFactor > 0.0)) throw ConfigError("config: rmax_factor must be positive");
  if (jobs < 1) throw ConfigError("config: jobs must be at least 1");
  if (resample.nRho < 2 || resample.nTheta < 1) throw ConfigError("config: resample counts too small");
  for (double r : spreadingRadii)
    if (!(r >= 0.0)) throw ConfigError("config: spreading radii must be nonnegative");
  if (twobody.sequenceLength < 1) throw ConfigError("config: twobody sequence length must be positive");
  if (!(twobody.startEnergy < 0.0)) throw ConfigError("config: twobody start energy must be negative");
  for (double t : universal.thetaGrid)
    if (!(t > 0.0 && t < 0.5 * kPi)) throw ConfigError("config: theta grid must lie inside (0, pi/2)");
  for (double k : universal.kList)
    if (!(k > 0.0 && k < 1.0)) throw ConfigError("config: k list must lie inside (0, 1)");
}

ExperimentConfig config_from_json(const nlohmann::json& j, const fs::path& baseDir) {
  ExperimentConfig c;
  try {
    if (j.contains("system") && j.contains("system_file")) {
      throw ConfigError("config: give either \"system\" or \"system_file\", not both");
    }
    if (j.contains("system")) c.system = system_from_json(j.at("system"));
    if (j.contains("system_file")) {
      const fs::path p = baseDir / j.at("system_file").get<std::string>();
      if (!fs::exists(p)) throw ConfigError("config: system file " + p.string() + " does not exist");
      c.system = load_system(p);
    }
    if (j.contains("grid")) {
      const auto& g = j.at("grid");
      c.grid.N1 = g.value("N1", c.grid.N1);
      c.grid.N2 = g.value("N2", c.grid.N2);
      c.grid.Nu = g.value("Nu", c.grid.Nu);
      c.grid.rMaxFactor = g.value("rmax_factor", c.grid.rMaxFactor);
      c.grid.stretch = g.value("stretch", c.grid.stretch);
    }
    if (j.contains("targets")) {
      const auto& t = j.at("targets");
      if (t.is_array()) {
        c.targets = t.get<std::vector<double>>();
      } else {
        c.targets = threebody::geometric_targets(t.at("start").get<double>(), t.at("count").get<int>(),
                                                 t.value("ratio", 0.25));
      }
    }
    if (j.contains("output_dir")) {
      const fs::path out = j.at("output_dir").get<std::string>();
      c.outputDir = out.is_absolute() ? out : (baseDir / out).lexically_normal();
    }
    c.seed = j.value("seed", c.seed);
    c.jobs = j.value("jobs", c.jobs);
    c.dumpWavefunctions = j.value("dump_wavefunctions", c.dumpWavefunctions);
    if (j.contains("resample")) {
      c.resample.nRho = j.at("resample").value("n_rho", c.resample.nRho);
      c.resample.nTheta = j.at("resample").value("n_theta", c.resample.nTheta);
    }
    if (j.contains("spreading_radii")) c.spreadingRadii = j.at("spreading_radii").get<std::vector<double>>();
    if (j.contains("twobody")) {
      const auto& t = j.at("twobody");
      if (t.contains("potential")) c.twobody.potential.family = parse_family(t.at("potential").get<std::string>());
      c.twobody.potential.depth = t.value("depth", c.twobody.potential.depth);
      c.twobody.potential.range = t.value("range", c.twobody.potential.range);
      c.twobody.findCritical = t.value("find_critical", c.twobody.findCritical);
      c.twobody.sequenceLength = t.value("sequence", c.twobody.sequenceLength);
      c.twobody.startEnergy = t.value("start_energy", c.twobody.startEnergy);
    }
    if (j.contains("universal")) {
      const auto& u = j.at("universal");
      if (u.contains("theta_grid")) c.universal.thetaGrid = u.at("theta_grid").get<std::vector<double>>();
      if (u.contains("k_list")) c.universal.kList = u.at("k_list").get<std::vector<double>>();
      c.universal.identitySamples = u.value("identity_samples", c.universal.identitySamples);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

nlohmann::json admissibility_json(const AdmissibilityReport& rep) {
  auto moments = [](const MomentIntegrals& m) { return nlohmann::json{{"gamma", m.gamma}, {"gamma0", m.gamma0}}; };
  return {{"ok", rep.ok()},
          {"r1", rep.r1()},
          {"r3", rep.r3()},
          {"moments_finite", rep.momentsFinite},
          {"v12_nonpositive", rep.v12Nonpositive},
          {"v12_exponential_bound", rep.v12ExponentialBound},
          {"delta_in_range", rep.deltaInRange},
          {"v12_critical", rep.v12Critical},
          {"v13_subcritical", rep.v13Subcritical},
          {"v23_subcritical", rep.v23Subcritical},
          {"well_families", rep.wellFamilies},
          {"critical_depths", {{"v12", rep.v12CriticalDepth}, {"v13", rep.v13CriticalDepth}, {"v23", rep.v23CriticalDepth}}},
          {"moments", {{"v12", moments(rep.moments12)}, {"v13", moments(rep.moments13)}, {"v23", moments(rep.moments23)}}},
          {"notes", rep.notes}};
}

SuiteReport run_twobody_suite(const ExperimentConfig& config) {
  config.validate();
  prepare_dir(config.outputDir);
  SuiteReport rep;
  const PairPotential& p = config.twobody.potential;
  p.validate();

  if (config.twobody.findCritical) {
    const twobody::CriticalCouplingResult crit = twobody::find_critical_coupling(p);
    const fs::path path = config.outputDir / "twobody_critical.csv";
    CsvWriter csv(path, {"family", "range", "g_critical", "bracket_lo", "bracket_hi", "slope_at_critical",
                         "bessel_reference", "depth_over_critical"});
    std::string reference;
    if (p.family == PotentialFamily::Exponential) {
      const double j01 = boost::math::cyl_bessel_j_zero(0.0, 1);
      reference = fmt(j01 * j01 / (4.0 * p.range * p.range));
    }
    csv.row(std::vector<std::string>{std::string(to_string(p.family)), fmt(p.range), fmt(crit.gCritical),
                                     fmt(crit.bracket.first), fmt(crit.bracket.second), fmt(crit.slopeAtCritical),
                                     reference, fmt(p.depth / crit.gCritical)});
    rep.files.push_back(path);
  }

  const std::vector<twobody::SequenceEntry> seq =
      twobody::energy_sequence(p, config.twobody.startEnergy, 0.5, config.twobody.sequenceLength);
  const fs::path csvPath = config.outputDir / "twobody_sequence.csv";
  {
    CsvWriter csv(csvPath, {"g", "E", "k", "theorem1_distance"});
    for (const auto& e : seq) csv.row(std::vector<double>{e.g, e.energy, e.k, e.distance});
  }
  rep.files.push_back(csvPath);

  report::Series s{"theorem1_distance", {}, {}};
  std::vector<double> distances;
  for (const auto& e : seq) {
    s.x.push_back(std::abs(std::log(e.k)));
    s.y.push_back(e.distance);
    distances.push_back(e.distance);
  }
  const fs::path svg = config.outputDir / "twobody_distance.svg";
  report::write_line_plot(svg, {"Two-body distance to the asymptotic profile", "|ln k|", "distance"}, {s});
  rep.files.push_back(svg);

  rep.status = strictly_decreasing(distances) ? "twobody: distances strictly decreasing"
                                              : "twobody: warning, distances not strictly decreasing";
  return rep;
}

std::vector<ThresholdRow> summarize_sequence(const threebody::ThresholdSequence& seq, const ExperimentConfig& config) {
  std::vector<ThresholdRow> rows;
  int n = 0;
  for (const auto& e : seq.entries) {
    ThresholdRow r;
    r.n = n++;
    r.lambda = e.lambda;
    r.energy = e.energy;
    r.k = e.k;
    r.boundaryMass = e.boundaryMass;
    r.iterations = e.iterations;
    const observables::AngularDistribution d = observables::angular_distribution(e.state, config.resample);
    r.l1 = observables::l1_distance_to_universal(d);
    r.normD = d.normalization;
    r.flatness = observables::u_flatness(d);
    r.theorem2 = observables::theorem2_distance(e.state, e.k);
    for (double R : config.spreadingRadii) r.spreading.push_back(observables::spreading_diagnostic(e.state, R));
    rows.push_back(std::move(r));
  }
  return rows;
}

SuiteReport run_threshold_suite(const ExperimentConfig& config) {
  config.validate();
  if (!config.system) throw ConfigError("threshold suite: config has no system");
  prepare_dir(config.outputDir);
  SuiteReport rep;
  const SystemSpec& spec = *config.system;

  const AdmissibilityReport adm = admissibility_check(spec);
  {
    const fs::path path = config.outputDir / "admissibility.json";
    std::ofstream(path) << admissibility_json(adm).dump(2) << '\n';
    rep.files.push_back(path);
  }
  if (!adm.ok()) {
    rep.exitCode = kExitAdmissibility;
    rep.status = "threshold: system is not admissible (" + adm.notes + ")";
    return rep;
  }

  threebody::SequenceOptions so;
  so.grid = config.grid;
  so.jobs = config.jobs;
  const threebody::ThresholdSequence seq = threebody::generate_threshold_sequence(spec, config.targets, so);
  const std::vector<ThresholdRow> rows = summarize_sequence(seq, config);

  const fs::path seqPath = config.outputDir / "threebody_sequence.csv";
  {
    CsvWriter csv(seqPath, {"n", "lambda", "E", "k", "boundary_mass", "iterations"});
    for (const auto& r : rows)
      csv.row(std::vector<std::string>{std::to_string(r.n), fmt(r.lambda), fmt(r.energy), fmt(r.k),
                                       fmt(r.boundaryMass), std::to_string(r.iterations)});
  }
  rep.files.push_back(seqPath);

  const fs::path sumPath = config.outputDir / "threshold_summary.csv";
  {
    std::vector<std::string> header{"n", "k", "L1_to_universal", "theorem2_distance"};
    for (double R : config.spreadingRadii) header.push_back(radius_label(R));
    header.push_back("u_flatness");
    CsvWriter csv(sumPath, header);
    for (const auto& r : rows) {
      std::vector<std::string> cells{std::to_string(r.n), fmt(r.k), fmt(r.l1), fmt(r.theorem2)};
      for (double s : r.spreading) cells.push_back(fmt(s));
      cells.push_back(fmt(r.flatness));
      csv.row(cells);
    }
  }
  rep.files.push_back(sumPath);

  std::vector<report::Series> overlay;
  for (std::size_t j = 0; j < seq.entries.size(); ++j) {
    const auto& e = seq.entries[j];
    const observables::AngularDistribution d = observables::angular_distribution(e.state, config.resample);
    const fs::path path = config.outputDir / ("angular_n" + std::to_string(j) + ".csv");
    CsvWriter csv(path, {"theta", "u", "D"});
    const std::size_t nt = d.thetaNodes.size();
    for (std::size_t k = 0; k < d.uNodes.size(); ++k)
      for (std::size_t it = 0; it < nt; ++it) csv.row(std::vector<double>{d.thetaNodes[it], d.uNodes[k], d.values[it + nt * k]});
    rep.files.push_back(path);

    report::Series s{"n=" + std::to_string(j) + " (E=" + fmt(e.energy).substr(0, 9) + ")", {}, {}, false};
    for (std::size_t it = 0; it < nt; ++it) {
      double avg = 0.0;
      for (std::size_t k = 0; k < d.uNodes.size(); ++k) avg += 0.5 * d.uWeights[k] * d.values[it + nt * k];
      s.x.push_back(d.thetaNodes[it]);
      s.y.push_back(avg);
    }
    if (overlay.empty()) {
      report::Series lim{"sin^2(theta)/(4 pi^3)", {}, {}, false};
      for (double t = 0.0; t <= 0.5 * kPi + 1e-12; t += kPi / 200) {
        lim.x.push_back(t);
        lim.y.push_back(universal::universal_limit(t));
      }
      overlay.push_back(std::move(lim));
    }
    overlay.push_back(std::move(s));

    if (config.dumpWavefunctions) {
      const fs::path wf = config.outputDir / ("wavefunction_n" + std::to_string(j) + ".csv");
      CsvWriter w(wf, {"r1", "r2", "u", "phi", "psi"});
      const threebody::Grid3& g = e.state.grid;
      for (int k = 0; k < g.Nu; ++k)
        for (int jj = 0; jj < g.N2; ++jj)
          for (int i = 0; i < g.N1; ++i) {
            const double phi = e.state.values[g.index(i, jj, k)];
            w.row(std::vector<double>{g.r1Nodes[i], g.r2Nodes[jj], g.uNodes[k], phi,
                                      phi / (g.r1Nodes[i] * g.r2Nodes[jj])});
          }
      rep.files.push_back(wf);
    }
  }
  if (!rows.empty()) {
    const fs::path a = config.outputDir / "angular_overlay.svg";
    report::write_line_plot(a, {"u-averaged angular distribution", "theta", "D"}, overlay);
    rep.files.push_back(a);

    report::Series l1{"L1 to universal", {}, {}}, t2{"2 x theorem2 distance", {}, {}};
    std::vector<report::Series> spread;
    for (double R : config.spreadingRadii) spread.push_back({"R=" + fmt(R), {}, {}});
    for (const auto& r : rows) {
      l1.x.push_back(r.n);
      l1.y.push_back(r.l1);
      t2.x.push_back(r.n);
      t2.y.push_back(2.0 * r.theorem2);
      for (std::size_t i = 0; i < r.spreading.size(); ++i) {
        spread[i].x.push_back(r.n);
        spread[i].y.push_back(r.spreading[i]);
      }
    }
    const fs::path lp = config.outputDir / "l1_vs_n.svg";
    report::write_line_plot(lp, {"Angular distribution distance", "n", "distance"}, {l1, t2});
    rep.files.push_back(lp);
    const fs::path sp = config.outputDir / "spreading_vs_n.svg";
    report::write_line_plot(sp, {"Probability inside rho <= R", "n", "fraction"}, spread);
    rep.files.push_back(sp);
  }

  if (!seq.complete) {
    rep.exitCode = kExitConvergence;
    rep.status = "threshold: warning, partial sequence (" + std::to_string(rows.size()) + " of " +
                 std::to_string(config.targets.size()) + " entries): " + seq.message;
  } else {
    rep.status = "threshold: " + std::to_string(rows.size()) + " entries";
  }
  return rep;
}

SuiteReport run_universal_suite(const ExperimentConfig& config) {
  config.validate();
  prepare_dir(config.outputDir);
  SuiteReport rep;
  const auto& us = config.universal;

  const fs::path dPath = config.outputDir / "universal_dtheta.csv";
  std::vector<report::Series> errSeries;
  {
    CsvWriter csv(dPath, {"theta", "k", "D_theta_n", "universal", "abs_error"});
    for (double theta : us.thetaGrid) {
      report::Series s{"theta=" + fmt(theta).substr(0, 6), {}, {}};
      for (double k : us.kList) {
        const double d = universal::d_theta_n(theta, k);
        const double lim = universal::universal_limit(theta);
        csv.row(std::vector<double>{theta, k, d, lim, std::abs(d - lim)});
        s.x.push_back(std::abs(std::log(k)));
        s.y.push_back(std::abs(d - lim));
      }
      errSeries.push_back(std::move(s));
    }
  }
  rep.files.push_back(dPath);

  const fs::path rPath = config.outputDir / "universal_rate.csv";
  {
    CsvWriter csv(rPath, {"theta", "k", "error_k", "error_k_squared", "ratio"});
    for (double theta : us.thetaGrid)
      for (double k : us.kList) {
        const double lim = universal::universal_limit(theta);
        const double e1 = std::abs(universal::d_theta_n(theta, k) - lim);
        const double e2 = std::abs(universal::d_theta_n(theta, k * k) - lim);
        csv.row(std::vector<double>{theta, k, e1, e2, e2 / e1});
      }
  }
  rep.files.push_back(rPath);

  const fs::path nPath = config.outputDir / "universal_norm.csv";
  {
    CsvWriter csv(nPath, {"k", "theta_norm"});
    for (double k : us.kList) csv.row(std::vector<double>{k, universal::theta_norm(k)});
  }
  rep.files.push_back(nPath);

  const fs::path sPath = config.outputDir / "universal_substitution.csv";
  {
    CsvWriter csv(sPath, {"theta", "k", "rho_form", "t_form", "residual"});
    for (double theta : us.thetaGrid)
      for (double k : us.kList) {
        const double a = universal::d_theta_n(theta, k);
        const double b = universal::t_integral(theta, k) / (4.0 * kPi * kPi * kPi * std::abs(std::log(k)));
        csv.row(std::vector<double>{theta, k, a, b, std::abs(a - b)});
      }
  }
  rep.files.push_back(sPath);

  const fs::path pPath = config.outputDir / "universal_pde.csv";
  {
    CsvWriter csv(pPath, {"n", "residual", "boundary_derivative", "boundary_value", "boundary_ok"});
    for (int n = 1; n <= 4; ++n) {
      const universal::PdeCheck c = universal::heuristic_pde_residual(n);
      csv.row(std::vector<std::string>{std::to_string(n), fmt(c.residual), fmt(c.boundaryDerivative),
                                       fmt(c.boundaryValue), c.boundaryOk ? "1" : "0"});
    }
  }
  rep.files.push_back(pPath);

  const fs::path iPath = config.outputDir / "universal_identity.csv";
  {
    CsvWriter csv(iPath, {"rho", "theta", "k", "polar", "jacobi", "residual"});
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> rhoDist(1.0, 50.0), thetaDist(0.01, 0.5 * kPi - 0.01),
        logk(std::log(1e-9), std::log(0.5));
    for (int i = 0; i < us.identitySamples; ++i) {
      const double rho = rhoDist(rng), theta = thetaDist(rng), k = std::exp(logk(rng));
      const double a = universal::theta_n(rho, theta, k);
      const double b = universal::theta_n_jacobi(rho * std::cos(theta), rho * std::sin(theta), k);
      csv.row(std::vector<double>{rho, theta, k, a, b, std::abs(a - b) / std::max(std::abs(a), 1e-300)});
    }
  }
  rep.files.push_back(iPath);

  const fs::path svg = config.outputDir / "universal_error.svg";
  report::write_line_plot(svg, {"Distance of D_theta to the universal limit", "|ln k|", "|D - sin^2/(4 pi^3)|"},
                          errSeries);
  rep.files.push_back(svg);
  rep.status = "universal: tables written";
  return rep;
}

}  // namespace tlab::suites
