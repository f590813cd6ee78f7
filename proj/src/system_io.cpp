#include "threshold_lab/system_io.hpp"

#include <fstream>

#include "threshold_lab/twobody.hpp"

namespace tlab {
namespace {

PairPotential potential_from_json(const nlohmann::json& j, double reducedMass, double delta) {
  PairPotential p;
  p.family = parse_family(j.at("family").get<std::string>());
  p.range = j.value("range", 1.0);
  p.delta = delta;
  const auto& depth = j.at("depth");
  if (depth.is_string()) {
    if (depth.get<std::string>() != "critical") throw ConfigError("depth must be a number or \"critical\"");
    p.depth = twobody::pair_critical_depth(p, reducedMass);
  } else {
    p.depth = depth.get<double>();
  }
  p.validate();
  return p;
}

nlohmann::json potential_to_json(const PairPotential& p) {
  return {{"family", std::string(to_string(p.family))}, {"depth", p.depth}, {"range", p.range}};
}

}  // namespace

SystemSpec system_from_json(const nlohmann::json& j) {
  try {
    SystemSpec spec;
    const auto& m = j.at("masses");
    spec.masses = {m.at("m1").get<double>(), m.at("m2").get<double>(), m.at("m3").get<double>()};
    const JacobiFrame frame = build_jacobi_frame(spec.masses);
    spec.delta = j.value("delta", kDefaultDelta);
    spec.lambda = j.value("lambda", 1.0);
    const auto& pots = j.at("potentials");
    spec.v12 = potential_from_json(pots.at("v12"), frame.mu12, spec.delta);
    spec.v13 = potential_from_json(pots.at("v13"), frame.mu13, spec.delta);
    spec.v23 = potential_from_json(pots.at("v23"), frame.mu23, spec.delta);
    if (!(spec.lambda > 0.0)) throw ConfigError("lambda must be positive");
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("system config: ") + e.what());
  }
}

nlohmann::json system_to_json(const SystemSpec& spec) {
  return {{"masses", {{"m1", spec.masses.m1}, {"m2", spec.masses.m2}, {"m3", spec.masses.m3}}},
          {"potentials",
           {{"v12", potential_to_json(spec.v12)}, {"v13", potential_to_json(spec.v13)},
            {"v23", potential_to_json(spec.v23)}}},
          {"lambda", spec.lambda},
          {"delta", spec.delta}};
}

SystemSpec load_system(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open system config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
  return system_from_json(j.contains("system") ? j.at("system") : j);
}

void save_system(const SystemSpec& spec, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << system_to_json(spec).dump(2) << '\n';
}

SystemSpec with_critical_v12(SystemSpec spec) {
  const JacobiFrame frame = build_jacobi_frame(spec.masses);
  spec.v12.depth = twobody::pair_critical_depth(spec.v12, frame.mu12);
  return spec;
}

}  // namespace tlab
