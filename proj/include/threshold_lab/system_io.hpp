#pragma once

#include <filesystem>

#include <json.hpp>

#include "threshold_lab/model.hpp"

namespace tlab {

/// JSON layout:
///   { "masses": {"m1":..,"m2":..,"m3":..},
///     "potentials": {"v12": {"family":..,"depth":..,"range":..}, "v13": .., "v23": ..},
///     "lambda": .., "delta": .. }
/// A depth given as the string "critical" resolves to the pair's critical
/// depth for its reduced mass.
SystemSpec system_from_json(const nlohmann::json& j);
nlohmann::json system_to_json(const SystemSpec& spec);

SystemSpec load_system(const std::filesystem::path& path);
void save_system(const SystemSpec& spec, const std::filesystem::path& path);

/// Copy of spec with v12 moved to its critical depth.
SystemSpec with_critical_v12(SystemSpec spec);

}  // namespace tlab
